//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use evpkit::analysis::{
    check_prop52_contrapositive, gen_example53, gen_random, probe_example53_efficiency,
    probe_example53_unboundedness, RandomSpec, Trend,
};
use evpkit::evp::{check_nemeth_efficiency, evp_solve};
use evpkit::order::{brute_force_minimals, minimal_point, FinitePoset, MonotoneFunctional};
use evpkit::{xi_h, xi_k0, DirectionSet, ExtReal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use common::*;

const LAW_TOL: f64 = 1e-7;
/// Bisection width used where an absolute accuracy is asserted.
const FINE_BISECT: f64 = 1e-13;

struct Outcome {
    passed: bool,
    summary: String,
    report: Value,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn finite(v: ExtReal) -> f64 {
    v.value().expect("finite value")
}

/// Records the worst violation of `lhs <= rhs + tol`.
#[derive(Default)]
struct Law {
    checked: usize,
    failed: usize,
    worst: f64,
}

impl Law {
    fn le(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.checked += 1;
        let excess = lhs - rhs;
        self.worst = self.worst.max(excess);
        if excess > tol {
            self.failed += 1;
        }
    }

    fn eq(&mut self, a: f64, b: f64, tol: f64) {
        self.checked += 1;
        let d = (a - b).abs();
        self.worst = self.worst.max(d);
        if d > tol {
            self.failed += 1;
        }
    }

    fn holds(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }

    fn json(&self) -> Value {
        json!({"checked": self.checked, "failed": self.failed, "worst": self.worst})
    }
}

const C1_INSTANCES: u64 = 1000;

fn c1_instance(i: u64) -> (evpkit::PolyhedralCone, Vec<f64>, Vec<f64>, ChaCha8Rng) {
    let mut r = rng(10_000 + i);
    let m = 2 + (i % 3) as usize;
    let (cone, k0, y) = cone_direction_point(&mut r, m);
    (cone, k0, y, r)
}

fn criterion1() -> Outcome {
    let mut mono = Law::default();
    let mut homog = Law::default();
    let mut subadd = Law::default();
    let mut transl = Law::default();
    let mut strict = Law::default();
    let mut weak = Law::default();
    for i in 0..C1_INSTANCES {
        let (cone, k0, y, mut r) = c1_instance(i);
        let xi = |v: &[f64]| finite(xi_k0(&cone, &k0, v).unwrap());
        let v = xi(&y);

        // y1 <=_D y: y1 = y - d with d in D
        let d = random_cone_point(&mut r, &cone);
        mono.le(xi(&sub(&y, &d)), v, LAW_TOL);

        for alpha in [0.0, 0.5, 2.0, 10.0] {
            homog.eq(xi(&scale(alpha, &y)), alpha * v, LAW_TOL);
        }

        let y2 = random_point(&mut r, cone.dim(), 10.0);
        subadd.le(xi(&add(&y, &y2)), v + xi(&y2), LAW_TOL);

        let shift = r.gen_range(-5.0..5.0);
        transl.eq(xi(&add(&y, &scale(shift, &k0))), v + shift, LAW_TOL);

        // One-sided level-set memberships at value ± 10·tol.
        let rk = |r: f64| sub(&scale(r, &k0), &y);
        let above = v + 10.0 * LAW_TOL;
        let below = v - 10.0 * LAW_TOL;
        strict.holds(cone.member_vint(&k0, &rk(above)).unwrap());
        strict.holds(!cone.member_vint(&k0, &rk(below)).unwrap());
        weak.holds(cone.contains(&rk(above)).unwrap());
        weak.holds(!cone.contains(&rk(below)).unwrap());
    }
    let laws = [&mono, &homog, &subadd, &transl, &strict, &weak];
    let passed = laws.iter().all(|l| l.failed == 0);
    let failed: usize = laws.iter().map(|l| l.failed).sum();
    Outcome {
        passed,
        summary: format!("{C1_INSTANCES} instances, {failed} law violations"),
        report: json!({
            "instances": C1_INSTANCES,
            "monotone": mono.json(),
            "homogeneous": homog.json(),
            "subadditive": subadd.json(),
            "translation": transl.json(),
            "strict_level_set": strict.json(),
            "weak_level_set": weak.json(),
        }),
    }
}

fn criterion2() -> Outcome {
    const N: u64 = 500;
    let mut mono = Law::default();
    let mut zero = Law::default();
    let mut homog = Law::default();
    let mut subadd = Law::default();
    for i in 0..N {
        let mut r = rng(20_000 + i);
        let m = 2 + (i % 3) as usize;
        let k = 1 + ((i / 3) % 3) as usize;
        let (cone, h, y) = cone_polytope_point(&mut r, m, k);
        let xi = |v: &[f64]| finite(xi_h(&cone, &h, v, FINE_BISECT).unwrap().value);
        let v = xi(&y);

        let d = random_cone_point(&mut r, &cone);
        mono.le(xi(&sub(&y, &d)), v, LAW_TOL);

        zero.eq(xi(&vec![0.0; m]), 0.0, LAW_TOL);

        for alpha in [0.0, 0.5, 2.0, 10.0] {
            homog.eq(xi(&scale(alpha, &y)), alpha * v, LAW_TOL);
        }

        // Draw random pairs until both values are below -1e-6.
        for _ in 0..20 {
            let y1 = random_point(&mut r, m, 10.0);
            let y2 = random_point(&mut r, m, 10.0);
            let (v1, v2) = (xi(&y1), xi(&y2));
            if v1 < -1e-6 && v2 < -1e-6 {
                subadd.le(xi(&add(&y1, &y2)), v1 + v2, LAW_TOL);
                break;
            }
        }
    }
    let laws = [&mono, &zero, &homog, &subadd];
    let passed = laws.iter().all(|l| l.failed == 0) && subadd.checked > 0;
    let failed: usize = laws.iter().map(|l| l.failed).sum();
    Outcome {
        passed,
        summary: format!(
            "{N} instances, {failed} law violations, {} subadditivity pairs",
            subadd.checked
        ),
        report: json!({
            "instances": N,
            "monotone": mono.json(),
            "zero": zero.json(),
            "homogeneous": homog.json(),
            "conditional_subadditive": subadd.json(),
        }),
    }
}

fn criterion3() -> Outcome {
    let mut closed = Law::default();
    for i in 0..C1_INSTANCES {
        let (cone, k0, y, _) = c1_instance(i);
        let a = finite(xi_k0(&cone, &k0, &y).unwrap());
        let h = DirectionSet::singleton(k0.clone()).unwrap();
        let b = finite(xi_h(&cone, &h, &y, FINE_BISECT).unwrap().value);
        closed.eq(a, b, 1e-8);
    }
    let mut grid = Law::default();
    for i in 0..50u64 {
        let mut r = rng(30_000 + i);
        let (cone, h, y) = cone_polytope_point(&mut r, 2, 2);
        let v = h.vertices();
        if v.len() != 2 {
            continue;
        }
        let exact = finite(xi_h(&cone, &h, &y, evpkit::DEFAULT_TOL_BISECT).unwrap().value);
        let oracle = grid_xi_two_vertices(cone.rows(), &v[0], &v[1], &y);
        grid.eq(exact, oracle, 1e-4);
    }
    let passed = closed.failed == 0 && grid.failed == 0 && grid.checked == 50;
    Outcome {
        passed,
        summary: format!(
            "closed form worst {:.2e} over {}, grid worst {:.2e} over {}",
            closed.worst, closed.checked, grid.worst, grid.checked
        ),
        report: json!({"closed_form": closed.json(), "grid": grid.json()}),
    }
}

/// Random poset with a strictly compatible functional: pairs `i ⪯ j` are
/// drawn only where `eta(i) < eta(j)`, then closed transitively.
fn random_poset(r: &mut ChaCha8Rng) -> (FinitePoset, Vec<ExtReal>, usize) {
    let n = r.gen_range(1..=100);
    let levels = r.gen_range(1..=n.max(2));
    let eta: Vec<f64> = (0..n).map(|_| r.gen_range(0..levels) as f64).collect();
    let p = r.gen_range(0.01..0.3);
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if eta[i] < eta[j] && r.gen_bool(p) {
                rel[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                for j in 0..n {
                    if rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
    }
    let x0 = r.gen_range(0..n);
    (
        FinitePoset::from_matrix(rel).unwrap(),
        eta.into_iter().map(ExtReal::Finite).collect(),
        x0,
    )
}

fn criterion4() -> Outcome {
    const N: u64 = 200;
    let mut ok = 0;
    let mut hops = Vec::new();
    for i in 0..N {
        let mut r = rng(40_000 + i);
        let (poset, eta, x0) = random_poset(&mut r);
        let eta = MonotoneFunctional::new(&poset, eta).unwrap();
        let mp = minimal_point(&poset, &eta, x0).unwrap();
        let minimals: BTreeSet<usize> = brute_force_minimals(&poset, x0);
        if minimals.contains(&mp.x_hat) && poset.section(mp.x_hat) == vec![mp.x_hat] {
            ok += 1;
        }
        hops.push(mp.trace.len() - 1);
    }
    Outcome {
        passed: ok == N,
        summary: format!("{ok}/{N} runs returned a brute-force minimal point"),
        report: json!({"runs": N, "ok": ok, "hops": hops}),
    }
}

fn criterion5() -> Outcome {
    const N: u64 = 100;
    let mut runs = Vec::new();
    let (mut completed, mut ac_ok, mut efficient, mut b_ok) = (0, 0, 0, 0);
    let mut errors = Vec::new();
    for i in 0..N {
        let mut r = rng(50_000 + i);
        let spec = RandomSpec {
            seed: 50_000 + i,
            n: r.gen_range(1..=200),
            m: r.gen_range(2..=4),
            k: r.gen_range(1..=3),
            coord_range: 10.0,
        };
        let p = gen_random(spec).unwrap();
        let cert = match evp_solve(&p) {
            Ok(c) => c,
            Err(e) => {
                errors.push(format!("seed {}: {e}", spec.seed));
                continue;
            }
        };
        completed += 1;
        let ac = cert.cond_a.holds && cert.cond_c.holds;
        ac_ok += ac as usize;
        let eff = check_nemeth_efficiency(&p).unwrap().efficient;
        let b = cert.cond_b_metric.holds && cert.cond_b_cone.holds;
        if eff {
            efficient += 1;
            b_ok += b as usize;
        }
        runs.push(json!({
            "seed": spec.seed, "n": spec.n, "m": spec.m, "k": spec.k,
            "x_hat": cert.x_hat, "cond_a_c": ac, "efficient": eff, "cond_b": b,
        }));
    }
    Outcome {
        passed: errors.is_empty() && ac_ok == completed && b_ok == efficient,
        summary: format!(
            "{completed}/{N} completed, (a)∧(c) in {ac_ok}, (b) in {b_ok}/{efficient} efficient runs"
        ),
        report: json!({"runs": runs, "errors": errors}),
    }
}

fn criterion6() -> Outcome {
    let efficient = probe_example53_efficiency(100.0, 0.01).unwrap();
    let ladder = [10.0, 50.0, 100.0];
    let mut reports = Vec::new();
    let mut unbounded = true;
    for xi in [[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]] {
        let rep = probe_example53_unboundedness(&xi, &ladder, 0.01).unwrap();
        unbounded &= rep.verdict == Trend::UnboundedTrend;
        if xi == [1.0, 1.0] {
            for (rung, t) in rep.rungs.iter().zip(ladder) {
                unbounded &= rung.min.is_some_and(|m| m <= -t / 2.0);
            }
        }
        reports.push(rep);
    }
    let p = gen_example53(100.0, 0.01, 1.0).unwrap();
    let prop52 = check_prop52_contrapositive(&p).unwrap();
    let eps_ok = prop52.smallest_passing.is_some_and(|e| e <= 2.0);
    Outcome {
        passed: efficient && unbounded && eps_ok,
        summary: format!(
            "efficient at eps=2: {efficient}, unbounded trends: {unbounded}, smallest passing eps: {:?}",
            prop52.smallest_passing
        ),
        report: json!({
            "efficient": efficient,
            "ladders": reports,
            "prop52": prop52,
        }),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn write_report(dir: &Path, id: u32, report: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(report).unwrap();
    bytes.push(b'\n');
    std::fs::write(dir.join(format!("criterion{id}.json")), &bytes).unwrap();
    bytes
}

fn main() {
    let criteria: [Criterion; 6] = [
        (1, "Gerstewitz law suite", criterion1, Duration::from_secs(10)),
        (2, "generalized law suite", criterion2, Duration::from_secs(20)),
        (3, "oracle equivalence", criterion3, Duration::MAX),
        (4, "order-engine oracle", criterion4, Duration::from_secs(5)),
        (5, "EVP conclusions suite", criterion5, Duration::from_secs(60)),
        (6, "piecewise example reproduction", criterion6, Duration::from_secs(10)),
    ];
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut all = true;
    let mut identical = true;

    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < limit;
        let ok = out.passed && in_time;
        all &= ok;
        let limit_note = if limit == Duration::MAX {
            String::new()
        } else {
            format!(" (limit {}s)", limit.as_secs())
        };
        println!(
            "criterion {id} [{name}]: {} in {:.2}s{limit_note}; {}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.summary
        );
        let a = write_report(first.path(), id, &out.report);
        let b = write_report(second.path(), id, &run().report);
        identical &= a == b;
    }

    all &= identical;
    println!(
        "criterion 7 [determinism]: {}; reports for 1-6 {} across two runs",
        if identical { "PASS" } else { "FAIL" },
        if identical { "byte-identical" } else { "differ" }
    );
    if !all {
        std::process::exit(1);
    }
}
