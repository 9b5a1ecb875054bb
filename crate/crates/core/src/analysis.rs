//! Instance generators and diagnostic probes.
//!
//! The piecewise instance on the real line (`f(x) = (-x,-1)` for `x > 0`,
//! `(0,0)` at the origin, `(-1,x)` for `x < 0`) is ε-efficient at `x0 = 0`
//! for `ε = 2` under `H = {(1,1)}`, while every admissible dual functional is
//! unbounded below on the relevant part of `f(X) - f(x0)`. The probes here
//! exhibit both facts on growing grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{dot, validate_direction_set, DirectionSet, PolyhedralCone};
use crate::error::{Error, Result};
use crate::evp::{check_nemeth_efficiency_at, Metric, VectorProblem};
use crate::scalarization::{xi_h, xi_k0, DEFAULT_TOL_BISECT};

/// Objective of the piecewise instance.
pub fn example53_objective(x: f64) -> [f64; 2] {
    if x > 0.0 {
        [-x, -1.0]
    } else if x == 0.0 {
        [0.0, 0.0]
    } else {
        [-1.0, x]
    }
}

/// Grid `{j·step : |j·step| <= half_width}` on the line with `|x - x'|`,
/// `D` the orthant, `H = {(1,1)}`, `x0 = 0` and `ε = 2`.
pub fn gen_example53(half_width: f64, step: f64, gamma: f64) -> Result<VectorProblem> {
    if !(half_width > 0.0 && step > 0.0 && step <= half_width) {
        return Err(Error::Precondition(format!(
            "degenerate grid: T = {half_width}, step = {step}"
        )));
    }
    let k = (half_width / step + 1e-9).floor() as i64;
    let xs: Vec<f64> = (-k..=k).map(|j| j as f64 * step).collect();
    let labels = (-k..=k).map(|j| format!("x{j}")).collect();
    let fvals = xs.iter().map(|&x| example53_objective(x).to_vec()).collect();
    VectorProblem::new(
        labels,
        Metric::Euclidean(xs.iter().map(|&x| vec![x]).collect()),
        fvals,
        PolyhedralCone::orthant(2),
        DirectionSet::singleton(vec![1.0, 1.0])?,
        gamma,
        2.0,
        k as usize,
    )
}

pub fn probe_example53_efficiency(half_width: f64, step: f64) -> Result<bool> {
    let p = gen_example53(half_width, step, 1.0)?;
    Ok(check_nemeth_efficiency_at(&p, p.epsilon)?.efficient)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    BoundedTrend,
    UnboundedTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub range: f64,
    /// Number of points in the probed region.
    pub count: usize,
    pub min: Option<f64>,
    pub argmin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub functional: Vec<f64>,
    pub rungs: Vec<LadderRung>,
    pub verdict: Trend,
}

/// `xi ∈ D⁺` and `min_j <xi, h_j> > 0`.
pub fn check_dual_functional(cone: &PolyhedralCone, h: &DirectionSet, xi: &[f64]) -> Result<()> {
    if !cone.dual_contains(xi)? {
        return Err(Error::Precondition(format!("{xi:?} is not in the dual cone")));
    }
    let inf_h = h
        .vertices()
        .iter()
        .map(|v| dot(xi, v))
        .fold(f64::INFINITY, f64::min);
    if !(inf_h > 0.0) {
        return Err(Error::Precondition(format!(
            "{xi:?} is not strictly positive on H (inf = {inf_h})"
        )));
    }
    Ok(())
}

/// `y ∈ -(∪_{λ>0} λH + D)`, i.e. the scalarization of `y` is negative.
fn in_negative_region(p: &VectorProblem, y: &[f64]) -> Result<bool> {
    let verts = p.directions.vertices();
    if verts.len() == 1 {
        return Ok(xi_k0(&p.cone, &verts[0], y)?.to_f64() < 0.0);
    }
    // No closed form; require the value to clear the bisection resolution.
    let r = xi_h(&p.cone, &p.directions, y, DEFAULT_TOL_BISECT)?;
    Ok(r.value.to_f64() < -1e-7)
}

/// For each range `T` in the ladder, the minimum of `<xi, f(x) - f(x0)>` over
/// grid points in the negative region. The trend is unbounded when every rung
/// falls to `-T/2` or below.
pub fn probe_unboundedness<F>(family: F, xi: &[f64], ladder: &[f64]) -> Result<BoundednessReport>
where
    F: Fn(f64) -> Result<VectorProblem>,
{
    if ladder.is_empty() {
        return Err(Error::Precondition("empty range ladder".into()));
    }
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut unbounded = true;
    for &range in ladder {
        let p = family(range)?;
        check_dual_functional(&p.cone, &p.directions, xi)?;
        let y0 = &p.fvals[p.x0];
        let mut rung = LadderRung {
            range,
            count: 0,
            min: None,
            argmin: None,
        };
        for (i, f) in p.fvals.iter().enumerate() {
            let diff: Vec<f64> = f.iter().zip(y0).map(|(a, b)| a - b).collect();
            if !in_negative_region(&p, &diff)? {
                continue;
            }
            rung.count += 1;
            let v = dot(xi, &diff);
            if rung.min.is_none_or(|m| v < m) {
                rung.min = Some(v);
                rung.argmin = Some(i);
            }
        }
        unbounded &= rung.min.is_some_and(|m| m <= -range / 2.0);
        rungs.push(rung);
    }
    Ok(BoundednessReport {
        functional: xi.to_vec(),
        rungs,
        verdict: if unbounded {
            Trend::UnboundedTrend
        } else {
            Trend::BoundedTrend
        },
    })
}

/// Ladder probe over the piecewise grid family with a fixed step.
pub fn probe_example53_unboundedness(
    xi: &[f64],
    ladder: &[f64],
    step: f64,
) -> Result<BoundednessReport> {
    probe_unboundedness(|t| gen_example53(t, step, 1.0), xi, ladder)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonProbe {
    pub epsilon: f64,
    pub efficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop52Report {
    pub tested: Vec<EpsilonProbe>,
    pub smallest_passing: Option<f64>,
}

pub const EPSILON_EXPONENTS: std::ops::RangeInclusive<i32> = -10..=20;

/// Searches `ε = 2^j`, `j = -10..=20`, for `(f(x0) - εH - D) ∩ f(X) = ∅`.
pub fn check_prop52_contrapositive(problem: &VectorProblem) -> Result<Prop52Report> {
    let mut tested = Vec::new();
    for j in EPSILON_EXPONENTS {
        let epsilon = 2f64.powi(j);
        let efficient = check_nemeth_efficiency_at(problem, epsilon)?.efficient;
        tested.push(EpsilonProbe { epsilon, efficient });
    }
    let smallest_passing = tested.iter().find(|p| p.efficient).map(|p| p.epsilon);
    Ok(Prop52Report {
        tested,
        smallest_passing,
    })
}

/// `y ∈ β·(H + D)`; with `β >= 1` this never leaves `H + D` when `y` starts
/// inside it.
pub fn in_scaled_coradiant(
    cone: &PolyhedralCone,
    h: &DirectionSet,
    beta: f64,
    y: &[f64],
) -> Result<bool> {
    Ok(cone.member_shifted(h, beta, y)?.inside)
}

/// `(f(X) - f(x0)) ∩ (-ε·C_H) = ∅` with `C_H = H + D`.
pub fn is_c_epsilon_efficient(problem: &VectorProblem, epsilon: f64) -> Result<bool> {
    let y0 = &problem.fvals[problem.x0];
    for f in &problem.fvals {
        let neg: Vec<f64> = f.iter().zip(y0).map(|(a, b)| b - a).collect();
        if in_scaled_coradiant(&problem.cone, &problem.directions, epsilon, &neg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub coord_range: f64,
}

/// Orthant half the time, otherwise a perturbed simplicial cone, sometimes
/// with one redundant row.
pub fn random_cone(rng: &mut impl Rng, m: usize) -> PolyhedralCone {
    if rng.gen_bool(0.5) {
        return PolyhedralCone::orthant(m);
    }
    loop {
        let mut rows: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { 1.0 } else { rng.gen_range(-0.3..0.3) })
                    .collect()
            })
            .collect();
        if m >= 2 && rng.gen_bool(0.5) {
            let (a, b) = (rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0));
            let extra = rows[0].iter().zip(&rows[1]).map(|(x, y)| a * x + b * y).collect();
            rows.push(extra);
        }
        if let Ok(c) = PolyhedralCone::new(rows) {
            if c.is_pointed() {
                return c;
            }
        }
    }
}

/// Rejection-samples a point whose every row residual is at least
/// `margin·|a_i|·|v|`. Returns `None` after `tries` misses.
pub fn random_interior_point(
    rng: &mut impl Rng,
    cone: &PolyhedralCone,
    low: f64,
    high: f64,
    margin: f64,
    tries: usize,
) -> Option<Vec<f64>> {
    for _ in 0..tries {
        let v: Vec<f64> = (0..cone.dim()).map(|_| rng.gen_range(low..high)).collect();
        let norm = dot(&v, &v).sqrt();
        if cone
            .rows()
            .iter()
            .all(|a| dot(a, &v) >= margin * dot(a, a).sqrt() * norm)
        {
            return Some(v);
        }
    }
    None
}

pub fn random_direction_set(
    rng: &mut impl Rng,
    cone: &PolyhedralCone,
    k: usize,
) -> Option<DirectionSet> {
    let verts = (0..k)
        .map(|_| random_interior_point(rng, cone, 0.1, 1.0, 0.05, 10_000))
        .collect::<Option<Vec<_>>>()?;
    let h = DirectionSet::new(verts).ok()?;
    let report = validate_direction_set(cone, &h).ok()?;
    report.passes().then_some(h)
}

/// Reproducible random instance: points in `[0, range]²` with the Euclidean
/// metric, objectives in `[-range, range]^m`, `γ = 0.5`, `ε` drawn from
/// `[0.05, 1]·range` and `x0 = 0`.
pub fn gen_random(spec: RandomSpec) -> Result<VectorProblem> {
    let RandomSpec {
        seed,
        n,
        m,
        k,
        coord_range,
    } = spec;
    if n < 1 || m < 2 || k < 1 || !(coord_range > 0.0 && coord_range.is_finite()) {
        return Err(Error::Precondition(format!(
            "need n >= 1, m >= 2, k >= 1 and a positive range, got {spec:?}"
        )));
    }
    let mut last_err = None;
    for stream in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        match random_attempt(&mut rng, spec) {
            Ok(p) => return Ok(p),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidProblem("generation failed".into())))
}

fn random_attempt(rng: &mut ChaCha8Rng, spec: RandomSpec) -> Result<VectorProblem> {
    let RandomSpec {
        n,
        m,
        k,
        coord_range,
        ..
    } = spec;
    let cone = random_cone(rng, m);
    let directions = random_direction_set(rng, &cone, k)
        .ok_or_else(|| Error::InvalidDirectionSet("could not place H inside D".into()))?;
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..2).map(|_| rng.gen_range(0.0..coord_range)).collect())
        .collect();
    let fvals: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| rng.gen_range(-coord_range..coord_range))
                .collect()
        })
        .collect();
    let epsilon = rng.gen_range(0.05..1.0) * coord_range;
    VectorProblem::new(
        (0..n).map(|i| format!("p{i}")).collect(),
        Metric::Euclidean(coords),
        fvals,
        cone,
        directions,
        0.5,
        epsilon,
        0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evp::{check_nemeth_efficiency, evp_solve};
    use crate::evp::tests::two_point;

    #[test]
    fn objective_branches() {
        assert_eq!(example53_objective(3.0), [-3.0, -1.0]);
        assert_eq!(example53_objective(0.0), [0.0, 0.0]);
        assert_eq!(example53_objective(-2.0), [-1.0, -2.0]);
    }

    #[test]
    fn grid_shape() {
        let p = gen_example53(10.0, 0.1, 1.0).unwrap();
        assert_eq!(p.len(), 201);
        assert_eq!(p.fvals[p.x0], vec![0.0, 0.0]);
        assert_eq!(p.labels[p.x0], "x0");
        assert!(gen_example53(1.0, 2.0, 1.0).is_err());
        assert!(gen_example53(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn example_efficiency() {
        assert!(probe_example53_efficiency(10.0, 0.1).unwrap());
        let p = gen_example53(10.0, 0.1, 1.0).unwrap();
        let e = check_nemeth_efficiency_at(&p, 1.0).unwrap();
        assert!(!e.efficient);
        let w = e.violating.unwrap();
        // (-1, x) with x <= -1
        assert_eq!(p.fvals[w][0], -1.0);
        assert!(p.fvals[w][1] <= -1.0);
    }

    #[test]
    fn ladder_for_diagonal_functional() {
        let r = probe_example53_unboundedness(&[1.0, 1.0], &[10.0, 50.0, 100.0], 0.1).unwrap();
        assert_eq!(r.verdict, Trend::UnboundedTrend);
        for rung in &r.rungs {
            assert!(rung.min.unwrap() <= -rung.range);
        }
        assert!(r.rungs.windows(2).all(|w| w[1].min <= w[0].min));
    }

    #[test]
    fn ladder_for_axis_functionals() {
        for xi in [[1.0, 0.0], [0.0, 1.0]] {
            let r = probe_example53_unboundedness(&xi, &[10.0, 50.0, 100.0], 0.1).unwrap();
            assert_eq!(r.verdict, Trend::UnboundedTrend, "{xi:?}");
            for rung in &r.rungs {
                assert!(rung.min.unwrap() <= -(rung.range - 1.0));
            }
        }
    }

    #[test]
    fn ladder_rejects_zero_functional() {
        let r = probe_example53_unboundedness(&[0.0, 0.0], &[10.0], 0.1);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = probe_example53_unboundedness(&[1.0, -1.0], &[10.0], 0.1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn prop52_examples() {
        let p = gen_example53(10.0, 0.1, 1.0).unwrap();
        let r = check_prop52_contrapositive(&p).unwrap();
        assert_eq!(r.smallest_passing, Some(2.0));

        let r = check_prop52_contrapositive(&two_point(1.0, 1.0)).unwrap();
        let at = |e: f64| r.tested.iter().find(|p| p.epsilon == e).unwrap().efficient;
        assert!(at(2.0));
        assert!(!at(1.0));

        let mut flat = two_point(1.0, 1.0);
        flat.fvals[1] = flat.fvals[0].clone();
        let r = check_prop52_contrapositive(&flat).unwrap();
        assert!(r.tested.iter().all(|p| p.efficient));
        assert_eq!(r.smallest_passing, Some(2f64.powi(-10)));
    }

    #[test]
    fn random_single_point() {
        let p = gen_random(RandomSpec {
            seed: 1,
            n: 1,
            m: 2,
            k: 1,
            coord_range: 10.0,
        })
        .unwrap();
        assert_eq!(evp_solve(&p).unwrap().x_hat, p.x0);
    }

    #[test]
    fn random_is_reproducible() {
        let spec = RandomSpec {
            seed: 42,
            n: 50,
            m: 3,
            k: 2,
            coord_range: 10.0,
        };
        let a = gen_random(spec).unwrap();
        let b = gen_random(spec).unwrap();
        assert_eq!(a, b);
        let c = gen_random(RandomSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_rejects_bad_sizes() {
        let spec = RandomSpec {
            seed: 0,
            n: 0,
            m: 2,
            k: 1,
            coord_range: 1.0,
        };
        assert!(gen_random(spec).is_err());
        assert!(gen_random(RandomSpec { n: 3, m: 1, ..spec }).is_err());
    }

    #[test]
    fn c_epsilon_matches_nemeth() {
        for seed in 0..10 {
            let p = gen_random(RandomSpec {
                seed,
                n: 30,
                m: 3,
                k: 2,
                coord_range: 5.0,
            })
            .unwrap();
            assert_eq!(
                is_c_epsilon_efficient(&p, p.epsilon).unwrap(),
                check_nemeth_efficiency(&p).unwrap().efficient
            );
        }
    }
}
