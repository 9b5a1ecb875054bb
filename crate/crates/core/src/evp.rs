//! Vector Ekeland principle on finite metric instances.
//!
//! The section relation is `z ⪯ x` iff `f(x) ∈ f(z) + γ·d(x,z)·H + D`. The
//! minimal-point engine runs on it with `eta(x) = xi_H(f(x) - f(x0))`, and the
//! resulting point is certified against the three conclusions:
//!
//! * (a) `f(x0) ∈ f(x̂) + γ·d(x0,x̂)·H + D`,
//! * (b) `d(x0,x̂) < ε/γ`, and the cone form `γ·d(x0,x̂)·h0 ∉ εH + D`,
//! * (c) `f(x̂) ∉ f(x) + γ·d(x̂,x)·H + D` for every `x ≠ x̂`.

use serde::{Deserialize, Serialize};

use crate::cone::{on_simplex, validate_direction_set, DirectionSet, PolyhedralCone};
use crate::error::{check_dim, Error, Result};
use crate::ext_real::ExtReal;
use crate::order::{minimal_point, FinitePoset, MonotoneFunctional, TraceEntry};
use crate::scalarization::{GeneralizedGerstewitz, DEFAULT_TOL_BISECT};

/// Largest instance whose metric axioms are verified exhaustively.
pub const METRIC_CHECK_LIMIT: usize = 500;
/// Largest instance whose section relation is checked for transitivity.
pub const TRANSITIVITY_CHECK_LIMIT: usize = 200;

/// Slack allowed when checking monotonicity of the computed `eta` table.
pub const ETA_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Explicit symmetric distance matrix.
    Matrix(Vec<Vec<f64>>),
    /// Euclidean distance between coordinate rows.
    Euclidean(Vec<Vec<f64>>),
}

impl Metric {
    pub fn len(&self) -> usize {
        match self {
            Metric::Matrix(m) | Metric::Euclidean(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            Metric::Matrix(m) => m[i][j],
            Metric::Euclidean(c) => c[i]
                .iter()
                .zip(&c[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        match self {
            Metric::Matrix(m) => {
                for (i, row) in m.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidProblem(format!(
                            "distance row {i} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidProblem(format!(
                            "distance row {i} has a non-finite entry"
                        )));
                    }
                }
            }
            Metric::Euclidean(c) => {
                let dim = c.first().map_or(0, Vec::len);
                if dim == 0 || c.iter().any(|p| p.len() != dim) {
                    return Err(Error::InvalidProblem("ragged or empty coordinates".into()));
                }
                if c.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidProblem("non-finite coordinate".into()));
                }
            }
        }
        if n > METRIC_CHECK_LIMIT {
            return Ok(());
        }
        for i in 0..n {
            if self.distance(i, i) != 0.0 {
                return Err(Error::InvalidProblem(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = self.distance(i, j);
                if d != self.distance(j, i) {
                    return Err(Error::InvalidProblem(format!(
                        "distance is not symmetric at ({i},{j})"
                    )));
                }
                if d <= 0.0 {
                    return Err(Error::InvalidProblem(format!(
                        "distance between distinct points {i} and {j} is not positive"
                    )));
                }
            }
        }
        if let Metric::Matrix(_) = self {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = self.distance(i, k);
                        let rhs = self.distance(i, j) + self.distance(j, k);
                        if lhs > rhs * (1.0 + 1e-12) {
                            return Err(Error::InvalidProblem(format!(
                                "triangle inequality fails for ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A finite instance of `Min{f(x) : x ∈ X}` with its perturbation data.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorProblem {
    pub labels: Vec<String>,
    pub metric: Metric,
    pub fvals: Vec<Vec<f64>>,
    pub cone: PolyhedralCone,
    pub directions: DirectionSet,
    pub gamma: f64,
    pub epsilon: f64,
    pub x0: usize,
}

impl VectorProblem {
    /// Checks every instance invariant before handing the problem out.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        labels: Vec<String>,
        metric: Metric,
        fvals: Vec<Vec<f64>>,
        cone: PolyhedralCone,
        directions: DirectionSet,
        gamma: f64,
        epsilon: f64,
        x0: usize,
    ) -> Result<Self> {
        let p = VectorProblem {
            labels,
            metric,
            fvals,
            cone,
            directions,
            gamma,
            epsilon,
            x0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.fvals.len();
        if n == 0 {
            return Err(Error::InvalidProblem("no points".into()));
        }
        if self.labels.len() != n || self.metric.len() != n {
            return Err(Error::InvalidProblem(format!(
                "{} labels, {} metric rows and {} objective rows disagree",
                self.labels.len(),
                self.metric.len(),
                n
            )));
        }
        let m = self.cone.dim();
        for row in &self.fvals {
            check_dim(m, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem("non-finite objective value".into()));
            }
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidProblem(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.x0 >= n {
            return Err(Error::InvalidProblem(format!("x0 = {} out of range", self.x0)));
        }
        self.metric.validate()?;
        let report = validate_direction_set(&self.cone, &self.directions)?;
        if !report.inside_cone {
            return Err(Error::InvalidProblem("H is not contained in D".into()));
        }
        if !report.separated_from_origin {
            return Err(Error::InvalidProblem("0 in H+D".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.fvals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fvals.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(i, j)
    }

    fn diff(&self, i: usize, j: usize) -> Vec<f64> {
        self.fvals[i]
            .iter()
            .zip(&self.fvals[j])
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `z ⪯ x`: `f(x) - f(z) ∈ γ·d(x,z)·H + D`.
    pub fn dominated_by(&self, z: usize, x: usize) -> Result<bool> {
        if z == x {
            return Ok(true);
        }
        let t = self.gamma * self.distance(x, z);
        Ok(self.cone.member_shifted(&self.directions, t, &self.diff(x, z))?.inside)
    }
}

/// Builds the section relation as a dense poset.
pub fn section_relation(problem: &VectorProblem) -> Result<FinitePoset> {
    let n = problem.len();
    let mut err = None;
    let poset = FinitePoset::from_fn_unchecked(n, |z, x| {
        if err.is_some() {
            return false;
        }
        problem.dominated_by(z, x).unwrap_or_else(|e| {
            err = Some(e);
            false
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    poset.check_reflexive()?;
    poset.check_antisymmetric()?;
    if n <= TRANSITIVITY_CHECK_LIMIT {
        poset
            .check_transitive()
            .map_err(|e| Error::Invariant(format!("section relation: {e}")))?;
    }
    Ok(poset)
}

/// `eta(x) = xi_H(f(x) - f(x0))`, checked monotone along `poset`.
pub fn eta_from_scalarization(
    problem: &VectorProblem,
    poset: &FinitePoset,
    tol_bisect: f64,
) -> Result<MonotoneFunctional> {
    let xi = GeneralizedGerstewitz::new_unchecked(&problem.cone, &problem.directions);
    let mut values = Vec::with_capacity(problem.len());
    for i in 0..problem.len() {
        let r = xi.eval(&problem.diff(i, problem.x0), tol_bisect)?;
        if r.value == ExtReal::MinusInf {
            return Err(Error::Invariant(format!("eta({i}) is -inf")));
        }
        values.push(r.value);
    }
    MonotoneFunctional::with_slack(poset, values, ETA_SLACK).map_err(|e| match e {
        Error::NonMonotone { .. } => Error::Invariant(format!("scalarized objective: {e}")),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfficiencyCheck {
    pub efficient: bool,
    pub violating: Option<usize>,
}

/// `(f(X) - f(x0)) ∩ (-εH - D) = ∅` at the given `epsilon`.
pub fn check_nemeth_efficiency_at(problem: &VectorProblem, epsilon: f64) -> Result<EfficiencyCheck> {
    let x0 = problem.x0;
    for i in 0..problem.len() {
        // f(x_i) - f(x0) ∈ (-ε)·H - D
        let m = problem
            .cone
            .member_scaled(&problem.directions, -epsilon, &problem.diff(i, x0))?;
        if m.inside {
            return Ok(EfficiencyCheck {
                efficient: false,
                violating: Some(i),
            });
        }
    }
    Ok(EfficiencyCheck {
        efficient: true,
        violating: None,
    })
}

pub fn check_nemeth_efficiency(problem: &VectorProblem) -> Result<EfficiencyCheck> {
    check_nemeth_efficiency_at(problem, problem.epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondA {
    pub holds: bool,
    /// Simplex weights of `h0` over the vertices of `H`.
    pub lambda: Vec<f64>,
    pub h0: Vec<f64>,
    /// `f(x0) - f(x̂) - γ·d(x0,x̂)·h0`, which lies in `D`.
    pub d0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondBMetric {
    pub holds: bool,
    pub distance: f64,
    pub bound: f64,
    /// `ε/γ - d(x0,x̂)`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondBCone {
    pub holds: bool,
    /// `d(x0,x̂)·h0`.
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondC {
    pub holds: bool,
    pub violating: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvpCertificate {
    pub x_hat: usize,
    pub cond_a: CondA,
    pub cond_b_metric: CondBMetric,
    pub cond_b_cone: CondBCone,
    pub cond_c: CondC,
    pub x0_efficient: bool,
    pub efficiency_violating: Option<usize>,
    pub eta_trace: Vec<TraceEntry>,
}

impl EvpCertificate {
    /// The conclusions that hold for every completed run.
    pub fn unconditional_ok(&self) -> bool {
        self.cond_a.holds && self.cond_c.holds
    }
}

fn cond_a(problem: &VectorProblem, x_hat: usize) -> Result<CondA> {
    let x0 = problem.x0;
    let dist = problem.distance(x0, x_hat);
    let t = problem.gamma * dist;
    let diff = problem.diff(x0, x_hat);
    let m = problem.cone.member_shifted(&problem.directions, t, &diff)?;
    Ok(match m.lambda {
        Some(lambda) => {
            let h0 = problem.directions.combine(&lambda);
            let d0 = diff.iter().zip(&h0).map(|(v, h)| v - t * h).collect();
            CondA {
                holds: true,
                lambda,
                h0,
                d0,
            }
        }
        None => CondA {
            holds: false,
            lambda: Vec::new(),
            h0: Vec::new(),
            d0: Vec::new(),
        },
    })
}

fn cond_b_metric(problem: &VectorProblem, x_hat: usize) -> CondBMetric {
    let distance = problem.distance(problem.x0, x_hat);
    let bound = problem.epsilon / problem.gamma;
    CondBMetric {
        holds: distance < bound,
        distance,
        bound,
        margin: bound - distance,
    }
}

/// Cone form of (b) for a given `h0`: `d·h0 ∈ cone(H+D)` (automatic for
/// `d >= 0` and `h0 ∈ H`) and `γ·d·h0 ∉ εH + D`.
fn cond_b_cone(problem: &VectorProblem, x_hat: usize, lambda: &[f64]) -> Result<CondBCone> {
    if !on_simplex(lambda) || lambda.len() != problem.directions.len() {
        return Ok(CondBCone {
            holds: false,
            point: Vec::new(),
        });
    }
    let dist = problem.distance(problem.x0, x_hat);
    let h0 = problem.directions.combine(lambda);
    let point: Vec<f64> = h0.iter().map(|h| dist * h).collect();
    let scaled: Vec<f64> = point.iter().map(|p| problem.gamma * p).collect();
    let in_eps_set = problem
        .cone
        .member_shifted(&problem.directions, problem.epsilon, &scaled)?
        .inside;
    Ok(CondBCone {
        holds: dist >= 0.0 && !in_eps_set,
        point,
    })
}

fn cond_c(problem: &VectorProblem, x_hat: usize) -> Result<CondC> {
    let mut violating = Vec::new();
    for x in 0..problem.len() {
        if x != x_hat && problem.dominated_by(x, x_hat)? {
            violating.push(x);
        }
    }
    Ok(CondC {
        holds: violating.is_empty(),
        violating,
    })
}

pub fn evp_solve(problem: &VectorProblem) -> Result<EvpCertificate> {
    evp_solve_with(problem, DEFAULT_TOL_BISECT)
}

pub fn evp_solve_with(problem: &VectorProblem, tol_bisect: f64) -> Result<EvpCertificate> {
    problem.validate()?;
    let poset = section_relation(problem)?;
    let eta = eta_from_scalarization(problem, &poset, tol_bisect)?;
    let found = minimal_point(&poset, &eta, problem.x0)?;
    let x_hat = found.x_hat;

    let cond_a = cond_a(problem, x_hat)?;
    let cond_b_cone = cond_b_cone(problem, x_hat, &cond_a.lambda)?;
    let cond_c = cond_c(problem, x_hat)?;
    let efficiency = check_nemeth_efficiency(problem)?;

    Ok(EvpCertificate {
        x_hat,
        cond_b_metric: cond_b_metric(problem, x_hat),
        cond_a,
        cond_b_cone,
        cond_c,
        x0_efficient: efficiency.efficient,
        efficiency_violating: efficiency.violating,
        eta_trace: found.trace,
    })
}

/// Field-by-field outcome of re-checking a stored certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifyReport {
    pub consistent: bool,
    pub mismatches: Vec<String>,
}

/// Re-checks every stored conclusion against the instance, using the stored
/// witness weights instead of solving again.
pub fn certify(problem: &VectorProblem, cert: &EvpCertificate) -> Result<CertifyReport> {
    problem.validate()?;
    let mut mismatches = Vec::new();
    let x_hat = cert.x_hat;
    if x_hat >= problem.len() {
        return Ok(CertifyReport {
            consistent: false,
            mismatches: vec![format!("x_hat = {x_hat} out of range")],
        });
    }
    let x0 = problem.x0;
    let dist = problem.distance(x0, x_hat);
    let t = problem.gamma * dist;

    // (a) from the stored weights
    let a_holds = if cert.cond_a.holds {
        let lambda = &cert.cond_a.lambda;
        if !on_simplex(lambda) || lambda.len() != problem.directions.len() {
            mismatches.push("cond_a: witness weights are not on the simplex".into());
            false
        } else {
            let neg: Vec<f64> = problem.diff(x_hat, x0);
            // f(x0) - f(x̂) ∈ tH + D  <=>  f(x̂) - f(x0) ∈ (-t)H - D
            let ok = problem.cone.weights_satisfy(
                &problem.directions,
                -t,
                &neg,
                lambda,
                problem.cone.tol_feas(),
            );
            let h0 = problem.directions.combine(lambda);
            if h0 != cert.cond_a.h0 {
                mismatches.push("cond_a: stored h0 does not match the weights".into());
            }
            ok
        }
    } else {
        self::cond_a(problem, x_hat)?.holds
    };
    if a_holds != cert.cond_a.holds {
        mismatches.push(format!(
            "cond_a: stored {}, recomputed {a_holds}",
            cert.cond_a.holds
        ));
    }

    let b_metric = cond_b_metric(problem, x_hat);
    if b_metric.holds != cert.cond_b_metric.holds {
        mismatches.push(format!(
            "cond_b_metric: stored {}, recomputed {}",
            cert.cond_b_metric.holds, b_metric.holds
        ));
    }

    let b_cone = if cert.cond_a.holds {
        cond_b_cone(problem, x_hat, &cert.cond_a.lambda)?.holds
    } else {
        false
    };
    if b_cone != cert.cond_b_cone.holds {
        mismatches.push(format!(
            "cond_b_cone: stored {}, recomputed {b_cone}",
            cert.cond_b_cone.holds
        ));
    }

    let c = cond_c(problem, x_hat)?;
    if c.holds != cert.cond_c.holds {
        mismatches.push(format!(
            "cond_c: stored {}, recomputed {} (violating {:?})",
            cert.cond_c.holds, c.holds, c.violating
        ));
    }

    let eff = check_nemeth_efficiency(problem)?;
    if eff.efficient != cert.x0_efficient {
        mismatches.push(format!(
            "x0_efficient: stored {}, recomputed {}",
            cert.x0_efficient, eff.efficient
        ));
    }

    Ok(CertifyReport {
        consistent: mismatches.is_empty(),
        mismatches,
    })
}
