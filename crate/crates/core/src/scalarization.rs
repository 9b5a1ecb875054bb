//! Gerstewitz scalarizations over polyhedral cones.
//!
//! `xi_k0(y) = inf{t : y ∈ t·k0 - D}` has a closed form over the halfspace
//! rows. The generalized `xi_H(y) = inf{t : y ∈ t·H - D}` is computed by
//! bracketing and bisecting the feasibility predicate, which is monotone in
//! `t` because `H ⊂ D`.

use serde::Serialize;

use crate::cone::{dot, validate_direction_set, DirectionSet, PolyhedralCone};
use crate::error::{check_dim, Error, Result};
use crate::ext_real::ExtReal;

pub const DEFAULT_TOL_BISECT: f64 = 1e-9;

/// Upward bracket cap, as a multiple of the starting scale.
const BRACKET_CAP: f64 = (1u64 << 40) as f64;

/// Closed-form Gerstewitz function for a single direction `k0`.
#[derive(Debug, Clone)]
pub struct Gerstewitz<'a> {
    cone: &'a PolyhedralCone,
    k0: &'a [f64],
}

impl<'a> Gerstewitz<'a> {
    pub fn new(cone: &'a PolyhedralCone, k0: &'a [f64]) -> Result<Self> {
        check_dim(cone.dim(), k0.len())?;
        cone.check_direction(k0)?;
        Ok(Gerstewitz { cone, k0 })
    }

    pub fn eval(&self, y: &[f64]) -> Result<ExtReal> {
        check_dim(self.cone.dim(), y.len())?;
        let tol = self.cone.tol_feas();
        let mut best = f64::NEG_INFINITY;
        for a in self.cone.rows() {
            let c = dot(a, self.k0);
            let v = dot(a, y);
            if c > tol {
                best = best.max(v / c);
            } else if v > tol {
                // t·<a,k0> >= <a,y> cannot hold for any t on a row k0 does not move.
                return Ok(ExtReal::PlusInf);
            }
        }
        Ok(ExtReal::Finite(best))
    }
}

pub fn xi_k0(cone: &PolyhedralCone, k0: &[f64], y: &[f64]) -> Result<ExtReal> {
    Gerstewitz::new(cone, k0)?.eval(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketStep {
    pub t: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarizationResult {
    pub value: ExtReal,
    /// Smallest feasible `t` found; within the bisection width of `value`.
    pub witness_t: Option<f64>,
    pub witness_lambda: Option<Vec<f64>>,
    #[serde(skip)]
    pub trace: Vec<BracketStep>,
}

/// Generalized Gerstewitz function for a validated polytope `H`.
#[derive(Debug, Clone)]
pub struct GeneralizedGerstewitz<'a> {
    cone: &'a PolyhedralCone,
    directions: &'a DirectionSet,
}

impl<'a> GeneralizedGerstewitz<'a> {
    pub fn new(cone: &'a PolyhedralCone, directions: &'a DirectionSet) -> Result<Self> {
        let report = validate_direction_set(cone, directions)?;
        if !report.inside_cone {
            return Err(Error::Precondition("H is not contained in D".into()));
        }
        if !report.separated_from_origin {
            return Err(Error::Precondition("0 in H+D".into()));
        }
        Ok(Self::new_unchecked(cone, directions))
    }

    /// Skips the direction-set validation; the caller has already run it.
    pub(crate) fn new_unchecked(cone: &'a PolyhedralCone, directions: &'a DirectionSet) -> Self {
        GeneralizedGerstewitz { cone, directions }
    }

    /// Feasibility predicate used while bisecting. Runs with zero residual
    /// tolerance so the located threshold is not shifted by `tol_feas`.
    fn probe(&self, t: f64, y: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(self
            .cone
            .member_scaled_with_tol(self.directions, t, y, 0.0)?
            .lambda)
    }

    pub fn eval(&self, y: &[f64], tol_bisect: f64) -> Result<ScalarizationResult> {
        check_dim(self.cone.dim(), y.len())?;
        if !(tol_bisect > 0.0) {
            return Err(Error::Precondition(format!(
                "tol_bisect must be positive, got {tol_bisect}"
            )));
        }
        let scale = y.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let cap = BRACKET_CAP * scale;
        let mut trace = Vec::new();
        let step = |t: f64, trace: &mut Vec<BracketStep>| -> Result<Option<Vec<f64>>> {
            let r = self.probe(t, y)?;
            trace.push(BracketStep {
                t,
                feasible: r.is_some(),
            });
            Ok(r)
        };

        let mut hi = scale;
        let mut lo;
        let mut witness;
        match step(hi, &mut trace)? {
            Some(l) => {
                witness = l;
                lo = -scale;
                while let Some(l) = step(lo, &mut trace)? {
                    hi = lo;
                    witness = l;
                    lo *= 2.0;
                    if lo.abs() > cap {
                        return Err(Error::SeparationBelowResolution { t: lo });
                    }
                }
            }
            None => loop {
                lo = hi;
                hi *= 2.0;
                if hi > cap {
                    return Ok(ScalarizationResult {
                        value: ExtReal::PlusInf,
                        witness_t: None,
                        witness_lambda: None,
                        trace,
                    });
                }
                if let Some(l) = step(hi, &mut trace)? {
                    witness = l;
                    break;
                }
            },
        }

        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol_bisect * (1.0 + mid.abs()) || mid <= lo || mid >= hi {
                break;
            }
            match step(mid, &mut trace)? {
                Some(l) => {
                    hi = mid;
                    witness = l;
                }
                None => lo = mid,
            }
        }

        Ok(ScalarizationResult {
            value: ExtReal::Finite(0.5 * (lo + hi)),
            witness_t: Some(hi),
            witness_lambda: Some(witness),
            trace,
        })
    }
}

pub fn xi_h(
    cone: &PolyhedralCone,
    directions: &DirectionSet,
    y: &[f64],
    tol_bisect: f64,
) -> Result<ScalarizationResult> {
    GeneralizedGerstewitz::new(cone, directions)?.eval(y, tol_bisect)
}

/// True when `xi_H` can take the value `-inf`, i.e. when `0 ∈ H + D`.
pub fn xi_h_minus_inf_possible(cone: &PolyhedralCone, directions: &DirectionSet) -> Result<bool> {
    check_dim(cone.dim(), directions.dim())?;
    let zero = vec![0.0; cone.dim()];
    Ok(cone.member_scaled(directions, -1.0, &zero)?.inside)
}
