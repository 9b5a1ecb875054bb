//! Minimal-point search on finite partially ordered sets.
//!
//! Starting from `x0`, the engine repeatedly hops to the exact minimizer of a
//! monotone functional `eta` over the strict section below the current point
//! and stops once the section is a singleton. On a finite ground set every
//! strictly descending chain is finite, so the loop always ends at a point
//! `x̂ ⪯ x0` with `S(x̂) = {x̂}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;

/// Largest size for which the order axioms are verified exhaustively.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 300;

/// A finite partial order stored as a dense relation matrix.
/// `precedes(i, j)` means `i ⪯ j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    n: usize,
    rel: Vec<bool>,
}

impl FinitePoset {
    pub fn from_matrix(matrix: Vec<Vec<bool>>) -> Result<Self> {
        let n = matrix.len();
        let mut rel = Vec::with_capacity(n * n);
        for (i, row) in matrix.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPoset(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            rel.extend(row);
        }
        let poset = FinitePoset { n, rel };
        poset.verify()?;
        Ok(poset)
    }

    pub fn from_fn(n: usize, mut precedes: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let poset = Self::from_fn_unchecked(n, &mut precedes);
        poset.verify()?;
        Ok(poset)
    }

    pub(crate) fn from_fn_unchecked(n: usize, mut precedes: impl FnMut(usize, usize) -> bool) -> Self {
        let mut rel = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                rel.push(precedes(i, j));
            }
        }
        FinitePoset { n, rel }
    }

    /// Reflexivity and antisymmetry are always checked; transitivity only up
    /// to [`EXHAUSTIVE_CHECK_LIMIT`] points.
    fn verify(&self) -> Result<()> {
        self.check_reflexive()?;
        self.check_antisymmetric()?;
        if self.n <= EXHAUSTIVE_CHECK_LIMIT {
            self.check_transitive()?;
        }
        Ok(())
    }

    pub(crate) fn check_reflexive(&self) -> Result<()> {
        match (0..self.n).find(|&i| !self.precedes(i, i)) {
            Some(i) => Err(Error::InvalidPoset(format!("not reflexive at {i}"))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_antisymmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.precedes(i, j) && self.precedes(j, i) {
                    return Err(Error::Antisymmetry(i, j));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_transitive(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j || !self.precedes(i, j) {
                    continue;
                }
                let row_j = &self.rel[j * self.n..(j + 1) * self.n];
                let row_i = &self.rel[i * self.n..(i + 1) * self.n];
                if let Some(k) = (0..self.n).find(|&k| row_j[k] && !row_i[k]) {
                    return Err(Error::InvalidPoset(format!(
                        "not transitive: {i} ⪯ {j} ⪯ {k} but not {i} ⪯ {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.rel[i * self.n + j]
    }

    /// `S(i) = {j : j ⪯ i}`, in increasing index order.
    pub fn section(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.precedes(j, i)).collect()
    }

    pub fn is_minimal(&self, i: usize) -> bool {
        (0..self.n).all(|j| j == i || !self.precedes(j, i))
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        self.rel.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }
}

/// Values `eta(x_i)` checked to be monotone along the order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFunctional {
    values: Vec<ExtReal>,
}

impl MonotoneFunctional {
    pub fn new(poset: &FinitePoset, values: Vec<ExtReal>) -> Result<Self> {
        Self::with_slack(poset, values, 0.0)
    }

    /// Accepts `i ⪯ j` with `eta(i) <= eta(j) + slack`, for values that come
    /// out of a numerical scalarization.
    pub fn with_slack(poset: &FinitePoset, values: Vec<ExtReal>, slack: f64) -> Result<Self> {
        if values.len() != poset.len() {
            return Err(Error::InvalidPoset(format!(
                "{} values for {} points",
                values.len(),
                poset.len()
            )));
        }
        for i in 0..poset.len() {
            for j in 0..poset.len() {
                if i != j && poset.precedes(i, j) && !le_with_slack(values[i], values[j], slack) {
                    return Err(Error::NonMonotone { lower: i, upper: j });
                }
            }
        }
        Ok(MonotoneFunctional { values })
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn get(&self, i: usize) -> ExtReal {
        self.values[i]
    }
}

fn le_with_slack(a: ExtReal, b: ExtReal, slack: f64) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => x <= y + slack,
        _ => a <= b,
    }
}

fn section_min(poset: &FinitePoset, eta: &MonotoneFunctional, x: usize) -> Option<ExtReal> {
    poset
        .section(x)
        .into_iter()
        .map(|j| eta.get(j))
        .fold(None, |acc, v| match acc {
            Some(m) if m <= v => Some(m),
            _ => Some(v),
        })
}

/// The infimum of `eta` over `S(x0)` is finite.
pub fn check_condition_a(poset: &FinitePoset, eta: &MonotoneFunctional, x0: usize) -> bool {
    matches!(section_min(poset, eta, x0), Some(ExtReal::Finite(_)))
}

/// For every `x ∈ S(x0) \ {x0}` with finite `eta(x)` and every
/// `x' ∈ S(x) \ {x}`, `eta(x) > eta(x')`.
pub fn check_condition_b(poset: &FinitePoset, eta: &MonotoneFunctional, x0: usize) -> bool {
    poset
        .section(x0)
        .into_iter()
        .filter(|&x| x != x0 && eta.get(x).is_finite())
        .all(|x| {
            poset
                .section(x)
                .into_iter()
                .filter(|&xp| xp != x)
                .all(|xp| eta.get(x) > eta.get(xp))
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub eta: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalPoint {
    pub x_hat: usize,
    /// Visited points, starting with `x0` and ending with `x_hat`.
    pub trace: Vec<TraceEntry>,
}

pub fn minimal_point(
    poset: &FinitePoset,
    eta: &MonotoneFunctional,
    x0: usize,
) -> Result<MinimalPoint> {
    if x0 >= poset.len() {
        return Err(Error::Precondition(format!(
            "start point {x0} out of range for {} points",
            poset.len()
        )));
    }
    if !check_condition_a(poset, eta, x0) {
        return Err(Error::ConditionA { x0 });
    }
    let mut current = x0;
    let mut trace = vec![TraceEntry {
        index: x0,
        eta: eta.get(x0),
    }];
    for _ in 0..=poset.len() {
        // Exact argmin over S(current) \ {current}; lowest index wins ties.
        let next = poset
            .section(current)
            .into_iter()
            .filter(|&j| j != current)
            .fold(None::<usize>, |best, j| match best {
                Some(b) if eta.get(b) <= eta.get(j) => Some(b),
                _ => Some(j),
            });
        let Some(next) = next else {
            if !poset.precedes(current, x0) {
                return Err(Error::Invariant(format!(
                    "selected point {current} left the section of {x0}"
                )));
            }
            return Ok(MinimalPoint {
                x_hat: current,
                trace,
            });
        };
        current = next;
        trace.push(TraceEntry {
            index: current,
            eta: eta.get(current),
        });
    }
    Err(Error::Invariant(format!(
        "selection loop exceeded {} hops",
        poset.len() + 1
    )))
}

/// Every `j ⪯ x0` whose section is `{j}`.
pub fn brute_force_minimals(poset: &FinitePoset, x0: usize) -> BTreeSet<usize> {
    (0..poset.len())
        .filter(|&j| poset.precedes(j, x0) && poset.is_minimal(j))
        .collect()
}
