//! Polyhedral ordering cones `D = {y : Ay >= 0}` and polytope direction sets
//! `H = conv{h_1, .., h_k}`, with exact linear membership tests.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::lp::{Feasibility, FeasibilitySystem, Relation};

/// Absolute tolerance applied to every halfspace residual.
pub const DEFAULT_TOL_FEAS: f64 = 1e-9;

const RANK_TOL: f64 = 1e-10;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordering cone in halfspace form.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    rows: Vec<Vec<f64>>,
    dim: usize,
    tol_feas: f64,
}

impl PolyhedralCone {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(rows, DEFAULT_TOL_FEAS)
    }

    pub fn with_tolerance(rows: Vec<Vec<f64>>, tol_feas: f64) -> Result<Self> {
        if !(tol_feas >= 0.0 && tol_feas.is_finite()) {
            return Err(Error::InvalidCone(format!("bad tolerance {tol_feas}")));
        }
        let Some(first) = rows.first() else {
            return Err(Error::InvalidCone("no halfspace rows (D = Y)".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidCone("zero-dimensional space".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            check_dim(dim, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCone(format!("row {i} has a non-finite entry")));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidCone(format!("row {i} is zero")));
            }
        }
        let cone = PolyhedralCone {
            rows,
            dim,
            tol_feas,
        };
        if !cone.has_nonzero_point()? {
            return Err(Error::InvalidCone("the cone is {0}".into()));
        }
        Ok(cone)
    }

    /// The nonnegative orthant of `R^m`.
    pub fn orthant(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| {
                let mut r = vec![0.0; m];
                r[i] = 1.0;
                r
            })
            .collect();
        PolyhedralCone {
            rows,
            dim: m,
            tol_feas: DEFAULT_TOL_FEAS,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn tol_feas(&self) -> f64 {
        self.tol_feas
    }

    pub fn set_tol_feas(&mut self, tol: f64) {
        self.tol_feas = tol;
    }

    /// `y ∈ D`, each residual allowed to dip to `-tol_feas`.
    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        check_dim(self.dim, y.len())?;
        Ok(self.rows.iter().all(|a| dot(a, y) >= -self.tol_feas))
    }

    /// `D ∩ -D = {0}`, i.e. `A` has full column rank.
    pub fn is_pointed(&self) -> bool {
        matrix_rank(&self.rows) == self.dim
    }

    fn has_nonzero_point(&self) -> Result<bool> {
        if !self.is_pointed() {
            // A nonzero kernel vector lies in D ∩ -D.
            return Ok(true);
        }
        // Full rank: D != {0} iff some y has Ay >= 0 and 1ᵀAy = 1.
        // Free y is split as u - v.
        let m = self.dim;
        let mut sys = FeasibilitySystem::new(2 * m);
        let mut total = vec![0.0; 2 * m];
        for a in &self.rows {
            let mut c = Vec::with_capacity(2 * m);
            c.extend_from_slice(a);
            c.extend(a.iter().map(|v| -v));
            for (t, v) in total.iter_mut().zip(&c) {
                *t += v;
            }
            sys.push(c, Relation::Ge, 0.0);
        }
        sys.push(total, Relation::Eq, 1.0);
        Ok(sys.solve()?.is_feasible())
    }

    /// `xi ∈ D⁺`: by Farkas, `xi = Aᵀμ` for some `μ >= 0`.
    pub fn dual_contains(&self, xi: &[f64]) -> Result<bool> {
        check_dim(self.dim, xi.len())?;
        let mut sys = FeasibilitySystem::new(self.rows.len());
        for (j, &target) in xi.iter().enumerate() {
            let coeffs = self.rows.iter().map(|a| a[j]).collect();
            sys.push(coeffs, Relation::Eq, target);
        }
        Ok(sys.solve()?.is_feasible())
    }

    /// `y ∈ (0, +∞)·k0 + D`.
    pub fn member_vint(&self, k0: &[f64], y: &[f64]) -> Result<bool> {
        check_dim(self.dim, k0.len())?;
        check_dim(self.dim, y.len())?;
        self.check_direction(k0)?;
        let mut bound = f64::INFINITY;
        for a in &self.rows {
            let c = dot(a, k0);
            let v = dot(a, y);
            if c > self.tol_feas {
                bound = bound.min(v / c);
            } else if v < -self.tol_feas {
                return Ok(false);
            }
        }
        Ok(bound > 0.0)
    }

    /// Requires `k0 ∈ D` and `k0 ∉ -D` (some row strictly positive).
    pub(crate) fn check_direction(&self, k0: &[f64]) -> Result<()> {
        if !self.contains(k0)? {
            return Err(Error::Precondition("k0 is not in D".into()));
        }
        if !self.rows.iter().any(|a| dot(a, k0) > self.tol_feas) {
            return Err(Error::Precondition("k0 lies in -D".into()));
        }
        Ok(())
    }

    /// `y ∈ t·H - D`, deciding over the simplex of vertex weights.
    pub fn member_scaled(&self, h: &DirectionSet, t: f64, y: &[f64]) -> Result<Membership> {
        self.member_scaled_with_tol(h, t, y, self.tol_feas)
    }

    /// `v ∈ t·H + D`, the same test after negating both `t` and `v`.
    pub fn member_shifted(&self, h: &DirectionSet, t: f64, v: &[f64]) -> Result<Membership> {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        self.member_scaled(h, -t, &neg)
    }

    pub(crate) fn member_scaled_with_tol(
        &self,
        h: &DirectionSet,
        t: f64,
        y: &[f64],
        tol: f64,
    ) -> Result<Membership> {
        check_dim(self.dim, y.len())?;
        check_dim(self.dim, h.dim())?;
        let k = h.len();
        // Row i: sum_j t<a_i,h_j> λ_j >= <a_i,y> - tol, with sum λ = 1.
        let mut sys = FeasibilitySystem::new(k);
        for a in &self.rows {
            let coeffs = h.vertices().iter().map(|v| t * dot(a, v)).collect();
            sys.push(coeffs, Relation::Ge, dot(a, y) - tol);
        }
        sys.push(vec![1.0; k], Relation::Eq, 1.0);
        match sys.solve()? {
            Feasibility::Infeasible { .. } => Ok(Membership::outside()),
            Feasibility::Feasible(x) => {
                let lambda = normalize_weights(x);
                if !self.weights_satisfy(h, t, y, &lambda, tol) {
                    return Err(Error::IllConditioned(format!(
                        "witness weights fail the residual re-check at t = {t}"
                    )));
                }
                Ok(Membership::inside(lambda))
            }
        }
    }

    /// Closed-form interval decision over the weight of the first vertex.
    /// Only defined for `k <= 2`; used to cross-check the simplex route.
    pub fn member_scaled_interval(
        &self,
        h: &DirectionSet,
        t: f64,
        y: &[f64],
    ) -> Result<Membership> {
        check_dim(self.dim, y.len())?;
        check_dim(self.dim, h.dim())?;
        let tol = self.tol_feas;
        let verts = h.vertices();
        match verts.len() {
            1 => {
                let ok = self
                    .rows
                    .iter()
                    .all(|a| t * dot(a, &verts[0]) - dot(a, y) >= -tol);
                Ok(if ok {
                    Membership::inside(vec![1.0])
                } else {
                    Membership::outside()
                })
            }
            2 => {
                // λ·t<a,h1-h2> >= <a,y> - tol - t<a,h2>
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for a in &self.rows {
                    let a1 = dot(a, &verts[0]);
                    let a2 = dot(a, &verts[1]);
                    let c = t * (a1 - a2);
                    let e = dot(a, y) - tol - t * a2;
                    if c > 0.0 {
                        lo = lo.max(e / c);
                    } else if c < 0.0 {
                        hi = hi.min(e / c);
                    } else if e > 0.0 {
                        return Ok(Membership::outside());
                    }
                }
                if lo <= hi {
                    let l = 0.5 * (lo + hi);
                    Ok(Membership::inside(vec![l, 1.0 - l]))
                } else {
                    Ok(Membership::outside())
                }
            }
            k => Err(Error::Precondition(format!(
                "interval route needs at most 2 vertices, got {k}"
            ))),
        }
    }

    /// Residual re-check of a weight vector; shared by solver and certifier.
    pub fn weights_satisfy(
        &self,
        h: &DirectionSet,
        t: f64,
        y: &[f64],
        lambda: &[f64],
        tol: f64,
    ) -> bool {
        if !on_simplex(lambda) || lambda.len() != h.len() {
            return false;
        }
        let point = h.combine(lambda);
        self.rows.iter().all(|a| {
            let ay = dot(a, y);
            t * dot(a, &point) - ay >= -tol - row_slack(a, h, t, ay)
        })
    }
}

/// Rounding allowance for one row, relative to the largest term in it. The
/// feasibility routine accepts at `1e-12` in equilibrated units.
fn row_slack(a: &[f64], h: &DirectionSet, t: f64, ay: f64) -> f64 {
    let mag = h
        .vertices()
        .iter()
        .fold(ay.abs().max(1.0), |m, v| m.max((t * dot(a, v)).abs()));
    1e-11 * mag
}

fn normalize_weights(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        for v in x.iter_mut() {
            *v /= s;
        }
    }
    x
}

/// Nonnegative weights summing to one within `1e-9`.
pub fn on_simplex(lambda: &[f64]) -> bool {
    !lambda.is_empty()
        && lambda.iter().all(|v| v.is_finite() && *v >= 0.0)
        && (lambda.iter().sum::<f64>() - 1.0).abs() <= 1e-9
}

/// Outcome of a membership test, with the simplex weights when it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub lambda: Option<Vec<f64>>,
}

impl Membership {
    fn inside(lambda: Vec<f64>) -> Self {
        Membership {
            inside: true,
            lambda: Some(lambda),
        }
    }

    fn outside() -> Self {
        Membership {
            inside: false,
            lambda: None,
        }
    }
}

/// Polytope `H = conv{h_1, .., h_k}`; duplicate vertices are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    vertices: Vec<Vec<f64>>,
}

impl DirectionSet {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidDirectionSet("no vertices".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidDirectionSet("zero-dimensional vertex".into()));
        }
        let mut uniq: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            check_dim(dim, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidDirectionSet("non-finite vertex".into()));
            }
            if !uniq.contains(&v) {
                uniq.push(v);
            }
        }
        Ok(DirectionSet { vertices: uniq })
    }

    pub fn singleton(k0: Vec<f64>) -> Result<Self> {
        Self::new(vec![k0])
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn combine(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (w, v) in lambda.iter().zip(&self.vertices) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> DirectionSet {
        DirectionSet {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| c * x).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DirectionReport {
    pub inside_cone: bool,
    pub separated_from_origin: bool,
    pub cone_pointed: bool,
}

impl DirectionReport {
    /// Pointedness is informational and not required.
    pub fn passes(&self) -> bool {
        self.inside_cone && self.separated_from_origin
    }
}

pub fn validate_direction_set(cone: &PolyhedralCone, h: &DirectionSet) -> Result<DirectionReport> {
    check_dim(cone.dim(), h.dim())?;
    let mut inside_cone = true;
    for v in h.vertices() {
        inside_cone &= cone.contains(v)?;
    }
    // 0 ∈ H + D  iff  0 ∈ (-1)·H - D
    let zero = vec![0.0; cone.dim()];
    let separated_from_origin = !cone.member_scaled(h, -1.0, &zero)?.inside;
    Ok(DirectionReport {
        inside_cone,
        separated_from_origin,
        cone_pointed: cone.is_pointed(),
    })
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn matrix_rank(rows: &[Vec<f64>]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let cols = first.len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = RANK_TOL * scale;
    let mut rank = 0;
    for c in 0..cols {
        if rank == m.len() {
            break;
        }
        let (best, val) = (rank..m.len())
            .map(|r| (r, m[r][c].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        m.swap(rank, best);
        for r in rank + 1..m.len() {
            let f = m[r][c] / m[rank][c];
            if f != 0.0 {
                for cc in c..cols {
                    m[r][cc] -= f * m[rank][cc];
                }
            }
        }
        rank += 1;
    }
    rank
}
