#![allow(dead_code)]

use evpkit::analysis::{random_cone, random_direction_set, random_interior_point};
use evpkit::{DirectionSet, PolyhedralCone};
use rand::Rng;

/// Cone, interior direction `k0` and a point `y ∈ [-10, 10]^m`.
pub fn cone_direction_point(rng: &mut impl Rng, m: usize) -> (PolyhedralCone, Vec<f64>, Vec<f64>) {
    loop {
        let cone = random_cone(rng, m);
        if let Some(k0) = random_interior_point(rng, &cone, 0.1, 1.0, 0.05, 10_000) {
            let y = random_point(rng, m, 10.0);
            return (cone, k0, y);
        }
    }
}

/// Cone, validated `H` with `k` vertices, and a point.
pub fn cone_polytope_point(
    rng: &mut impl Rng,
    m: usize,
    k: usize,
) -> (PolyhedralCone, DirectionSet, Vec<f64>) {
    loop {
        let cone = random_cone(rng, m);
        if let Some(h) = random_direction_set(rng, &cone, k) {
            let y = random_point(rng, m, 10.0);
            return (cone, h, y);
        }
    }
}

pub fn random_point(rng: &mut impl Rng, m: usize, r: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-r..r)).collect()
}

/// A point of `D` of moderate size.
pub fn random_cone_point(rng: &mut impl Rng, cone: &PolyhedralCone) -> Vec<f64> {
    let v = random_interior_point(rng, cone, 0.0, 1.0, 0.0, 100_000)
        .expect("cone with nonempty interior");
    let s = rng.gen_range(0.0..5.0);
    v.iter().map(|x| s * x).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Grid oracle for `k = 2`: `xi_H(y) = min over λ of xi_{h_λ}(y)`, where each
/// inner value is `inf{t : A(t·h_λ - y) >= 0}` found on a `t` grid and refined
/// by repeated zooming around the best cell.
pub fn grid_xi_two_vertices(rows: &[Vec<f64>], h1: &[f64], h2: &[f64], y: &[f64]) -> f64 {
    let inner = |lam: f64| -> f64 {
        let h: Vec<f64> = h1.iter().zip(h2).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let feasible = |t: f64| rows.iter().all(|a| t * dot(a, &h) - dot(a, y) >= 0.0);
        // t grid: coarse scan, then zoom on the first feasible cell.
        let (mut lo, mut hi) = (-1e4, 1e4);
        for _ in 0..8 {
            let n = 400;
            let w = (hi - lo) / n as f64;
            let first = (0..=n).map(|i| lo + i as f64 * w).find(|&t| feasible(t));
            match first {
                Some(t) => {
                    lo = t - w;
                    hi = t;
                }
                None => return f64::INFINITY,
            }
        }
        hi
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = f64::INFINITY;
    for _ in 0..6 {
        let n = 200;
        let w = (hi - lo) / n as f64;
        let mut arg = lo;
        for i in 0..=n {
            let lam = lo + i as f64 * w;
            let v = inner(lam);
            if v < best {
                best = v;
                arg = lam;
            }
        }
        lo = (arg - w).max(0.0);
        hi = (arg + w).min(1.0);
    }
    best
}
