use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballsystem::BallSystem;
use crate::error::{invalid, Error, Result};
use crate::geometry::{NormKind, Point};
use crate::metrics::dist_to_set;

/// The unspecified constants `K_1`, `K_2` of the winning-dimension theorem.
/// The default of 1 is a placeholder, not a known value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfsConstants {
    pub k1: f64,
    pub k2: f64,
}

impl Default for BfsConstants {
    fn default() -> Self {
        BfsConstants { k1: 1.0, k2: 1.0 }
    }
}

impl BfsConstants {
    pub fn new(k1: f64, k2: f64) -> Result<BfsConstants> {
        if !(k1 > 0.0 && k2 > 0.0 && k1.is_finite() && k2.is_finite()) {
            return Err(invalid(format!("K1, K2 must be positive, got {k1}, {k2}")));
        }
        Ok(BfsConstants { k1, k2 })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WinningDimBound {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub d: usize,
    pub constants: BfsConstants,
    /// `α^c`.
    pub lhs: f64,
    /// `(1 - β^{1-c}) / K_2`.
    pub rhs: f64,
    pub condition_met: bool,
    /// `d - K_1 α / |log β|`, present only when the condition holds.
    pub bound: Option<f64>,
}

/// Lower bound on `dim_H(S ∩ B)` for an `(α, β, c, ρ, H_M)`-winning set `S`.
pub fn winning_dim_bound(alpha: f64, beta: f64, c: f64, d: usize, k: BfsConstants) -> Result<WinningDimBound> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0 && beta <= 0.25) {
        return Err(invalid(format!("beta must lie in (0, 1/4], got {beta}")));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(invalid(format!("c must lie in (0,1), got {c}")));
    }
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let lhs = alpha.powf(c);
    let rhs = (1.0 - beta.powf(1.0 - c)) / k.k2;
    let condition_met = lhs <= rhs;
    let bound = condition_met.then(|| d as f64 - k.k1 * alpha / beta.ln().abs());
    Ok(WinningDimBound { alpha, beta, c, d, constants: k, lhs, rhs, condition_met, bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionDimBound {
    pub c0: f64,
    pub beta0: f64,
    /// `Σ τ_i^{-c0}`.
    pub sum: f64,
    /// `(1 - β0^{1-c0}) / K_2`.
    pub threshold: f64,
    pub condition_met: bool,
    /// `d - K_1 Σ^{1/c0} / (β0 |log β0|)`, present only when the condition holds.
    pub bound: Option<f64>,
    pub constants: BfsConstants,
}

/// Lower bound on `dim_H(B ∩ ⋂ C_i)` for sets of thickness `τ_i` with
/// systems of balls rooted at radius `big_r`.
pub fn intersection_dim_bound(
    taus: &[f64],
    c0: f64,
    big_r: f64,
    ball_radius: f64,
    sup_ratio: f64,
    d: usize,
    k: BfsConstants,
) -> Result<IntersectionDimBound> {
    if taus.is_empty() || taus.iter().any(|t| !(*t > 0.0)) {
        return Err(invalid("thickness list must be nonempty and positive"));
    }
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(invalid(format!("c0 must lie in (0,1), got {c0}")));
    }
    if !(big_r > 0.0 && ball_radius > 0.0) || d == 0 {
        return Err(invalid("radii and dimension must be positive"));
    }
    let beta0 = (ball_radius / big_r).min(0.25);
    if !(sup_ratio > 0.0 && sup_ratio <= beta0) {
        return Err(Error::Hypothesis(format!("sup r_(n+1)/r_n = {sup_ratio} exceeds beta0 = {beta0}")));
    }
    let sum: f64 = taus.iter().map(|t| t.powf(-c0)).sum();
    let threshold = (1.0 - beta0.powf(1.0 - c0)) / k.k2;
    let condition_met = sum <= threshold;
    let bound = condition_met.then(|| d as f64 - k.k1 * sum.powf(1.0 / c0) / (beta0 * beta0.ln().abs()));
    Ok(IntersectionDimBound { c0, beta0, sum, threshold, condition_met, bound, constants: k })
}

/// Scans `c0 = i/(grid+1)` and keeps the largest certified bound.
pub fn best_intersection_bound(
    taus: &[f64],
    big_r: f64,
    ball_radius: f64,
    sup_ratio: f64,
    d: usize,
    k: BfsConstants,
    grid: usize,
) -> Result<Option<IntersectionDimBound>> {
    let mut best: Option<IntersectionDimBound> = None;
    for i in 1..=grid.max(1) {
        let c0 = i as f64 / (grid.max(1) + 1) as f64;
        let b = intersection_dim_bound(taus, c0, big_r, ball_radius, sup_ratio, d, k)?;
        if b.bound > best.as_ref().and_then(|x| x.bound) {
            best = Some(b);
        }
    }
    Ok(best)
}

/// `N(τ) = ⌊3/(4 e K_2) · τ / log τ⌋`.
pub fn pattern_capacity(tau: f64, k: BfsConstants) -> Result<u64> {
    if !(tau > std::f64::consts::E && tau.is_finite()) {
        return Err(invalid(format!("tau must exceed e, got {tau}")));
    }
    Ok((3.0 / (4.0 * std::f64::consts::E * k.k2) * tau / tau.ln()).floor() as u64)
}

/// Whether `N` copies of `τ` satisfy the intersection condition at
/// `c = 1 - 1/log τ` and `β0 = 1/4`.
pub fn pattern_condition_holds(tau: f64, n: u64, k: BfsConstants) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    if !(tau > std::f64::consts::E) {
        return Err(invalid(format!("tau must exceed e, got {tau}")));
    }
    let c = 1.0 - 1.0 / tau.ln();
    let b = intersection_dim_bound(&[tau], c, 1.0, 0.25, 0.25, 1, k)?;
    Ok(n as f64 * b.sum <= b.threshold)
}

fn diameter(a: &[Point], norm: NormKind) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in a.iter().enumerate() {
        for q in &a[i + 1..] {
            d = d.max(norm.dist(&p.0, &q.0));
        }
    }
    d
}

/// Endpoint `3 rad(S_∅) / (4 diam A)` of the admissible scales.
pub fn lambda_max(root_radius: f64, a: &[Point], norm: NormKind) -> Result<f64> {
    if a.is_empty() {
        return Err(invalid("pattern must be nonempty"));
    }
    if let Some(p) = a.iter().find(|p| p.dim() != a[0].dim()) {
        return Err(Error::DimensionMismatch { expected: a[0].dim(), found: p.dim() });
    }
    let diam = diameter(a, norm);
    Ok(if diam == 0.0 { f64::INFINITY } else { 0.75 * root_radius / diam })
}

/// A pattern `A` and a scale `λ` admissible for a root of radius `root_radius`.
#[derive(Clone, Debug, Serialize)]
pub struct PatternQuery {
    pub a: Vec<Point>,
    pub lambda: f64,
    pub root_radius: f64,
}

impl PatternQuery {
    pub fn new(a: Vec<Point>, lambda: f64, root_radius: f64, norm: NormKind) -> Result<PatternQuery> {
        let max = lambda_max(root_radius, &a, norm)?;
        if !(lambda > 0.0 && lambda < max) {
            return Err(invalid(format!("lambda = {lambda} outside (0, {max})")));
        }
        Ok(PatternQuery { a, lambda, root_radius })
    }
}

const MAX_GRID_POINTS: usize = 20_000_000;

/// Grid points `x` over the root's bounding cube with
/// `dist(x + λ b, C) ≤ tol` for every `b ∈ A`, each distance certified by an
/// enclosure of width `tol/10`.
pub fn pattern_search_oracle(
    sys: &BallSystem,
    a: &[Point],
    lambda: f64,
    grid_step: f64,
    tol: f64,
) -> Result<Vec<Point>> {
    let root = sys.root_ball();
    PatternQuery::new(a.to_vec(), lambda, root.radius, sys.norm())?;
    if a[0].dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: a[0].dim() });
    }
    if !(grid_step > 0.0 && tol > 0.0) {
        return Err(invalid("grid step and tolerance must be positive"));
    }
    let d = sys.dim();
    let per_axis = (2.0 * root.radius / grid_step).floor() as usize + 1;
    let total = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(per_axis)).filter(|&t| t <= MAX_GRID_POINTS);
    let total = total.ok_or_else(|| invalid(format!("grid with {per_axis} points per axis is too fine")))?;
    let hits: Vec<Option<Point>> = (0..total)
        .into_par_iter()
        .map(|mut idx| -> Result<Option<Point>> {
            let mut x = Vec::with_capacity(d);
            for j in 0..d {
                x.push(root.center.0[j] - root.radius + (idx % per_axis) as f64 * grid_step);
                idx /= per_axis;
            }
            let x = Point(x);
            for b in a {
                let y = x.add_scaled(lambda, b);
                if dist_to_set(&y, sys, 0.1 * tol)?.hi > tol {
                    return Ok(None);
                }
            }
            Ok(Some(x))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}
