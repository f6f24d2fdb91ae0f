//! Closed forms for corner self-similar sets, the comparison with Biebler's
//! thickness, bounds for self-homothetic attractors and robustness under
//! `C¹` perturbations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::ballsystem::{BallSystem, CornerFamilyParams, HomotheticIFS};
use crate::error::{invalid, Result};
use crate::geometry::{IntervalBound, NormKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CornerStats {
    pub n: u32,
    pub ell: f64,
    pub d: usize,
    /// Gap between neighbouring cubes relative to the parent radius.
    pub g: f64,
    pub tau: f64,
    /// Smallest `r` for which the set is r-uniformly dense.
    pub r_dense: f64,
}

pub fn corner_stats(n: u32, ell: f64, d: usize) -> Result<CornerStats> {
    let p = CornerFamilyParams::new(n, ell, d)?;
    let g = p.gap();
    Ok(CornerStats { n, ell, d, g, tau: ell / g, r_dense: ell + g / 2.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BieblerComparison {
    pub tau_b: f64,
    /// `τ / τ_B = 2^{5/4} / √g`.
    pub ratio: f64,
    /// `2^{3/4} √(n-1)`, a lower bound for `ratio`.
    pub ratio_floor: f64,
}

/// Biebler's thickness of the planar corner set and its ratio to ours.
pub fn biebler_thickness(n: u32, ell: f64) -> Result<BieblerComparison> {
    let g = CornerFamilyParams::new(n, ell, 2)?.gap();
    let tau_b = (ell / 2.0) / (2f64.sqrt() * g).sqrt();
    Ok(BieblerComparison {
        tau_b,
        ratio: 2f64.powf(1.25) / g.sqrt(),
        ratio_floor: 2f64.powf(0.75) * ((n - 1) as f64).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotheticBounds {
    pub h0_upper: IntervalBound,
    /// `min_j λ_j / h0_upper.hi`
    pub tau_lower: f64,
    /// `2 max_i λ_i + h0_upper.hi`
    pub dense_radius: f64,
}

struct Cell {
    c: Vec<f64>,
    w: Vec<f64>,
    ub: f64,
}

impl Cell {
    fn corner_cmp(&self, other: &Cell) -> Ordering {
        for ((a, wa), (b, wb)) in self.c.iter().zip(&self.w).zip(other.c.iter().zip(&other.w)) {
            match (b - wb).total_cmp(&(a - wa)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub).then_with(|| self.corner_cmp(other))
    }
}

struct Objective<'a> {
    ifs: &'a HomotheticIFS,
    norm: NormKind,
}

impl Objective<'_> {
    /// `min_i (dist(x, t_i) - λ_i) / (1 - λ_i)` at a point.
    fn at(&self, x: &[f64]) -> f64 {
        self.ifs
            .maps
            .iter()
            .map(|(l, t)| (self.norm.dist(x, &t.0) - l) / (1.0 - l))
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound of the objective over a box.
    fn upper(&self, c: &[f64], w: &[f64], cutoff: f64) -> f64 {
        let mut best = cutoff;
        for (l, t) in &self.ifs.maps {
            let v = (self.norm.farthest_in_box(c, w, &t.0) - l) / (1.0 - l);
            if v < best {
                best = v;
            }
        }
        best
    }

    /// The box meets `S_∅` and is not swallowed by one child.
    fn meets_region(&self, c: &[f64], w: &[f64]) -> bool {
        self.norm.dist_to_box(c, w, &vec![0.0; c.len()]) <= 1.0
            && !self.ifs.maps.iter().any(|(l, t)| self.norm.farthest_in_box(c, w, &t.0) < *l)
    }

    fn in_region(&self, x: &[f64]) -> bool {
        self.norm.of(x) <= 1.0 && self.ifs.maps.iter().all(|(l, t)| self.norm.dist(x, &t.0) >= *l)
    }

    fn halves(c: &[f64], w: &[f64], k: usize) -> [(Vec<f64>, Vec<f64>); 2] {
        let mut out = [(c.to_vec(), w.to_vec()), (c.to_vec(), w.to_vec())];
        for (s, (cc, ww)) in [-0.5, 0.5].iter().zip(out.iter_mut()) {
            ww[k] *= 0.5;
            cc[k] += s * w[k];
        }
        out
    }

    fn split_axis(&self, cell: &Cell) -> usize {
        let d = cell.c.len();
        let longest = (0..d).fold(0, |b, k| if cell.w[k] > cell.w[b] { k } else { b });
        if self.norm != NormKind::Linf || d == 1 {
            return longest;
        }
        // maxima sit on segments in the sup norm; cut across them
        let mut best = (f64::INFINITY, 0.0, longest);
        for k in 0..d {
            let total: f64 = Self::halves(&cell.c, &cell.w, k).iter().map(|(c, w)| self.upper(c, w, cell.ub)).sum();
            if total < best.0 || (total == best.0 && cell.w[k] > best.1) {
                best = (total, cell.w[k], k);
            }
        }
        best.2
    }
}

/// Cap on evaluated boxes in [`homothetic_h0_upper`].
const H0_BUDGET: usize = 4_000_000;

/// Certified enclosure of
/// `max_{x ∈ S_∅ \ ⋃ S_i} min_i (dist(x, t_i) - λ_i) / (1 - λ_i)`,
/// an upper bound for the hole radius of the root of the attractor.
/// An empty region gives `[0, 0]`.
pub fn homothetic_h0_upper(ifs: &HomotheticIFS, norm: NormKind, tol: f64) -> Result<IntervalBound> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    BallSystem::from_ifs(ifs.clone(), norm)?;
    let obj = Objective { ifs, norm };
    let d = ifs.dim();
    let root = Cell { c: vec![0.0; d], w: vec![1.0; d], ub: obj.upper(&vec![0.0; d], &vec![1.0; d], f64::INFINITY) };
    let mut lb = 0.0f64;
    if obj.in_region(&root.c) {
        lb = obj.at(&root.c);
    }
    let mut settled = 0.0f64;
    let mut heap = BinaryHeap::new();
    if obj.meets_region(&root.c, &root.w) {
        heap.push(root);
    }
    let mut evaluated = 0usize;
    while let Some(cell) = heap.pop() {
        let hi = cell.ub.max(settled).max(lb);
        if hi - lb <= tol {
            return Ok(IntervalBound::new(lb, hi, tol).widened(1e-14));
        }
        if evaluated > H0_BUDGET {
            let mut out = IntervalBound::new(lb, hi, tol);
            out.converged = false;
            return Ok(out);
        }
        let k = obj.split_axis(&cell);
        for (c, w) in Objective::halves(&cell.c, &cell.w, k) {
            evaluated += 1;
            if !obj.meets_region(&c, &w) {
                continue;
            }
            if obj.in_region(&c) {
                lb = lb.max(obj.at(&c));
            }
            let ub = obj.upper(&c, &w, cell.ub);
            if ub <= lb {
                continue;
            }
            if ub <= lb + tol {
                settled = settled.max(ub);
                continue;
            }
            heap.push(Cell { c, w, ub });
        }
    }
    let hi = settled.max(lb);
    Ok(IntervalBound::new(lb, hi, tol).widened(1e-14))
}

/// Thickness lower bound and denseness radius of a self-homothetic attractor.
pub fn homothetic_bounds(ifs: &HomotheticIFS, norm: NormKind, tol: f64) -> Result<HomotheticBounds> {
    let h0_upper = homothetic_h0_upper(ifs, norm, tol)?;
    let tau_lower = if h0_upper.hi > 0.0 { ifs.min_ratio() / h0_upper.hi } else { f64::INFINITY };
    Ok(HomotheticBounds { tau_lower, dense_radius: 2.0 * ifs.max_ratio() + h0_upper.hi, h0_upper })
}

/// `τ / (1 + τ·2ε / ((1+ε)λ))`: thickness surviving a `C¹` map with
/// `‖Df - I‖ < ε`, given child/parent radius ratios at least `λ`.
pub fn perturbation_bound(tau: f64, eps: f64, lambda: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid(format!("thickness must be positive, got {tau}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(invalid(format!("ε must lie in [0,1), got {eps}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("λ must lie in (0,1), got {lambda}")));
    }
    Ok(tau / (1.0 + tau * 2.0 * eps / ((1.0 + eps) * lambda)))
}
