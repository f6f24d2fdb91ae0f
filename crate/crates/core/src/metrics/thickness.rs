use rayon::prelude::*;
use serde::Serialize;

use crate::ballsystem::{BallSystem, Generator, Node, Transform, Word};
use crate::error::{invalid, Result};
use crate::geometry::IntervalBound;

use super::hole::{hole_of_node, root_hole, DEFAULT_BOX_BUDGET};

/// Per-node thickness data.
#[derive(Clone, Debug, Serialize)]
pub struct NodeRecord {
    pub word: Word,
    pub child_min_radius: f64,
    pub h: IntervalBound,
    pub ratio: IntervalBound,
}

/// How the infimum over nodes was bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThicknessMethod {
    /// Every node with `|I| ≤ depth` evaluated directly.
    Exhaustive,
    /// Hole radii of all nodes bounded through self-similarity from the root.
    SelfSimilar,
    /// Self-similar bound pushed through a `C¹` perturbation.
    Perturbed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThicknessReport {
    pub overall: IntervalBound,
    pub depth: usize,
    pub converged: bool,
    pub method: ThicknessMethod,
    /// `overall.lo` bounds the infimum over every depth.
    pub lower_bound_all_depths: bool,
    /// The whole enclosure is valid for every depth (exactly verified
    /// sibling disjointness, or a finite tree evaluated to its height).
    pub all_depths: bool,
    pub per_node: Vec<NodeRecord>,
}

fn ratio_of(m: f64, h: &IntervalBound) -> IntervalBound {
    let lo = if h.hi > 0.0 { m / h.hi } else { f64::INFINITY };
    let hi = if h.lo > 0.0 { m / h.lo } else { f64::INFINITY };
    let converged = h.converged && (hi - lo).is_finite();
    IntervalBound { lo, hi, tol: h.tol, converged }.widened(super::ROUNDING)
}

fn record(sys: &BallSystem, node: &Node, kids: &[Node], tol_h: f64) -> NodeRecord {
    let m = kids.iter().map(|k| k.ball.radius).fold(f64::INFINITY, f64::min);
    let h = if node.word.is_empty() { root_hole(sys, tol_h) } else { hole_of_node(sys, node, &[], tol_h, DEFAULT_BOX_BUDGET) };
    NodeRecord { word: node.word.clone(), child_min_radius: m, ratio: ratio_of(m, &h), h }
}

/// Next hole tolerance so that the ratio width drops below `target`.
fn next_tol(rec: &NodeRecord, tol_h: f64, target: f64) -> f64 {
    let w = rec.ratio.width();
    let factor = if w.is_finite() && w > 0.0 { (0.5 * target / w).clamp(1e-4, 0.5) } else { 0.1 };
    tol_h * factor
}

const MAX_ROUNDS: usize = 12;

/// Refine one record until its ratio width is at most `target`.
fn refine(sys: &BallSystem, node: &Node, kids: &[Node], target: f64) -> NodeRecord {
    let floor = 1e-13 * node.ball.radius;
    let mut tol_h = 1e-3 * node.ball.radius;
    let mut rec = record(sys, node, kids, tol_h);
    for _ in 0..MAX_ROUNDS {
        if rec.ratio.width() <= target || tol_h <= floor || !rec.h.converged {
            break;
        }
        if rec.h.hi == 0.0 {
            break;
        }
        tol_h = next_tol(&rec, tol_h, target).max(floor);
        rec = record(sys, node, kids, tol_h);
    }
    rec
}

struct Structural {
    /// Upper bound on `h_I / rad(S_I)` valid for every node.
    rel_hole: f64,
    /// Lower bound on `min_j rad(S_{Ij}) / rad(S_I)` valid for every node.
    min_ratio: f64,
    method: ThicknessMethod,
    disjoint: bool,
}

fn structural(sys: &BallSystem, target: f64) -> Option<(Structural, NodeRecord)> {
    let root = sys.root();
    let kids = sys.children(&root);
    match sys.generator() {
        Generator::Transformed(base, Transform::Perturbed { eps, .. }) => {
            let (b, _) = structural(base, target)?;
            let rel = (2.0 * eps + (1.0 + eps) * b.rel_hole) / (1.0 + eps);
            let rec = refine(sys, &root, &kids, target);
            let s = Structural { rel_hole: rel, min_ratio: b.min_ratio, method: ThicknessMethod::Perturbed, disjoint: false };
            Some((s, rec))
        }
        _ => {
            let ifs = sys.homothetic_core()?;
            // f_I(C) ⊆ C gives h_I ≤ λ_I h_∅ at every node
            let rec = refine(sys, &root, &kids, target);
            let s = Structural {
                rel_hole: rec.h.hi / root.ball.radius,
                min_ratio: ifs.min_ratio(),
                method: ThicknessMethod::SelfSimilar,
                disjoint: sys.siblings_disjoint_at_root(),
            };
            Some((s, rec))
        }
    }
}

/// Certified enclosure of `inf_{|I| ≤ depth} min_i rad(S_{Ii}) / h_I`,
/// aiming for an overall width of at most `tol`.
pub fn thickness(sys: &BallSystem, depth: usize, tol: f64) -> Result<ThicknessReport> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let target = 0.5 * tol;
    if let Some((s, rec)) = structural(sys, target) {
        let lo = if s.rel_hole > 0.0 { s.min_ratio / s.rel_hole * (1.0 - super::ROUNDING) } else { f64::INFINITY };
        let hi = rec.ratio.hi.max(lo);
        let converged = rec.h.converged;
        let overall = IntervalBound::new(lo, hi, tol);
        return Ok(ThicknessReport {
            overall,
            depth,
            converged,
            method: s.method,
            lower_bound_all_depths: true,
            all_depths: s.method == ThicknessMethod::SelfSimilar && s.disjoint,
            per_node: vec![rec],
        });
    }

    let mut internal: Vec<(Node, Vec<Node>)> = Vec::new();
    sys.visit(depth, &mut |n, kids| {
        if !kids.is_empty() {
            internal.push((n.clone(), kids.to_vec()));
        }
    });
    let records: Vec<NodeRecord> = internal.par_iter().map(|(n, k)| refine(sys, n, k, target)).collect();
    let lo = records.iter().map(|r| r.ratio.lo).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.ratio.hi).fold(f64::INFINITY, f64::min);
    // only nodes that can still realize the infimum need to have converged
    let converged = records.iter().filter(|r| r.ratio.lo <= hi).all(|r| r.h.converged);
    let covers_tree = sys.finite_height().is_some_and(|h| h <= depth + 1);
    Ok(ThicknessReport {
        overall: IntervalBound::new(lo.min(hi), hi, tol),
        depth,
        converged,
        method: ThicknessMethod::Exhaustive,
        lower_bound_all_depths: covers_tree,
        all_depths: covers_tree,
        per_node: records,
    })
}
