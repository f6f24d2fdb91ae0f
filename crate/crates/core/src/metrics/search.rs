use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ballsystem::{BallSystem, Node};
use crate::error::{invalid, Result};
use crate::geometry::{check_dims, IntervalBound, NormKind, Point};

/// Default cap on nodes generated by one distance search.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Enclosure of `dist(x, C)` together with a point of `C` realizing the upper end.
#[derive(Clone, Debug)]
pub struct Nearest {
    pub bound: IntervalBound,
    pub point: Point,
    /// Deepest word expanded on the way to `point`.
    pub word: crate::ballsystem::Word,
}

struct Item {
    lb: f64,
    node: Node,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    // reversed: BinaryHeap pops the smallest lower bound, then the smallest word
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb).then_with(|| other.node.word.cmp(&self.node.word))
    }
}

/// Best known point of `C ∩ S_I` for a query `q`, and its distance.
fn best_point(sys: &BallSystem, node: &Node, q: &[f64]) -> Option<(f64, Point)> {
    let norm = sys.norm();
    if node.solid {
        let p = norm.nearest_in_ball(&node.ball.center.0, node.ball.radius, q);
        return Some((norm.dist(&p, q), Point(p)));
    }
    node.anchor.as_ref().map(|a| (norm.dist(&a.0, q), a.clone()))
}

/// Certified enclosure of `dist(x, C)` with `hi - lo <= tol` unless the
/// node budget runs out, in which case the enclosure is flagged unconverged.
pub fn dist_to_set(x: &Point, sys: &BallSystem, tol: f64) -> Result<IntervalBound> {
    nearest_point(x, sys, tol, DEFAULT_NODE_BUDGET).map(|n| n.bound)
}

/// Best-first descent on the ball-distance lower bound.
pub fn nearest_point(x: &Point, sys: &BallSystem, tol: f64, budget: usize) -> Result<Nearest> {
    check_dims(sys.dim(), x.dim())?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !x.is_finite() {
        return Err(invalid("query point has non-finite coordinates"));
    }
    let norm: NormKind = sys.norm();
    let q = &x.0;
    let root = sys.root();
    let root_lb = (norm.dist(&root.ball.center.0, q) - root.ball.radius).max(0.0);
    let (mut best_ub, mut best_pt) = best_point(sys, &root, q)
        .unwrap_or_else(|| (norm.dist(&root.ball.center.0, q) + root.ball.radius, root.ball.center.clone()));
    let mut best_word = root.word.clone();
    let mut heap = BinaryHeap::new();
    heap.push(Item { lb: root_lb, node: root });
    let mut generated = 0usize;

    let finish = |lo: f64, ub: f64, pt: Point, word, converged_budget: bool| {
        let mut b = IntervalBound::new(lo.min(ub), ub, tol).widened(super::ROUNDING);
        b.converged &= converged_budget;
        Nearest { bound: b, point: pt, word }
    };

    while let Some(Item { lb, node }) = heap.pop() {
        if best_ub - lb <= tol {
            return Ok(finish(lb, best_ub, best_pt, best_word, true));
        }
        let kids = if node.solid { Vec::new() } else { sys.children(&node) };
        if kids.is_empty() {
            // terminal node: its bound cannot improve
            return Ok(finish(lb, best_ub, best_pt, best_word, best_ub - lb <= tol));
        }
        for k in kids {
            generated += 1;
            let klb = (norm.dist(&k.ball.center.0, q) - k.ball.radius).max(0.0).max(lb);
            if let Some((d, p)) = best_point(sys, &k, q) {
                if d < best_ub {
                    best_ub = d;
                    best_pt = p;
                    best_word = k.word.clone();
                }
            }
            if klb < best_ub {
                heap.push(Item { lb: klb, node: k });
            }
        }
        if generated > budget {
            let lo = heap.peek().map_or(best_ub, |i| i.lb);
            return Ok(finish(lo, best_ub, best_pt, best_word, false));
        }
    }
    Ok(finish(best_ub, best_ub, best_pt, best_word, true))
}
