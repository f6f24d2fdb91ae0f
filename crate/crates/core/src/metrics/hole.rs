//! `h_I = max_{x ∈ S_I} dist(x, C)` by branch and bound over sub-boxes of
//! `S_I`. Every box carries the list of nodes of the whole system that can
//! still hold the nearest point of `C` for some `x` in the box; boxes inherit
//! their parent's list, so deep boxes only touch a handful of nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::{Arc, OnceLock};

use crate::ballsystem::{BallSystem, Node, Word};
use crate::error::{invalid, Result};
use crate::geometry::{Ball, IntervalBound, NormKind, Point};

/// Cap on sub-box evaluations for one hole radius.
pub const DEFAULT_BOX_BUDGET: usize = 4_000_000;

struct Entry {
    node: Node,
    terminal: bool,
    anchors: OnceLock<Vec<Point>>,
    children: OnceLock<Vec<Arc<Entry>>>,
}

impl Entry {
    /// `finite` marks systems whose trees can end in non-solid terminal nodes.
    fn new(sys: &BallSystem, node: Node, finite: bool) -> Arc<Entry> {
        let terminal = node.solid || (finite && sys.children(&node).is_empty());
        Arc::new(Entry { node, terminal, anchors: OnceLock::new(), children: OnceLock::new() })
    }

    fn anchors(&self, sys: &BallSystem) -> &[Point] {
        self.anchors.get_or_init(|| {
            let mut a = sys.node_anchors(&self.node);
            if let Some(p) = &self.node.anchor {
                a.push(p.clone());
            }
            a
        })
    }

    fn children(&self, sys: &BallSystem, finite: bool) -> &[Arc<Entry>] {
        self.children.get_or_init(|| sys.children(&self.node).into_iter().map(|k| Entry::new(sys, k, finite)).collect())
    }

    fn expandable(&self) -> bool {
        !self.terminal
    }
}

struct SubBox {
    center: Vec<f64>,
    half: Vec<f64>,
    ub: f64,
    list: Vec<Arc<Entry>>,
}

impl SubBox {
    fn corner(&self) -> impl Iterator<Item = f64> + '_ {
        self.center.iter().zip(&self.half).map(|(c, w)| c - w)
    }
}

impl PartialEq for SubBox {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SubBox {}
impl PartialOrd for SubBox {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SubBox {
    // largest upper bound first, then lexicographically smallest corner
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub).then_with(|| {
            for (a, b) in self.corner().zip(other.corner()) {
                match b.total_cmp(&a) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

/// Upper bound on `max_{x∈box} dist(x, C ∩ S_N)`, or `None` when it
/// cannot beat `cutoff`.
fn node_upper(sys: &BallSystem, e: &Entry, c: &[f64], w: &[f64], cutoff: f64) -> Option<f64> {
    let norm = sys.norm();
    let n = &e.node;
    let far = norm.farthest_in_box(c, w, &n.ball.center.0);
    if n.solid {
        let u = (far - n.ball.radius).max(0.0);
        return (u < cutoff).then_some(u);
    }
    // every anchor is within the radius of the center
    if far - n.ball.radius >= cutoff {
        return None;
    }
    let mut best = far + n.ball.radius;
    for a in e.anchors(sys) {
        best = best.min(norm.farthest_in_box(c, w, &a.0));
    }
    (best < cutoff).then_some(best)
}

fn list_upper(sys: &BallSystem, list: &[Arc<Entry>], c: &[f64], w: &[f64], mut ub: f64) -> f64 {
    for e in list {
        if let Some(u) = node_upper(sys, e, c, w, ub) {
            ub = u;
        }
    }
    ub
}

/// Smallest distance between a box and a node ball.
fn node_gap(norm: NormKind, n: &Node, c: &[f64], w: &[f64]) -> f64 {
    (norm.dist_to_box(c, w, &n.ball.center.0) - n.ball.radius).max(0.0)
}

struct Evaluated {
    sub: SubBox,
    /// Lower bound on `dist(center, C)` when the center lies in the region.
    center_lb: Option<f64>,
}

/// Refine the inherited list until every node is small relative to the box,
/// pruning nodes that cannot be nearest for any point of the box.
fn evaluate(
    sys: &BallSystem,
    finite: bool,
    region: &Node,
    c: Vec<f64>,
    w: Vec<f64>,
    inherited: &[Arc<Entry>],
    parent_ub: f64,
) -> Evaluated {
    let norm = sys.norm();
    let wmax = w.iter().cloned().fold(0.0, f64::max);
    let refine_to = 0.5 * wmax;

    let mut ub = list_upper(sys, inherited, &c, &w, parent_ub);
    let mut list: Vec<Arc<Entry>> =
        inherited.iter().filter(|e| node_gap(norm, &e.node, &c, &w) <= ub).cloned().collect();
    loop {
        let (big, keep): (Vec<_>, Vec<_>) =
            list.into_iter().partition(|e| e.expandable() && e.node.ball.radius > refine_to);
        if big.is_empty() {
            list = keep;
            break;
        }
        let mut fresh = Vec::new();
        for e in &big {
            for k in e.children(sys, finite) {
                if node_gap(norm, &k.node, &c, &w) <= ub {
                    fresh.push(k.clone());
                }
            }
        }
        ub = list_upper(sys, &fresh, &c, &w, ub);
        list = keep;
        list.extend(fresh);
        list.retain(|e| node_gap(norm, &e.node, &c, &w) <= ub);
    }
    // nearest nodes first, so later bounds get cut off early
    let mut keyed: Vec<(f64, Arc<Entry>)> =
        list.into_iter().map(|e| (norm.dist(&e.node.ball.center.0, &c) - e.node.ball.radius, e)).collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.node.word.cmp(&b.1.node.word)));
    let center_in = norm.dist(&region.ball.center.0, &c) <= region.ball.radius;
    let center_lb = center_in.then(|| keyed.first().map_or(f64::INFINITY, |k| k.0.max(0.0)));
    let list = keyed.into_iter().map(|k| k.1).collect();
    Evaluated { sub: SubBox { center: c, half: w, ub, list }, center_lb }
}

/// Axis whose halving gives the smallest summed upper bound of both halves,
/// judged with the box's current node list. Cubes need this: maxima of
/// `dist(·, C)` in the sup norm sit on whole segments, and only boxes thin
/// across such a segment get tight bounds.
fn split_axis(sys: &BallSystem, b: &SubBox) -> usize {
    let d = b.center.len();
    if sys.norm() != NormKind::Linf || d == 1 {
        return (0..d).fold(0, |best, k| if b.half[k] > b.half[best] { k } else { best });
    }
    let floor = 1e-15 * b.half.iter().cloned().fold(0.0, f64::max);
    let mut best = (f64::INFINITY, 0.0, 0usize);
    for k in 0..d {
        if b.half[k] <= floor {
            continue;
        }
        let mut total = 0.0;
        for s in [-0.5, 0.5] {
            let mut c = b.center.clone();
            let mut w = b.half.clone();
            w[k] *= 0.5;
            c[k] += s * b.half[k];
            total += list_upper(sys, &b.list, &c, &w, b.ub);
        }
        if total < best.0 || (total == best.0 && b.half[k] > best.1) {
            best = (total, b.half[k], k);
        }
    }
    best.2
}

/// Enclosure of `h` for an arbitrary node, maximizing over `S_I` by boxes.
/// Boxes inside one of the `skip` balls are dropped.
pub(crate) fn hole_of_node(sys: &BallSystem, node: &Node, skip: &[Ball], tol: f64, budget: usize) -> IntervalBound {
    search(sys, node, skip, tol, budget).widened(super::ROUNDING)
}

fn search(sys: &BallSystem, node: &Node, skip: &[Ball], tol: f64, budget: usize) -> IntervalBound {
    let norm = sys.norm();
    let region = node;
    let d = sys.dim();
    let finite = sys.finite_height().is_some();
    let start = evaluate(
        sys,
        finite,
        region,
        region.ball.center.0.clone(),
        vec![region.ball.radius; d],
        &[Entry::new(sys, sys.root(), finite)],
        f64::INFINITY,
    );
    let mut lb: f64 = start.center_lb.unwrap_or(0.0);
    let mut settled: f64 = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(start.sub);
    let mut evaluated = 1usize;

    while let Some(b) = heap.pop() {
        if b.ub.max(settled) - lb <= tol {
            return IntervalBound::new(lb, b.ub.max(settled).max(lb), tol);
        }
        if evaluated > budget {
            let hi = b.ub.max(settled).max(lb);
            let mut out = IntervalBound::new(lb, hi, tol);
            out.converged = false;
            return out;
        }
        let k = split_axis(sys, &b);
        for s in [-0.5, 0.5] {
            let mut c = b.center.clone();
            let mut w = b.half.clone();
            w[k] *= 0.5;
            c[k] += s * b.half[k];
            if norm.dist_to_box(&c, &w, &region.ball.center.0) > region.ball.radius {
                continue;
            }
            if skip.iter().any(|b| norm.farthest_in_box(&c, &w, &b.center.0) <= b.radius) {
                continue;
            }
            let ev = evaluate(sys, finite, region, c, w, &b.list, b.ub);
            evaluated += 1;
            if let Some(v) = ev.center_lb {
                lb = lb.max(v);
            }
            if ev.sub.ub <= lb {
                continue;
            }
            if ev.sub.ub <= lb + tol {
                settled = settled.max(ev.sub.ub);
                continue;
            }
            heap.push(ev.sub);
        }
    }
    let hi = settled.max(lb);
    IntervalBound::new(lb, hi, tol)
}

/// Certified enclosure of the hole radius of the node at `word`.
pub fn hole_radius(word: &Word, sys: &BallSystem, tol: f64) -> Result<IntervalBound> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let node = sys.node(word)?;
    if word.is_empty() {
        return Ok(root_hole(sys, tol));
    }
    Ok(hole_of_node(sys, &node, &[], tol, DEFAULT_BOX_BUDGET))
}

/// Root hole radius, memoized per system and shared with similar images.
pub(crate) fn root_hole(sys: &BallSystem, tol: f64) -> IntervalBound {
    use crate::ballsystem::{Generator, Transform};
    if let Generator::Transformed(base, t) = sys.generator() {
        match t {
            Transform::Translate(_) => return root_hole(base, tol),
            Transform::Similarity { scale, .. } => return root_hole(base, tol / scale).scaled(*scale),
            Transform::Perturbed { .. } => {}
        }
    }
    let memo = sys.hole_memo();
    if let Some(hit) = memo.lock().unwrap().iter().find(|b| b.converged && b.width() <= tol) {
        return hit.clone();
    }
    // for homothetic systems points inside a child S_i have dist(x, C) ≤ λ_i h_∅,
    // so the maximum (when positive) is attained outside the children
    let root = sys.root();
    let skip: Vec<_> = match sys.homothetic_core() {
        Some(_) => sys.children(&root).into_iter().map(|k| k.ball).collect(),
        None => Vec::new(),
    };
    let b = hole_of_node(sys, &root, &skip, tol, DEFAULT_BOX_BUDGET);
    memo.lock().unwrap().push(b.clone());
    b
}

/// Enclosure of `h_I` for a node. Homothetic systems reuse the memoized
/// root value: `f_I(C) ⊆ C` gives `h_I ≤ λ_I h_∅`, with equality when the
/// siblings are disjoint. The upper end is always valid.
pub fn node_hole(sys: &BallSystem, node: &Node, tol: f64) -> IntervalBound {
    if node.word.is_empty() {
        return root_hole(sys, tol);
    }
    if sys.homothetic_core().is_some() {
        let ratio = node.ball.radius / sys.root_ball().radius;
        let root = root_hole(sys, (tol / ratio).min(1e-3 * sys.root_ball().radius));
        let s = root.scaled(ratio).widened(super::ROUNDING);
        let lo = if sys.siblings_disjoint_at_root() { s.lo } else { 0.0 };
        return IntervalBound { lo, ..s };
    }
    hole_of_node(sys, node, &[], tol, DEFAULT_BOX_BUDGET)
}
