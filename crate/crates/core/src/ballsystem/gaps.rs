use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, Point};

use super::{Node, NodeBase, Word};

/// Closed hull `[a, b]` with a finite list of disjoint open gaps removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapList1D {
    pub hull: (f64, f64),
    pub gaps: Vec<(f64, f64)>,
}

impl GapList1D {
    pub fn new(hull: (f64, f64), gaps: Vec<(f64, f64)>) -> Result<GapList1D> {
        let gl = GapList1D { hull, gaps };
        gl.validate()?;
        Ok(gl)
    }

    /// Gaps must have positive length, sit strictly inside the hull and have
    /// disjoint closures, so every bridge is a nondegenerate interval.
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.hull;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("hull [{a}, {b}] is not a proper interval")));
        }
        for &(lo, hi) in &self.gaps {
            if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                return Err(invalid(format!("gap ({lo}, {hi}) has no positive length")));
            }
            if lo <= a || hi >= b {
                return Err(Error::InvalidSystem(format!("gap ({lo}, {hi}) is not inside the hull [{a}, {b}]")));
            }
        }
        let mut sorted = self.gaps.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in sorted.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidSystem(format!(
                    "gaps ({}, {}) and ({}, {}) overlap or touch",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(())
    }

    /// Gaps in decreasing length, ties broken leftmost first.
    pub fn ordered(&self) -> Vec<(f64, f64)> {
        let mut g = self.gaps.clone();
        g.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)).then(x.0.total_cmp(&y.0)));
        g
    }
}

/// `inf_n min(|L_n|, |R_n|)/|G_n|` over the listed gaps, where `L_n`, `R_n`
/// are the bridges of `G_n` inside the component of the hull minus the
/// longer gaps. Returns `+∞` for an empty list.
pub fn newhouse_thickness(gl: &GapList1D) -> Result<f64> {
    gl.validate()?;
    let ordered = gl.ordered();
    let mut tau = f64::INFINITY;
    for (n, &(lo, hi)) in ordered.iter().enumerate() {
        let earlier = &ordered[..n];
        let left = earlier.iter().map(|g| g.1).filter(|&e| e <= lo).fold(gl.hull.0, f64::max);
        let right = earlier.iter().map(|g| g.0).filter(|&s| s >= hi).fold(gl.hull.1, f64::min);
        let ratio = (lo - left).min(right - hi) / (hi - lo);
        tau = tau.min(ratio);
    }
    Ok(tau)
}

#[derive(Clone, Debug)]
pub struct GapTree {
    nodes: Vec<GapNode>,
}

#[derive(Clone, Debug)]
struct GapNode {
    lo: f64,
    hi: f64,
    children: Vec<usize>,
}

impl GapTree {
    pub(super) fn build(gl: &GapList1D) -> Result<GapTree> {
        gl.validate()?;
        let ordered = gl.ordered();
        let mut tree = GapTree { nodes: Vec::new() };
        tree.split(gl.hull.0, gl.hull.1, &ordered);
        Ok(tree)
    }

    fn split(&mut self, lo: f64, hi: f64, ordered: &[(f64, f64)]) -> usize {
        let id = self.nodes.len();
        self.nodes.push(GapNode { lo, hi, children: Vec::new() });
        if let Some(&(glo, ghi)) = ordered.iter().find(|g| g.0 > lo && g.1 < hi) {
            let l = self.split(lo, glo, ordered);
            let r = self.split(ghi, hi, ordered);
            self.nodes[id].children = vec![l, r];
        }
        id
    }

    pub(super) fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    pub(super) fn height(&self, id: usize) -> usize {
        self.nodes[id].children.iter().map(|&c| 1 + self.height(c)).max().unwrap_or(0)
    }

    pub(super) fn node(&self, word: Word, id: usize) -> Node {
        let n = &self.nodes[id];
        Node {
            word,
            ball: Ball { center: Point(vec![0.5 * (n.lo + n.hi)]), radius: 0.5 * (n.hi - n.lo) },
            anchor: Some(Point(vec![n.lo])),
            solid: n.children.is_empty(),
            base: NodeBase::Slot(id),
        }
    }
}
