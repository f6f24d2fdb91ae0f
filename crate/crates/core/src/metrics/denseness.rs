//! Sound r-uniform denseness verdicts.
//!
//! A ball `B[q, rR] ⊆ S_I = B[c, R]` contains the child `B[z_i, ρ_i]` iff
//! `q ∈ B[z_i, rR - ρ_i]`, and it lies in `S_I` iff `q ∈ B[c, (1-r)R]`. So the
//! property at `I` says that these "tiles" cover the center region. The
//! region is cut into cells until every cell sits in one tile, or a cell
//! center escapes all tiles (a refutation), or cells reach the grid step.

use serde::{Deserialize, Serialize};

use crate::ballsystem::{BallSystem, Node, Word};
use crate::error::{invalid, Result};
use crate::geometry::{Ball, NormKind, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proven,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensenessReport {
    pub r: f64,
    pub verdict: Verdict,
    /// A ball of radius `r·rad(S_I)` inside `S_I` containing no child.
    pub witness: Option<Ball>,
    /// Node where the verdict was decided negatively.
    pub word: Option<Word>,
    pub grid_step: f64,
    pub nodes_checked: usize,
}

/// Relative slack absorbing rounding in exactly tiling configurations.
const SLACK: f64 = 1e-12;

const MAX_CELLS: usize = 2_000_000;

enum NodeVerdict {
    Covered,
    Refuted(Ball),
    Unknown,
}

struct Tile {
    center: Vec<f64>,
    radius: f64,
}

fn check_node(norm: NormKind, node: &Node, kids: &[Node], r: f64, grid_step: f64) -> NodeVerdict {
    let big_r = node.ball.radius;
    let slack = SLACK * big_r;
    let region_r = (1.0 - r) * big_r;
    let c = &node.ball.center.0;
    let tiles: Vec<Tile> = kids
        .iter()
        .filter(|k| k.ball.radius <= r * big_r + slack)
        .map(|k| Tile { center: k.ball.center.0.clone(), radius: r * big_r - k.ball.radius })
        .collect();
    let min_half = 0.5 * grid_step * big_r;

    let mut stack = vec![(c.clone(), vec![region_r; c.len()])];
    let mut cells = 0usize;
    while let Some((cc, w)) = stack.pop() {
        cells += 1;
        if cells > MAX_CELLS {
            return NodeVerdict::Unknown;
        }
        if norm.dist_to_box(&cc, &w, c) > region_r + slack {
            continue;
        }
        if tiles.iter().any(|t| norm.farthest_in_box(&cc, &w, &t.center) <= t.radius + slack) {
            continue;
        }
        let center_in_region = norm.dist(&cc, c) <= region_r;
        let holder = tiles.iter().find(|t| norm.dist(&cc, &t.center) <= t.radius + slack);
        match holder {
            None if center_in_region => {
                return NodeVerdict::Refuted(Ball { center: Point(cc), radius: r * big_r });
            }
            _ => {}
        }
        let wmax = w.iter().cloned().fold(0.0, f64::max);
        if wmax < min_half {
            return NodeVerdict::Unknown;
        }
        // for cubes, cut along a face of the tile holding the center
        let mut cut: Option<(usize, f64)> = None;
        if let (NormKind::Linf, Some(t)) = (norm, holder) {
            for k in 0..cc.len() {
                for face in [t.center[k] - t.radius, t.center[k] + t.radius] {
                    let inside = face - (cc[k] - w[k]);
                    let room = 2.0 * w[k];
                    if inside > 1e-9 * room && inside < room * (1.0 - 1e-9) {
                        if cut.map_or(true, |(j, _)| w[k] > w[j]) {
                            cut = Some((k, face));
                        }
                    }
                }
            }
        }
        let (k, at) = cut.unwrap_or_else(|| {
            let k = (0..w.len()).fold(0, |b, j| if w[j] > w[b] { j } else { b });
            (k, cc[k])
        });
        let lo_edge = cc[k] - w[k];
        let hi_edge = cc[k] + w[k];
        for (a, b) in [(lo_edge, at), (at, hi_edge)] {
            let mut nc = cc.clone();
            let mut nw = w.clone();
            nc[k] = 0.5 * (a + b);
            nw[k] = 0.5 * (b - a);
            stack.push((nc, nw));
        }
    }
    NodeVerdict::Covered
}

/// Decide r-uniform denseness for nodes with `|I| ≤ depth`. `grid_step` is
/// relative to the node radius: cells smaller than it end in `Unknown`.
pub fn denseness_check(sys: &BallSystem, r: f64, grid_step: f64, depth: usize) -> Result<DensenessReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("denseness radius must lie in (0,1), got {r}")));
    }
    if !(grid_step > 0.0) {
        return Err(invalid(format!("grid step must be positive, got {grid_step}")));
    }
    let norm = sys.norm();
    // similar copies of the root: one check covers every node
    let depth = if sys.homothetic_core().is_some() { 0 } else { depth };
    let mut report =
        DensenessReport { r, verdict: Verdict::Proven, witness: None, word: None, grid_step, nodes_checked: 0 };
    let mut unknown_word = None;
    let mut refuted = None;
    sys.visit(depth, &mut |node, kids| {
        if refuted.is_some() || kids.is_empty() {
            return;
        }
        report.nodes_checked += 1;
        match check_node(norm, node, kids, r, grid_step) {
            NodeVerdict::Covered => {}
            NodeVerdict::Refuted(b) => refuted = Some((node.word.clone(), b)),
            NodeVerdict::Unknown => {
                if unknown_word.is_none() {
                    unknown_word = Some(node.word.clone());
                }
            }
        }
    });
    if let Some((w, b)) = refuted {
        report.verdict = Verdict::Refuted;
        report.witness = Some(b);
        report.word = Some(w);
    } else if let Some(w) = unknown_word {
        report.verdict = Verdict::Unknown;
        report.word = Some(w);
    }
    Ok(report)
}
