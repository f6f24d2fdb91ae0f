//! The Gap Lemma: hypothesis checks and a constructive run of its proof
//! that produces a certified point close to both sets, plus directional
//! distance certificates built on top of it.
//!
//! The point `α_n` of the proof is carried as a node `N` of its system lying
//! strictly inside the current target ball. Its anchor is a point of `C`, and
//! anchors stay in the first-child chain below `N`, so the balls `S_k`
//! containing `α_n` are the prefixes of that chain.

use serde::Serialize;

use crate::ballsystem::{BallSystem, Node, Word};
use crate::error::{invalid, Error, Result};
use crate::geometry::{ball_contains, check_dims, Ball, IntervalBound, NormKind, Point};
use crate::metrics::{denseness_check, dist_to_set, node_hole, thickness, DensenessReport, Verdict};

/// Outcome of one hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct TauCheck {
    pub status: Verdict,
    /// Enclosure of the product of the two thickness values.
    pub lhs: IntervalBound,
    /// `1 / (1-2r)^2`
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapHypothesesReport {
    pub r: f64,
    pub hyp_tau: TauCheck,
    pub hyp_meet: Verdict,
    /// Node of the first system inside `(1-2r) S²_∅`, when one was found.
    pub meet_word: Option<Word>,
    pub hyp_radii: Verdict,
    pub hyp_dense: (DensenessReport, DensenessReport),
    pub all_proven: bool,
}

/// Knobs for [`check_hypotheses_with`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HypothesisOptions {
    pub depth: usize,
    pub tau_tol: f64,
    pub grid_step: f64,
    pub meet_depth: usize,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions { depth: 3, tau_tol: 0.1, grid_step: 1e-3, meet_depth: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    Case1,
    Case2,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: usize,
    /// System (1 or 2) holding `α_n`.
    pub side: u8,
    /// Word of `S_{J_n}` in the other system.
    pub word: Word,
    pub radius: f64,
    /// How this step was reached; `None` for the starting point.
    pub case: Option<Case>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionCertificate {
    pub witness: Point,
    pub residual1: IntervalBound,
    pub residual2: IntervalBound,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionalDistanceCertificate {
    pub v: Point,
    pub t: f64,
    pub e1: Point,
    pub e2: Point,
    pub residual: f64,
}

fn same_space(a: &BallSystem, b: &BallSystem) -> Result<()> {
    check_dims(a.dim(), b.dim())?;
    if a.norm() != b.norm() {
        return Err(invalid(format!("norm mismatch: {:?} vs {:?}", a.norm(), b.norm())));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 0.5) {
        return Err(invalid(format!("r must lie in (0, 1/2), got {r}")));
    }
    Ok(())
}

fn shrink(b: &Ball, s: f64) -> Ball {
    Ball { center: b.center.clone(), radius: s * b.radius }
}

/// Strict containment with a relative safety margin.
fn strictly_inside(inner: &Ball, outer: &Ball, norm: NormKind) -> bool {
    norm.dist(&inner.center.0, &outer.center.0) + inner.radius < outer.radius * (1.0 - 1e-12)
}

/// Hypotheses (i)-(iv) with default options.
pub fn check_hypotheses(sys1: &BallSystem, sys2: &BallSystem, r: f64) -> Result<GapHypothesesReport> {
    check_hypotheses_with(sys1, sys2, r, HypothesisOptions::default())
}

pub fn check_hypotheses_with(
    sys1: &BallSystem,
    sys2: &BallSystem,
    r: f64,
    opt: HypothesisOptions,
) -> Result<GapHypothesesReport> {
    check_r(r)?;
    same_space(sys1, sys2)?;

    let t1 = thickness(sys1, opt.depth, opt.tau_tol)?;
    let t2 = thickness(sys2, opt.depth, opt.tau_tol)?;
    let rhs = 1.0 / ((1.0 - 2.0 * r) * (1.0 - 2.0 * r));
    let lhs = IntervalBound {
        lo: t1.overall.lo * t2.overall.lo,
        hi: t1.overall.hi * t2.overall.hi,
        tol: opt.tau_tol,
        converged: t1.converged && t2.converged,
    };
    let tau_status = if lhs.lo >= rhs && t1.lower_bound_all_depths && t2.lower_bound_all_depths {
        Verdict::Proven
    } else if lhs.hi < rhs {
        Verdict::Refuted
    } else {
        Verdict::Unknown
    };

    let target = shrink(sys2.root_ball(), 1.0 - 2.0 * r);
    let (hyp_meet, meet_word) = match meet_search(sys1, &target, opt.meet_depth) {
        Meet::Found(w) => (Verdict::Proven, Some(w)),
        Meet::Disjoint => (Verdict::Refuted, None),
        Meet::Undecided => (Verdict::Unknown, None),
    };

    let (r1, r2) = (sys1.root_ball().radius, sys2.root_ball().radius);
    let hyp_radii = if r1 >= r * r2 && r2 >= r * r1 { Verdict::Proven } else { Verdict::Refuted };

    let d1 = denseness_check(sys1, r, opt.grid_step, opt.depth)?;
    let d2 = denseness_check(sys2, r, opt.grid_step, opt.depth)?;
    let all_proven = tau_status == Verdict::Proven
        && hyp_meet == Verdict::Proven
        && hyp_radii == Verdict::Proven
        && d1.verdict == Verdict::Proven
        && d2.verdict == Verdict::Proven;
    Ok(GapHypothesesReport {
        r,
        hyp_tau: TauCheck { status: tau_status, lhs, rhs },
        hyp_meet,
        meet_word,
        hyp_radii,
        hyp_dense: (d1, d2),
        all_proven,
    })
}

enum Meet {
    Found(Word),
    Disjoint,
    Undecided,
}

/// A node of `sys` strictly inside `target` within `depth` levels (then
/// `C ∩ target ≠ ∅`), or proof that no node of that level meets it.
fn meet_search(sys: &BallSystem, target: &Ball, depth: usize) -> Meet {
    let norm = sys.norm();
    let mut frontier = vec![sys.root()];
    for level in 0..=depth {
        let mut next = Vec::new();
        for n in &frontier {
            if norm.dist(&n.ball.center.0, &target.center.0) > n.ball.radius + target.radius {
                continue;
            }
            if strictly_inside(&n.ball, target, norm) {
                return Meet::Found(n.word.clone());
            }
            if level < depth {
                let kids = sys.children(n);
                if kids.is_empty() {
                    // a terminal node meeting the target: decide with its own points
                    if n.solid {
                        return Meet::Found(n.word.clone());
                    }
                    continue;
                }
                next.extend(kids);
            } else {
                next.push(n.clone());
            }
        }
        if next.is_empty() {
            return Meet::Disjoint;
        }
        if level == depth {
            return Meet::Undecided;
        }
        frontier = next;
    }
    Meet::Undecided
}

/// A ball of radius `r·rad(SL)` inside `Sk ∩ SL`.
pub fn bridge_ball(sk: &Ball, sl: &Ball, r: f64, norm: NormKind) -> Result<Ball> {
    check_r(r)?;
    check_dims(sk.dim(), sl.dim())?;
    if sk.radius < r * sl.radius {
        return Err(Error::Hypothesis(format!(
            "rad(S_k) = {} is below r·rad(S_L) = {}",
            sk.radius,
            r * sl.radius
        )));
    }
    let shrunk = shrink(sl, 1.0 - 2.0 * r);
    if !sk.meets(&shrunk, norm) {
        return Err(Error::Hypothesis("S_k does not meet (1-2r) S_L".into()));
    }
    if ball_contains(sl, sk, norm)? {
        return Ok(sk.clone());
    }
    let gap = norm.dist(&sk.center.0, &sl.center.0);
    let out = if gap == 0.0 {
        Ball { center: sl.center.clone(), radius: r * sl.radius }
    } else {
        // midpoint of the segment between ∂[(1-2r) S_L] and ∂S_L towards S_k
        let u = sk.center.sub(&sl.center).scale(1.0 / gap);
        Ball { center: sl.center.add_scaled((1.0 - r) * sl.radius, &u), radius: r * sl.radius }
    };
    let slack = Ball { center: out.center.clone(), radius: out.radius * (1.0 - 1e-12) };
    if !(ball_contains(sk, &slack, norm)? && ball_contains(sl, &slack, norm)?) {
        return Err(Error::Hypothesis(format!("bridge ball {out:?} escapes S_k ∩ S_L")));
    }
    Ok(out)
}

/// A node found strictly inside a target, with a point of `C` in it.
#[derive(Clone, Debug, Serialize)]
pub struct Found {
    pub point: Point,
    pub word: Word,
    pub radius: f64,
    /// Bound on `dist(point, C)`: zero for an anchor, else the node radius.
    pub residual: f64,
}

const FIND_BUDGET: usize = 2_000_000;

/// Descend nearest-first through nodes meeting `target` and return one
/// lying strictly inside it. Without an anchor the node must also be
/// smaller than `tol`.
pub fn find_point_in(sys: &BallSystem, target: &Ball, tol: f64) -> Result<Found> {
    check_dims(sys.dim(), target.dim())?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let norm = sys.norm();
    let tc = &target.center.0;
    let mut stack = vec![sys.root()];
    let mut visited = 0usize;
    while let Some(n) = stack.pop() {
        visited += 1;
        if visited > FIND_BUDGET {
            break;
        }
        if strictly_inside(&n.ball, target, norm) {
            if let Some(a) = &n.anchor {
                return Ok(Found { point: a.clone(), word: n.word.clone(), radius: n.ball.radius, residual: 0.0 });
            }
            if n.solid || n.ball.radius <= tol {
                let residual = if n.solid { 0.0 } else { n.ball.radius };
                return Ok(Found { point: n.ball.center.clone(), word: n.word.clone(), radius: n.ball.radius, residual });
            }
        }
        if n.ball.radius < 1e-3 * tol {
            continue;
        }
        let mut kids: Vec<(f64, Node)> = sys
            .children(&n)
            .into_iter()
            .map(|k| (norm.dist(&k.ball.center.0, tc) - k.ball.radius, k))
            .filter(|(gap, _)| *gap < target.radius)
            .collect();
        // farthest first onto the stack, so the nearest is popped next
        kids.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| b.1.word.cmp(&a.1.word)));
        stack.extend(kids.into_iter().map(|(_, k)| k));
    }
    Err(Error::Exhausted(format!("no node of the system found strictly inside {target:?}")))
}

/// Run-time knobs of [`intersect_with`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntersectOptions {
    /// Skip the up-front hypothesis check.
    pub assume_hypotheses: bool,
    /// Relative tolerance for hole enclosures.
    pub hole_tol: f64,
    pub hypotheses: HypothesisOptions,
}

impl Default for IntersectOptions {
    fn default() -> Self {
        IntersectOptions { assume_hypotheses: false, hole_tol: 1e-4, hypotheses: HypothesisOptions::default() }
    }
}

pub fn intersect(sys1: &BallSystem, sys2: &BallSystem, r: f64, tol: f64, max_steps: usize) -> Result<IntersectionCertificate> {
    intersect_with(sys1, sys2, r, tol, max_steps, IntersectOptions::default())
}

struct State {
    /// Index (0 or 1) of the system holding `α`.
    side: usize,
    alpha: Found,
    /// `S_L` in the other system.
    l: Node,
}

pub fn intersect_with(
    sys1: &BallSystem,
    sys2: &BallSystem,
    r: f64,
    tol: f64,
    max_steps: usize,
    opt: IntersectOptions,
) -> Result<IntersectionCertificate> {
    check_r(r)?;
    same_space(sys1, sys2)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !opt.assume_hypotheses {
        let rep = check_hypotheses_with(sys1, sys2, r, opt.hypotheses)?;
        if !rep.all_proven {
            return Err(Error::Hypothesis(describe_failures(&rep)));
        }
    }
    let systems = [sys1, sys2];
    let norm = sys1.norm();
    let shrink_by = 1.0 - 2.0 * r;

    let root2 = sys2.root();
    let alpha = find_point_in(sys1, &shrink(&root2.ball, shrink_by), tol)?;
    let mut st = State { side: 0, alpha, l: root2 };
    let mut trace =
        vec![TraceStep { step: 0, side: 1, word: Word::root(), radius: st.l.ball.radius, case: None }];

    for step in 1..=max_steps + 1 {
        let x = &st.alpha.point;
        let res = [dist_to_set(x, sys1, tol / 10.0)?, dist_to_set(x, sys2, tol / 10.0)?];
        if res[0].hi <= tol && res[1].hi <= tol {
            return Ok(IntersectionCertificate {
                witness: x.clone(),
                residual1: res[0],
                residual2: res[1],
                trace,
            });
        }
        if step > max_steps {
            break;
        }

        let a = systems[st.side];
        let b = systems[1 - st.side];
        let l = st.l.clone();
        let h_l = node_hole(b, &l, opt.hole_tol * l.ball.radius).hi;

        // S_k: the largest k with (1-2r) rad(S_k) ≥ h_L along α's chain
        let mut sk = a.root();
        if shrink_by * sk.ball.radius >= h_l {
            let mut depth = 0usize;
            while let Some(next) = chain_child(a, &st.alpha.word, depth, &sk) {
                if shrink_by * next.ball.radius < h_l {
                    break;
                }
                depth += 1;
                sk = next;
            }
        }

        let lr = l.ball.radius;
        let ambiguous = (sk.ball.radius - r * lr).abs() <= 1e-12 * lr;
        let case2_ok = shrink_by * sk.ball.radius >= h_l && ball_contains(&l.ball, &sk.ball, norm)?;
        let case = if sk.ball.radius < r * lr || (ambiguous && case2_ok) { Case::Case2 } else { Case::Case1 };

        match case {
            Case::Case2 => {
                if !case2_ok {
                    return Err(Error::Hypothesis(format!(
                        "step {step}: case 2 needs (1-2r) rad(S_k) = {} ≥ h_L = {h_l} and S_k ⊆ S_L",
                        shrink_by * sk.ball.radius
                    )));
                }
                let target = shrink(&sk.ball, shrink_by);
                let alpha = find_point_in(b, &target, tol)?;
                st = State { side: 1 - st.side, alpha, l: sk };
            }
            Case::Case1 => {
                let kids = b.children(&l);
                let min_child = kids.iter().map(|k| k.ball.radius).fold(f64::INFINITY, f64::min);
                let h_k = node_hole(a, &sk, opt.hole_tol * sk.ball.radius).hi;
                if !(h_k < shrink_by * min_child) {
                    return Err(Error::Hypothesis(format!(
                        "step {step}: h(S_k) ≤ {h_k} is not below (1-2r)·min child radius {}",
                        shrink_by * min_child
                    )));
                }
                let bridge = bridge_ball(&sk.ball, &l.ball, r, norm)?;
                let child = kids
                    .into_iter()
                    .find(|k| ball_contains(&bridge, &k.ball, norm).unwrap_or(false))
                    .ok_or_else(|| {
                        Error::Hypothesis(format!("step {step}: no child of S_L inside the bridge ball {bridge:?}"))
                    })?;
                let target = shrink(&child.ball, shrink_by);
                let alpha = find_point_in(a, &target, tol)?;
                st = State { side: st.side, alpha, l: child };
            }
        }
        trace.push(TraceStep {
            step,
            side: st.side as u8 + 1,
            word: st.l.word.clone(),
            radius: st.l.ball.radius,
            case: Some(case),
        });
    }
    Err(Error::StepLimit(max_steps))
}

/// Node at depth `depth + 1` on α's chain: a prefix of its word, then
/// first children below it.
fn chain_child(sys: &BallSystem, word: &Word, depth: usize, current: &Node) -> Option<Node> {
    let idx = word.0.get(depth).copied().unwrap_or(0);
    sys.children(current).into_iter().nth(idx as usize)
}

fn describe_failures(rep: &GapHypothesesReport) -> String {
    let mut out = Vec::new();
    if rep.hyp_tau.status != Verdict::Proven {
        out.push(format!(
            "(i) thickness product in [{}, {}] against 1/(1-2r)^2 = {} is {:?}",
            rep.hyp_tau.lhs.lo, rep.hyp_tau.lhs.hi, rep.hyp_tau.rhs, rep.hyp_tau.status
        ));
    }
    if rep.hyp_meet != Verdict::Proven {
        out.push(format!("(ii) C¹ ∩ (1-2r) S²_∅ ≠ ∅ is {:?}", rep.hyp_meet));
    }
    if rep.hyp_radii != Verdict::Proven {
        out.push("(iii) root radii comparison fails".into());
    }
    for (i, d) in [&rep.hyp_dense.0, &rep.hyp_dense.1].iter().enumerate() {
        if d.verdict != Verdict::Proven {
            out.push(format!("(iv) r-uniform denseness of system {} is {:?}", i + 1, d.verdict));
        }
    }
    out.join("; ")
}

/// `2r / (1-2r)`: every `t` in `[0, a·rad(S_∅)]` is a distance in every
/// direction.
pub fn distance_interval(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0 / 3.0) {
        return Err(invalid(format!("r must lie in (0, 1/3], got {r}")));
    }
    Ok(2.0 * r / (1.0 - 2.0 * r))
}

/// Points `e1, e2` of `C` with `e1 - e2 = t·v`, from the intersection of
/// `C` and `C + t·v`.
pub fn directional_distance_certificate(
    sys: &BallSystem,
    v: &Point,
    t: f64,
    r: f64,
    tol: f64,
) -> Result<DirectionalDistanceCertificate> {
    check_dims(sys.dim(), v.dim())?;
    let norm = sys.norm();
    if (norm.of(&v.0) - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("direction must be a unit vector, |v| = {}", norm.of(&v.0))));
    }
    let a = distance_interval(r)? * sys.root_ball().radius;
    if !(0.0..=a).contains(&t) {
        return Err(invalid(format!("t = {t} outside the certified interval [0, {a}]")));
    }
    if t == 0.0 {
        let p = sys.root().anchor.unwrap_or_else(|| sys.root_ball().center.clone());
        let res = dist_to_set(&p, sys, tol / 10.0)?;
        return Ok(DirectionalDistanceCertificate { v: v.clone(), t, e1: p.clone(), e2: p, residual: res.hi });
    }
    let shifted = sys.translate(&v.scale(t))?;
    let cert = intersect(sys, &shifted, r, tol, 200)?;
    let e1 = cert.witness.clone();
    let e2 = e1.add_scaled(-t, v);
    let r1 = dist_to_set(&e1, sys, tol / 10.0)?;
    let r2 = dist_to_set(&e2, sys, tol / 10.0)?;
    let gap = norm.dist(&e1.sub(&e2).0, &v.scale(t).0);
    Ok(DirectionalDistanceCertificate { v: v.clone(), t, e1, e2, residual: r1.hi.max(r2.hi).max(gap) })
}
