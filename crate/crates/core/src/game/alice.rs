use std::collections::BTreeSet;

use super::{kappa, AliceMove, Erasure};
use crate::ballsystem::{BallSystem, Node, Word};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, Sphere, SphereUnion};
use crate::metrics::node_hole;

/// Relative tolerance for the hole enclosures behind the H-sets.
const HOLE_TOL: f64 = 1e-7;

/// Alice's side of a match.
pub trait AliceStrategy {
    fn respond(&mut self, bob: &Ball) -> Result<AliceMove>;
}

/// Always passes.
#[derive(Clone, Copy, Debug, Default)]
pub struct PassAlice;

impl AliceStrategy for PassAlice {
    fn respond(&mut self, _bob: &Ball) -> Result<AliceMove> {
        Ok(AliceMove::default())
    }
}

fn h_spheres(sys: &BallSystem, node: &Node, h: f64) -> Result<Vec<Sphere>> {
    let mut out = Vec::new();
    let inner = node.ball.radius - 0.5 * h;
    if inner > 0.0 {
        out.push(Sphere::new(node.ball.center.clone(), inner)?);
    }
    for k in sys.children(node) {
        out.push(Sphere::new(k.ball.center, k.ball.radius + h)?);
    }
    Ok(out)
}

/// `H_I = ∂B(c_I, r_I - h_I/2) ∪ ⋃_i ∂B(c_{Ii}, r_{Ii} + h_I)`, with `h_I`
/// taken at the upper end of its enclosure.
pub fn alice_h_sets(sys: &BallSystem, word: &Word) -> Result<SphereUnion> {
    let node = sys.node(word)?;
    let h = node_hole(sys, &node, HOLE_TOL * node.ball.radius).hi;
    let spheres = h_spheres(sys, &node, h)?;
    let n0 = sys.max_children().unwrap_or(spheres.len().saturating_sub(1));
    SphereUnion::new(spheres, n0 + 1)
}

/// Alice's strategy from the winning proposition for systems whose level-`n`
/// balls are disjoint with common radius `r_n = r_0 λ^n`.
#[derive(Clone, Debug)]
pub struct PropositionAlice {
    sys: BallSystem,
    tau: f64,
    lambda: f64,
    kappa: usize,
    n0: usize,
    /// Upper end of `h_∅`.
    h_root: f64,
    answered: BTreeSet<usize>,
    clipped: usize,
}

/// Checks the hypotheses and returns the strategy with `κ = 2^d` (Linf).
pub fn alice_strategy(sys: &BallSystem, tau: f64, beta: f64) -> Result<PropositionAlice> {
    PropositionAlice::new(sys, tau, beta, None)
}

impl PropositionAlice {
    pub fn new(sys: &BallSystem, tau: f64, beta: f64, kappa_override: Option<usize>) -> Result<PropositionAlice> {
        let ifs = sys
            .homothetic_core()
            .ok_or_else(|| Error::Hypothesis("strategy needs a homothetic system".into()))?;
        let (lo, hi) = (ifs.min_ratio(), ifs.max_ratio());
        if hi - lo > 1e-15 * hi {
            return Err(Error::Hypothesis(format!("level radii differ: ratios span [{lo}, {hi}]")));
        }
        if !sys.siblings_disjoint_at_root() {
            return Err(Error::Hypothesis("same-level balls are not disjoint".into()));
        }
        if !(beta >= hi * (1.0 - 1e-12) && beta < 1.0) {
            return Err(Error::Hypothesis(format!("beta = {beta} outside [{hi}, 1)")));
        }
        let root = sys.root();
        let r0 = root.ball.radius;
        let h = node_hole(sys, &root, HOLE_TOL * r0);
        if !(h.hi > 0.0) {
            return Err(Error::Hypothesis("the root has no hole".into()));
        }
        // every node is similar to the root, so τ(C) = λ r_0 / h_∅
        let tau_max = hi * r0 / h.lo;
        if !(tau > 0.0 && tau <= tau_max * (1.0 + 1e-12)) {
            return Err(Error::Hypothesis(format!("tau = {tau} outside (0, {tau_max}]")));
        }
        Ok(PropositionAlice {
            sys: sys.clone(),
            tau,
            lambda: hi,
            kappa: kappa(sys.norm(), sys.dim(), kappa_override)?,
            n0: ifs.maps.len(),
            h_root: h.hi,
            answered: BTreeSet::new(),
            clipped: 0,
        })
    }

    /// `α = 1/τ`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.tau
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Sphere bound `M = κ (N_0 + 1)` the erased sets need.
    pub fn required_m(&self) -> usize {
        self.kappa * (self.n0 + 1)
    }

    /// Number of answers whose radius was cut down to `α ρ_m`.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    fn r(&self, n: usize) -> f64 {
        self.sys.root_ball().radius * self.lambda.powi(n as i32)
    }

    /// The `n` with `ρ ∈ R_n`, for `ρ ≤ r_0`.
    pub fn level_of(&self, rho: f64) -> usize {
        let mut n = ((self.r(0) / rho).ln() / (1.0 / self.lambda).ln()).floor().max(0.0) as usize;
        while n > 0 && rho >= self.r(n) {
            n -= 1;
        }
        while rho < self.r(n + 1) {
            n += 1;
        }
        n
    }

    /// Level-`n` nodes whose balls meet `b`.
    pub fn meeting(&self, b: &Ball, n: usize) -> Vec<Node> {
        let norm = self.sys.norm();
        let mut frontier = vec![self.sys.root()];
        frontier.retain(|x| x.ball.meets(b, norm));
        for _ in 0..n {
            frontier = frontier
                .iter()
                .flat_map(|x| self.sys.children(x))
                .filter(|x| x.ball.meets(b, norm))
                .collect();
        }
        frontier
    }
}

impl AliceStrategy for PropositionAlice {
    fn respond(&mut self, bob: &Ball) -> Result<AliceMove> {
        if bob.dim() != self.sys.dim() {
            return Err(invalid("ball dimension differs from the system"));
        }
        if bob.radius > self.r(0) {
            return Ok(AliceMove::default());
        }
        let n = self.level_of(bob.radius);
        if !self.answered.insert(n) {
            return Ok(AliceMove::default());
        }
        let nodes = self.meeting(bob, n);
        if nodes.len() > self.kappa {
            return Err(Error::Hypothesis(format!(
                "ball meets {} level-{n} balls, kappa = {}",
                nodes.len(),
                self.kappa
            )));
        }
        if nodes.is_empty() {
            return Ok(AliceMove::default());
        }
        // all level-n holes share the scaled root value
        let h = self.h_root * self.lambda.powi(n as i32);
        let mut spheres = Vec::new();
        for node in &nodes {
            spheres.extend(h_spheres(&self.sys, node, h)?);
        }
        let cap = bob.radius / self.tau;
        if h > cap {
            self.clipped += 1;
        }
        let set = SphereUnion::new(spheres, self.required_m())?;
        Ok(AliceMove { erased: vec![Erasure { set, rho: h.min(cap) }] })
    }
}
