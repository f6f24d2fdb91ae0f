//! The `(α, β, c, ρ, H_M)` potential game: legality referee, Alice's
//! strategy for systems of balls, simulated matches with JSONL transcripts,
//! and the closed-form bounds built on winning sets.

mod alice;
mod bounds;
mod play;
mod transcript;

pub use alice::{alice_h_sets, alice_strategy, AliceStrategy, PassAlice, PropositionAlice};
pub use bounds::{
    best_intersection_bound, intersection_dim_bound, lambda_max, pattern_capacity, pattern_condition_holds,
    pattern_search_oracle, winning_dim_bound, BfsConstants, IntersectionDimBound, PatternQuery, WinningDimBound,
};
pub use play::{play, play_batch, BobStrategy, Classification, GameTranscript, PlayOptions, RandomBob, TargetBob};
pub use transcript::{map_transcript, read_jsonl, replay, to_jsonl};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, NormKind, SphereUnion};

#[cfg(test)]
mod tests;

/// Relative slack on every rule comparison, absorbing rounding in
/// transcripts mapped by similarities.
pub const REFEREE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub rho: f64,
    /// Maximum number of spheres in one erased set.
    pub m: usize,
    pub d: usize,
    pub norm: NormKind,
}

impl GameParams {
    pub fn new(alpha: f64, beta: f64, c: f64, rho: f64, m: usize, d: usize, norm: NormKind) -> Result<GameParams> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid(format!("beta must lie in (0,1), got {beta}")));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid(format!("c must be nonnegative, got {c}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("rho must be positive, got {rho}")));
        }
        if m == 0 || d == 0 {
            return Err(invalid("M and d must be at least 1"));
        }
        Ok(GameParams { alpha, beta, c, rho, m, d, norm })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BobMove {
    pub ball: Ball,
}

/// One erased set: the closed `rho`-neighbourhood of a sphere union.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Erasure {
    pub set: SphereUnion,
    pub rho: f64,
}

impl Erasure {
    /// Whether `p` lies in the closed neighbourhood, with slack in Alice's favour.
    pub fn covers(&self, p: &[f64], norm: NormKind) -> bool {
        self.set.dist(p, norm) <= self.rho + 1e-12
    }
}

/// Alice's answer; an empty list is a pass.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AliceMove {
    pub erased: Vec<Erasure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "player", rename_all = "snake_case")]
pub enum Move {
    Bob(BobMove),
    Alice(AliceMove),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefereeVerdict {
    Legal,
    Violation(String),
}

impl RefereeVerdict {
    pub fn is_legal(&self) -> bool {
        matches!(self, RefereeVerdict::Legal)
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + REFEREE_SLACK * b.abs().max(a.abs())
}

/// Judges `mv` played after `history`.
pub fn referee(mv: &Move, history: &[Move], params: &GameParams) -> RefereeVerdict {
    use RefereeVerdict::{Legal, Violation};
    let last_bob = history.iter().rev().find_map(|m| match m {
        Move::Bob(b) => Some(&b.ball),
        Move::Alice(_) => None,
    });
    match mv {
        Move::Bob(BobMove { ball }) => {
            if matches!(history.last(), Some(Move::Bob(_))) {
                return Violation("Bob moved twice in a row".into());
            }
            if ball.dim() != params.d {
                return Violation(format!("ball has dimension {}, game has {}", ball.dim(), params.d));
            }
            if !(ball.radius > 0.0 && ball.radius.is_finite() && ball.center.is_finite()) {
                return Violation("ball must be finite with positive radius".into());
            }
            match last_bob {
                None if !le(params.rho, ball.radius) => {
                    Violation(format!("first radius {} is below rho = {}", ball.radius, params.rho))
                }
                None => Legal,
                Some(prev) => {
                    if !le(params.beta * prev.radius, ball.radius) {
                        return Violation(format!(
                            "radius {} is below beta x previous = {}",
                            ball.radius,
                            params.beta * prev.radius
                        ));
                    }
                    let reach = params.norm.dist(&prev.center.0, &ball.center.0) + ball.radius;
                    if !le(reach, prev.radius) {
                        return Violation(format!("ball leaves the previous ball ({reach} > {})", prev.radius));
                    }
                    Legal
                }
            }
        }
        Move::Alice(AliceMove { erased }) => {
            let Some(Move::Bob(BobMove { ball })) = history.last() else {
                return Violation("Alice must answer a ball of Bob".into());
            };
            for (i, e) in erased.iter().enumerate() {
                if e.set.is_empty() || e.set.len() > params.m {
                    return Violation(format!("set {i} has {} spheres, M = {}", e.set.len(), params.m));
                }
                if e.set.spheres.iter().any(|s| s.center.dim() != params.d) {
                    return Violation(format!("set {i} has a sphere of the wrong dimension"));
                }
                if !(e.rho > 0.0 && e.rho.is_finite()) {
                    return Violation(format!("set {i} has radius {}", e.rho));
                }
            }
            let cap = params.alpha * ball.radius;
            if params.c == 0.0 {
                if erased.len() > 1 {
                    return Violation(format!("c = 0 allows one set, got {}", erased.len()));
                }
                if let Some(e) = erased.first() {
                    if !le(e.rho, cap) {
                        return Violation(format!("radius {} exceeds alpha x rho_m = {cap}", e.rho));
                    }
                }
            } else {
                // normalized ℓ^c budget: (Σ (ρ_i / αρ_m)^c)^{1/c} ≤ 1
                let s: f64 = erased.iter().map(|e| (e.rho / cap).powf(params.c)).sum();
                let norm = s.powf(1.0 / params.c);
                if !le(norm, 1.0) {
                    return Violation(format!(
                        "budget exceeded: (sum rho^c)^(1/c) = {} > alpha x rho_m = {cap}",
                        norm * cap
                    ));
                }
            }
            Legal
        }
    }
}

/// Bound `κ` on the number of disjoint level-`n` balls of radius `r_n` met
/// by a ball of radius at most `r_n`.
pub fn kappa(norm: NormKind, d: usize, configured: Option<usize>) -> Result<usize> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    match (norm, configured) {
        (_, Some(k)) if k >= 1 => Ok(k),
        (_, Some(_)) => Err(invalid("configured kappa must be at least 1")),
        (NormKind::Linf, None) if d < usize::BITS as usize => Ok(1usize << d),
        (NormKind::Linf, None) => Err(invalid("dimension too large for 2^d")),
        (n, None) => Err(Error::Hypothesis(format!("kappa for the {n:?} norm must be configured"))),
    }
}
