use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{alice_strategy, referee, AliceMove, AliceStrategy, BobMove, GameParams, Move, RefereeVerdict};
use crate::ballsystem::BallSystem;
use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, NormKind, Point};
use crate::metrics::dist_to_set;

/// Bob's side of a match.
pub trait BobStrategy {
    fn first(&mut self, sys: &BallSystem, params: &GameParams) -> Ball;
    fn next(&mut self, prev: &Ball, params: &GameParams) -> Ball;
}

/// Point at norm distance at most `reach` from the origin, drawn from the cube.
fn offset(rng: &mut ChaCha8Rng, d: usize, reach: f64, norm: NormKind) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let s = reach / norm.of(&v).max(1.0);
    v.into_iter().map(|x| x * s).collect()
}

/// Seeded random legal play: each radius is `q` times the previous one with
/// `q` uniform in `[β, (1 + β)/2]`, the center uniform in the allowed cube.
#[derive(Clone, Debug)]
pub struct RandomBob {
    rng: ChaCha8Rng,
}

impl RandomBob {
    pub fn new(seed: u64) -> RandomBob {
        RandomBob { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl BobStrategy for RandomBob {
    fn first(&mut self, sys: &BallSystem, params: &GameParams) -> Ball {
        let root = sys.root_ball();
        let r = if root.radius > params.rho { self.rng.gen_range(params.rho..=root.radius) } else { params.rho };
        let v = offset(&mut self.rng, root.dim(), root.radius, params.norm);
        Ball { center: root.center.add(&Point(v)), radius: r }
    }

    fn next(&mut self, prev: &Ball, params: &GameParams) -> Ball {
        let q = self.rng.gen_range(params.beta..=0.5 * (1.0 + params.beta));
        let r = q * prev.radius;
        let reach = (prev.radius - r) * (1.0 - 1e-9);
        let v = offset(&mut self.rng, prev.dim(), reach, params.norm);
        Ball { center: prev.center.add(&Point(v)), radius: r }
    }
}

/// Bob shrinking at the fastest legal rate toward a fixed point.
#[derive(Clone, Debug)]
pub struct TargetBob {
    pub target: Point,
}

impl TargetBob {
    /// The corner `c - r(1, …, 1)` of the root cube (Linf) or the point
    /// `c - r e_1` for other norms.
    pub fn corner_seeking(sys: &BallSystem) -> TargetBob {
        let root = sys.root_ball();
        let target = match sys.norm() {
            NormKind::Linf => root.center.0.iter().map(|x| x - root.radius).collect(),
            _ => {
                let mut t = root.center.0.clone();
                t[0] -= root.radius;
                t
            }
        };
        TargetBob { target: Point(target) }
    }

    /// The root center.
    pub fn hole_seeking(sys: &BallSystem) -> TargetBob {
        TargetBob { target: sys.root_ball().center.clone() }
    }
}

impl BobStrategy for TargetBob {
    fn first(&mut self, sys: &BallSystem, params: &GameParams) -> Ball {
        let root = sys.root_ball();
        Ball { center: root.center.clone(), radius: root.radius.max(params.rho) }
    }

    fn next(&mut self, prev: &Ball, params: &GameParams) -> Ball {
        let r = params.beta * prev.radius;
        let reach = (prev.radius - r) * (1.0 - 1e-12);
        let gap = params.norm.dist(&prev.center.0, &self.target.0);
        let t = if gap <= reach { 1.0 } else { reach / gap };
        let center = prev.center.add_scaled(t, &self.target.sub(&prev.center));
        Ball { center, radius: r }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    InTarget,
    Erased,
    IllegalBob,
    IllegalAlice,
    RadiusNotVanishing,
    /// Neither in the target nor erased: a breach of the winning property.
    Escaped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayOptions {
    pub max_turns: usize,
    /// The match stops once Bob's radius falls below this.
    pub radius_floor: f64,
    /// `dist(x_∞, C)` at or below this counts as in the target.
    pub target_tol: f64,
}

impl Default for PlayOptions {
    fn default() -> Self {
        PlayOptions { max_turns: 200, radius_floor: 1e-9, target_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameTranscript {
    pub params: GameParams,
    pub moves: Vec<Move>,
    /// Center of Bob's last legal ball.
    pub outcome: Point,
    pub final_radius: f64,
    pub classification: Classification,
    pub violation: Option<String>,
}

impl GameTranscript {
    pub fn bob_turns(&self) -> usize {
        self.moves.iter().filter(|m| matches!(m, Move::Bob(_))).count()
    }
}

/// Runs one match. The target set is `C ∪ (ℝ^d \ S_∅)`.
pub fn play(
    sys: &BallSystem,
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
    params: &GameParams,
    opts: &PlayOptions,
) -> Result<GameTranscript> {
    if params.d != sys.dim() || params.norm != sys.norm() {
        return Err(invalid("game parameters do not match the system's dimension and norm"));
    }
    if !(opts.radius_floor > 0.0 && opts.target_tol > 0.0) || opts.max_turns == 0 {
        return Err(invalid("play options must be positive"));
    }
    let mut moves: Vec<Move> = Vec::new();
    let mut last: Option<Ball> = None;
    let mut violation = None;
    let mut illegal = None;
    for _ in 0..opts.max_turns {
        let ball = match &last {
            None => bob.first(sys, params),
            Some(prev) => bob.next(prev, params),
        };
        let mv = Move::Bob(BobMove { ball: ball.clone() });
        if let RefereeVerdict::Violation(msg) = referee(&mv, &moves, params) {
            moves.push(mv);
            violation = Some(msg);
            illegal = Some(Classification::IllegalBob);
            break;
        }
        moves.push(mv);
        last = Some(ball.clone());
        if ball.radius < opts.radius_floor {
            break;
        }
        let answer: AliceMove = alice.respond(&ball)?;
        let mv = Move::Alice(answer);
        if let RefereeVerdict::Violation(msg) = referee(&mv, &moves, params) {
            moves.push(mv);
            violation = Some(msg);
            illegal = Some(Classification::IllegalAlice);
            break;
        }
        moves.push(mv);
    }
    let Some(fin) = last else {
        return Ok(GameTranscript {
            params: *params,
            outcome: sys.root_ball().center.clone(),
            final_radius: f64::INFINITY,
            classification: illegal.unwrap_or(Classification::IllegalBob),
            violation,
            moves,
        });
    };
    let classification = match illegal {
        Some(c) => c,
        None => classify(sys, &moves, &fin, params, opts)?,
    };
    Ok(GameTranscript {
        params: *params,
        moves,
        outcome: fin.center,
        final_radius: fin.radius,
        classification,
        violation,
    })
}

fn classify(
    sys: &BallSystem,
    moves: &[Move],
    fin: &Ball,
    params: &GameParams,
    opts: &PlayOptions,
) -> Result<Classification> {
    if fin.radius >= opts.radius_floor {
        return Ok(Classification::RadiusNotVanishing);
    }
    let x = &fin.center;
    let root = sys.root_ball();
    if params.norm.dist(&x.0, &root.center.0) > root.radius {
        return Ok(Classification::InTarget);
    }
    if dist_to_set(x, sys, 0.1 * opts.target_tol)?.hi <= opts.target_tol {
        return Ok(Classification::InTarget);
    }
    let erased = moves.iter().any(|m| match m {
        Move::Alice(a) => a.erased.iter().any(|e| e.covers(&x.0, params.norm)),
        Move::Bob(_) => false,
    });
    Ok(if erased { Classification::Erased } else { Classification::Escaped })
}

/// Plays Alice's proposition strategy with threshold `tau` against seeded
/// random Bobs, in parallel; results follow the order of `seeds`.
pub fn play_batch(
    sys: &BallSystem,
    tau: f64,
    params: &GameParams,
    seeds: &[u64],
    opts: &PlayOptions,
) -> Result<Vec<GameTranscript>> {
    let first = alice_strategy(sys, tau, params.beta)?;
    if params.rho < params.beta * sys.root_ball().radius * (1.0 - 1e-12) {
        return Err(Error::Hypothesis(format!(
            "rho = {} is below beta x rad(S_0) = {}",
            params.rho,
            params.beta * sys.root_ball().radius
        )));
    }
    if params.c != 0.0 || params.alpha < first.alpha() || params.m < first.required_m() {
        return Err(Error::Hypothesis(format!(
            "the strategy needs c = 0, alpha >= {} and M >= {}",
            first.alpha(),
            first.required_m()
        )));
    }
    seeds
        .par_iter()
        .map(|&seed| {
            let mut alice = alice_strategy(sys, tau, params.beta)?;
            let mut bob = RandomBob::new(seed);
            play(sys, &mut alice, &mut bob, params, opts)
        })
        .collect()
}
