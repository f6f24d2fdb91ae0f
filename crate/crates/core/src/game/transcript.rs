use serde_json::{json, Value};

use super::{referee, AliceMove, BobMove, Erasure, GameParams, Move, RefereeVerdict};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, Point, Sphere, SphereUnion};

/// One JSON object per move; `turn` counts Bob's balls from 0 and Alice's
/// answer carries the turn of the ball it answers.
pub fn to_jsonl(moves: &[Move]) -> String {
    let mut out = String::new();
    let mut turn = 0usize;
    for m in moves {
        let line = match m {
            Move::Bob(b) => {
                let v = json!({"turn": turn, "player": "bob", "ball": b.ball});
                turn += 1;
                v
            }
            Move::Alice(a) => {
                let erased: Vec<Value> =
                    a.erased.iter().map(|e| json!({"spheres": e.set.spheres, "rho": e.rho})).collect();
                json!({"turn": turn.saturating_sub(1), "player": "alice", "erased": erased})
            }
        };
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Parses the output of [`to_jsonl`]. Sphere-union bounds are set to the
/// number of spheres read.
pub fn read_jsonl(s: &str) -> Result<Vec<Move>> {
    let mut moves = Vec::new();
    for (i, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(line)?;
        let bad = |what: &str| Error::Parse(format!("line {}: {what}", i + 1));
        match v.get("player").and_then(Value::as_str) {
            Some("bob") => {
                let ball: Ball = serde_json::from_value(v.get("ball").cloned().ok_or_else(|| bad("missing ball"))?)?;
                moves.push(Move::Bob(BobMove { ball }));
            }
            Some("alice") => {
                let list = v.get("erased").and_then(Value::as_array).ok_or_else(|| bad("missing erased"))?;
                let mut erased = Vec::new();
                for e in list {
                    let spheres: Vec<Sphere> =
                        serde_json::from_value(e.get("spheres").cloned().ok_or_else(|| bad("missing spheres"))?)?;
                    let rho = e.get("rho").and_then(Value::as_f64).ok_or_else(|| bad("missing rho"))?;
                    let n = spheres.len();
                    erased.push(Erasure { set: SphereUnion::new(spheres, n)?, rho });
                }
                moves.push(Move::Alice(AliceMove { erased }));
            }
            _ => return Err(bad("player must be \"bob\" or \"alice\"")),
        }
    }
    Ok(moves)
}

/// Image of a transcript under `x ↦ scale·x + shift`.
pub fn map_transcript(moves: &[Move], scale: f64, shift: &Point) -> Result<Vec<Move>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("scale must be positive, got {scale}")));
    }
    let map = |p: &Point| -> Result<Point> {
        if p.dim() != shift.dim() {
            return Err(Error::DimensionMismatch { expected: shift.dim(), found: p.dim() });
        }
        Ok(p.scale(scale).add(shift))
    };
    moves
        .iter()
        .map(|m| {
            Ok(match m {
                Move::Bob(b) => Move::Bob(BobMove { ball: Ball::new(map(&b.ball.center)?, scale * b.ball.radius)? }),
                Move::Alice(a) => {
                    let mut erased = Vec::new();
                    for e in &a.erased {
                        let spheres = e
                            .set
                            .spheres
                            .iter()
                            .map(|s| Sphere::new(map(&s.center)?, scale * s.radius))
                            .collect::<Result<Vec<_>>>()?;
                        erased.push(Erasure { set: SphereUnion::new(spheres, e.set.bound)?, rho: scale * e.rho });
                    }
                    Move::Alice(AliceMove { erased })
                }
            })
        })
        .collect()
}

/// Runs the referee over a recorded match; returns the first violation.
pub fn replay(moves: &[Move], params: &GameParams) -> Option<(usize, String)> {
    for i in 0..moves.len() {
        if let RefereeVerdict::Violation(msg) = referee(&moves[i], &moves[..i], params) {
            return Some((i, msg));
        }
    }
    None
}
