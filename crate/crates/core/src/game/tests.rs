use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ballsystem::{BallSystem, CornerFamilyParams, HomotheticIFS, Word};
use crate::geometry::{Point, Sphere};
use crate::metrics::dist_to_set;

fn corner(n: u32, ell: f64, d: usize) -> BallSystem {
    BallSystem::corner_family(CornerFamilyParams::new(n, ell, d).unwrap()).unwrap()
}

fn ball(c: &[f64], r: f64) -> Ball {
    Ball::new(Point::new(c.to_vec()), r).unwrap()
}

fn params(alpha: f64, beta: f64, c: f64, m: usize) -> GameParams {
    GameParams::new(alpha, beta, c, 0.1, m, 2, NormKind::Linf).unwrap()
}

fn erasure(rho: f64) -> Erasure {
    let s = Sphere::new(Point::new(vec![0.0, 0.0]), 0.5).unwrap();
    Erasure { set: SphereUnion::new(vec![s], 1).unwrap(), rho }
}

fn bob(c: &[f64], r: f64) -> Move {
    Move::Bob(BobMove { ball: ball(c, r) })
}

#[test]
fn referee_examples() {
    let p = params(1.0 / 3.0, 0.5, 0.0, 4);
    let h = vec![bob(&[0.0, 0.0], 0.3)];
    let mv = Move::Alice(AliceMove { erased: vec![erasure(0.1)] });
    assert_eq!(referee(&mv, &h, &p), RefereeVerdict::Legal);

    let h = vec![bob(&[0.0, 0.0], 0.5), Move::Alice(AliceMove::default())];
    assert!(!referee(&bob(&[0.0, 0.0], 0.2), &h, &p).is_legal());
    assert!(referee(&bob(&[0.0, 0.0], 0.25), &h, &p).is_legal());

    let p = params(1.0, 0.5, 0.5, 4);
    let h = vec![bob(&[0.0, 0.0], 1.0)];
    let mv = Move::Alice(AliceMove { erased: vec![erasure(0.5), erasure(0.5)] });
    assert!(!referee(&mv, &h, &p).is_legal());
}

#[test]
fn referee_flags_each_rule() {
    let p = params(0.5, 0.5, 0.0, 1);
    assert!(!referee(&bob(&[0.0, 0.0], 0.05), &[], &p).is_legal());
    let h = vec![bob(&[0.0, 0.0], 1.0), Move::Alice(AliceMove::default())];
    assert!(!referee(&bob(&[0.6, 0.0], 0.5), &h, &p).is_legal());
    assert!(referee(&bob(&[0.5, 0.0], 0.5), &h, &p).is_legal());
    assert!(!referee(&bob(&[0.0, 0.0], 0.5), &h[..1], &p).is_legal());
    let two = Move::Alice(AliceMove { erased: vec![erasure(0.1), erasure(0.1)] });
    assert!(!referee(&two, &h[..1], &p).is_legal());
    let big = Move::Alice(AliceMove { erased: vec![erasure(0.6)] });
    assert!(!referee(&big, &h[..1], &p).is_legal());
    assert!(!referee(&Move::Alice(AliceMove::default()), &h, &p).is_legal());
    let s = Sphere::new(Point::new(vec![0.0, 0.0]), 0.5).unwrap();
    let wide = Erasure { set: SphereUnion::new(vec![s.clone(), s], 2).unwrap(), rho: 0.1 };
    assert!(!referee(&Move::Alice(AliceMove { erased: vec![wide] }), &h[..1], &p).is_legal());
}

#[test]
fn kappa_examples() {
    assert_eq!(kappa(NormKind::Linf, 2, None).unwrap(), 4);
    assert_eq!(kappa(NormKind::Linf, 1, None).unwrap(), 2);
    assert!(kappa(NormKind::L2, 2, None).is_err());
    assert_eq!(kappa(NormKind::L2, 2, Some(7)).unwrap(), 7);
}

#[test]
fn kappa_bounds_random_disjoint_cubes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [1usize, 2] {
        let k = kappa(NormKind::Linf, d, None).unwrap();
        for _ in 0..300 {
            let r = 0.1;
            let mut cubes: Vec<Vec<f64>> = Vec::new();
            for _ in 0..400 {
                let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.4..0.4)).collect();
                if cubes.iter().all(|o| NormKind::Linf.dist(o, &c) > 2.0 * r) {
                    cubes.push(c);
                }
            }
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let rho = rng.gen_range(0.0..=r);
            let met = cubes.iter().filter(|c| NormKind::Linf.dist(c, &x) <= r + rho).count();
            assert!(met <= k, "d={d}: {met} cubes met");
        }
    }
}

#[test]
fn h_sets_of_corner_root() {
    let sys = corner(4, 0.4, 2);
    let h = alice_h_sets(&sys, &Word::root()).unwrap();
    assert_eq!(h.len(), 17);
    assert!((h.spheres[0].radius - (1.0 - 1.0 / 30.0)).abs() < 1e-6);
    for s in &h.spheres[1..] {
        assert!((s.radius - (0.2 + 1.0 / 15.0)).abs() < 1e-6);
    }
}

#[test]
fn h_sets_of_single_child_node() {
    let ifs = HomotheticIFS::new(vec![(0.5, Point::zeros(2))]);
    let sys = BallSystem::from_ifs(ifs, NormKind::Linf).unwrap();
    let h = alice_h_sets(&sys, &Word(vec![0])).unwrap();
    assert_eq!(h.len(), 2);
    assert!(h.len() <= h.bound);
}

#[test]
fn strategy_answers_each_level_once() {
    let sys = corner(4, 0.4, 2);
    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let b = ball(&[0.1, 0.2], 0.5);
    let mv = alice.respond(&b).unwrap();
    assert_eq!(mv.erased.len(), 1);
    let e = &mv.erased[0];
    assert_eq!(e.set.len(), 17);
    assert!(e.rho <= 0.5 / 3.0 && (e.rho - 1.0 / 15.0).abs() < 1e-6);
    assert!(alice.respond(&ball(&[0.1, 0.2], 0.4)).unwrap().erased.is_empty());
    assert!(alice.respond(&ball(&[0.1, 0.2], 2.0)).unwrap().erased.is_empty());
    assert!(alice_strategy(&sys, 3.5, 0.25).is_err());
    assert!(alice_strategy(&sys, 3.0, 0.1).is_err());
}

#[test]
fn strategy_erases_around_four_cubes() {
    let sys = corner(4, 0.4, 2);
    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    // level-1 cubes have radius 0.2 and centres ±0.3, ±0.9 per axis; this ball
    // sits across the gap between the four middle cubes
    let b = ball(&[0.0, 0.0], 0.15);
    assert_eq!(alice.level_of(0.15), 1);
    assert_eq!(alice.meeting(&b, 1).len(), 4);
    let mv = alice.respond(&b).unwrap();
    assert_eq!(mv.erased[0].set.len(), 4 * 17);
    assert!(mv.erased[0].set.len() <= alice.required_m());
}

#[test]
fn level_schedule() {
    let sys = corner(4, 0.4, 2);
    let alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    assert_eq!(alice.level_of(1.0), 0);
    assert_eq!(alice.level_of(0.2), 0);
    assert_eq!(alice.level_of(0.19999), 1);
    assert_eq!(alice.level_of(0.0401), 1);
    assert_eq!(alice.level_of(0.0399), 2);
}

fn corner_params(sys: &BallSystem, alice: &PropositionAlice) -> GameParams {
    // ρ = β rad(S_∅) makes Bob's first ball land in R_0
    GameParams::new(alice.alpha(), 0.25, 0.0, 0.25, alice.required_m(), sys.dim(), sys.norm()).unwrap()
}

#[test]
fn random_bobs_never_escape() {
    let sys = corner(4, 0.4, 2);
    let alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let p = corner_params(&sys, &alice);
    let seeds: Vec<u64> = (0..100).collect();
    let games = play_batch(&sys, 3.0, &p, &seeds, &PlayOptions::default()).unwrap();
    for g in &games {
        assert!(
            matches!(g.classification, Classification::InTarget | Classification::Erased),
            "{:?} {:?}",
            g.classification,
            g.violation
        );
        assert!(replay(&g.moves, &p).is_none());
    }
}

#[test]
fn targeted_bobs() {
    let sys = corner(4, 0.4, 2);
    let opts = PlayOptions::default();
    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let p = corner_params(&sys, &alice);
    let g = play(&sys, &mut alice, &mut TargetBob::corner_seeking(&sys), &p, &opts).unwrap();
    assert_eq!(g.classification, Classification::InTarget);

    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let g = play(&sys, &mut alice, &mut TargetBob::hole_seeking(&sys), &p, &opts).unwrap();
    assert_eq!(g.classification, Classification::Erased);
    // independent check: the centre is within h_∅ of a child sphere
    let h = alice_h_sets(&sys, &Word::root()).unwrap();
    assert!(h.dist(&[0.0, 0.0], NormKind::Linf) <= 1.0 / 15.0 + 1e-9);
    assert!(dist_to_set(&g.outcome, &sys, 1e-6).unwrap().lo > 0.05);
}

#[test]
fn passive_alice_loses_in_holes_and_stalling_is_flagged() {
    let sys = corner(4, 0.4, 2);
    let p = GameParams::new(1.0 / 3.0, 0.25, 0.0, 0.1, 68, 2, NormKind::Linf).unwrap();
    let g = play(&sys, &mut PassAlice, &mut TargetBob::hole_seeking(&sys), &p, &PlayOptions::default()).unwrap();
    assert_eq!(g.classification, Classification::Escaped);
    let short = PlayOptions { max_turns: 3, ..PlayOptions::default() };
    let g = play(&sys, &mut PassAlice, &mut RandomBob::new(1), &p, &short).unwrap();
    assert_eq!(g.classification, Classification::RadiusNotVanishing);
}

#[test]
fn transcripts_round_trip_and_map() {
    let sys = corner(4, 0.4, 2);
    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let p = corner_params(&sys, &alice);
    let g = play(&sys, &mut alice, &mut RandomBob::new(5), &p, &PlayOptions::default()).unwrap();
    let text = to_jsonl(&g.moves);
    assert_eq!(text.lines().count(), g.moves.len());
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["player"], "bob");
    assert_eq!(first["turn"], 0);
    let back = read_jsonl(&text).unwrap();
    assert_eq!(back.len(), g.moves.len());
    assert!(replay(&back, &p).is_none());

    let mapped = map_transcript(&g.moves, 0.37, &Point::new(vec![2.0, -1.0])).unwrap();
    let q = GameParams { rho: 0.37 * p.rho, ..p };
    assert!(replay(&mapped, &q).is_none());
}

#[test]
fn winning_bound_examples() {
    let k = BfsConstants::default();
    let b = winning_dim_bound(0.1, 0.25, 0.5, 2, k).unwrap();
    assert!(b.condition_met);
    assert!((b.lhs - 0.1f64.sqrt()).abs() < 1e-15 && (b.rhs - 0.5).abs() < 1e-15);
    assert!((b.bound.unwrap() - (2.0 - 0.1 / 4f64.ln())).abs() < 1e-12);
    assert!((b.bound.unwrap() - 1.927_865_247_955_551_8).abs() < 1e-12);
    let b = winning_dim_bound(100.0, 0.25, 0.5, 2, k).unwrap();
    assert!(!b.condition_met && b.bound.is_none());
    let b = winning_dim_bound(1e-12, 0.25, 0.5, 2, k).unwrap();
    assert!((b.bound.unwrap() - 2.0).abs() < 1e-11);
    assert!(winning_dim_bound(0.1, 0.5, 0.5, 2, k).is_err());
    assert!(winning_dim_bound(0.1, 0.25, 1.0, 2, k).is_err());
}

#[test]
fn intersection_bound_examples() {
    let k = BfsConstants::default();
    let b = intersection_dim_bound(&[17.1, 17.1], 0.5, 1.0, 0.25, 0.2, 2, k).unwrap();
    assert_eq!(b.beta0, 0.25);
    let sum = 2.0 / 17.1f64.sqrt();
    assert!((b.sum - sum).abs() < 1e-15 && b.condition_met);
    let expect = 2.0 - sum * sum / (0.25 * 4f64.ln());
    assert!((b.bound.unwrap() - expect).abs() < 1e-12);
    assert!((b.bound.unwrap() - 1.325_054_951_630_894_3).abs() < 1e-9);

    let b = intersection_dim_bound(&[2.0, 2.0, 2.0], 0.5, 1.0, 0.25, 0.2, 2, k).unwrap();
    assert!(!b.condition_met && b.bound.is_none());
    let b = intersection_dim_bound(&[1e30], 0.5, 1.0, 0.25, 0.2, 2, k).unwrap();
    assert!((b.bound.unwrap() - 2.0).abs() < 1e-12);
    assert!(intersection_dim_bound(&[17.1], 0.5, 1.0, 0.25, 0.3, 2, k).is_err());

    let best = best_intersection_bound(&[17.1, 17.1], 1.0, 0.25, 0.2, 2, k, 99).unwrap().unwrap();
    assert!(best.bound.unwrap() >= expect);
}

#[test]
fn capacity_examples() {
    let k = BfsConstants::default();
    assert_eq!(pattern_capacity(1000.0, k).unwrap(), 39);
    assert_eq!(pattern_capacity(std::f64::consts::E * 1.0001, k).unwrap(), 0);
    assert!(pattern_capacity(2.0, k).is_err());
    for tau in [10.0, 50.0, 1000.0, 1e5, 1e8] {
        let n = pattern_capacity(tau, k).unwrap();
        assert!(pattern_condition_holds(tau, n, k).unwrap(), "tau={tau} n={n}");
    }
}

#[test]
fn pattern_oracle_examples() {
    let sys = corner(4, 0.4, 1);
    let zero = [Point::new(vec![0.0])];
    let hits = pattern_search_oracle(&sys, &zero, 1.0, 0.125, 1e-6).unwrap();
    for x in &hits {
        assert!(dist_to_set(x, &sys, 1e-8).unwrap().hi <= 1e-6);
    }
    assert!(!hits.is_empty());

    let sys = corner(10, 0.19, 1);
    let a: Vec<Point> = (0..3).map(|i| Point::new(vec![i as f64])).collect();
    let hits = pattern_search_oracle(&sys, &a, 0.05, 1e-3, 1e-3).unwrap();
    assert!(!hits.is_empty());
    for x in &hits {
        for b in &a {
            let y = x.add_scaled(0.05, b);
            assert!(dist_to_set(&y, &sys, 1e-4).unwrap().hi <= 1e-3);
        }
    }
    assert!(pattern_search_oracle(&sys, &a, 0.4, 1e-3, 1e-3).is_err());
    assert_eq!(lambda_max(1.0, &a, NormKind::Linf).unwrap(), 0.375);
}
