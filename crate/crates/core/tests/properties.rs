mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thickgap::ballsystem::{newhouse_thickness, BallSystem, CornerFamilyParams, GapList1D, Word};
use thickgap::dimension::{dim_lower_bound, moran_exponent, natural_measure};
use thickgap::game::{
    alice_strategy, map_transcript, play, play_batch, referee, replay, AliceMove, BobMove, Erasure, GameParams, Move,
    PlayOptions, RandomBob,
};
use thickgap::gaplemma::{bridge_ball, intersect};
use thickgap::geometry::{ball_contains, dist_point_ball, Ball, NormKind, Point, Sphere, SphereUnion};
use thickgap::metrics::{denseness_check, dist_to_set, hole_radius, nearest_point, thickness, Verdict};
use thickgap::selfsimilar::{biebler_thickness, corner_stats, homothetic_h0_upper};

const NORMS: [NormKind; 3] = [NormKind::Linf, NormKind::L2, NormKind::L1];

fn corner(n: u32, ell: f64, d: usize) -> (CornerFamilyParams, BallSystem) {
    let p = CornerFamilyParams::new(n, ell, d).unwrap();
    (p, BallSystem::corner_family(p).unwrap())
}

/// `(n, ℓ)` with `ℓ` strictly inside `(0, 2/n)`.
fn corner_params() -> impl Strategy<Value = (u32, f64)> {
    (2u32..=5).prop_flat_map(|n| (Just(n), 0.05..0.95f64)).prop_map(|(n, f)| (n, f * 2.0 / n as f64))
}

fn pt(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, d)
}

fn gap_list() -> impl Strategy<Value = GapList1D> {
    prop::collection::vec(0.02..0.98f64, 2..16).prop_filter_map("gaps must be separated", |mut cuts| {
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        if cuts.len() % 2 == 1 {
            cuts.pop();
        }
        let gaps: Vec<(f64, f64)> = cuts.chunks(2).map(|c| (c[0], c[1])).collect();
        let ok = gaps.iter().all(|g| g.1 - g.0 > 1e-3) && gaps.windows(2).all(|w| w[1].0 - w[0].1 > 1e-3);
        if ok && !gaps.is_empty() {
            GapList1D::new((0.0, 1.0), gaps).ok()
        } else {
            None
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_metrics(a in pt(3), b in pt(3), c in pt(3)) {
        for norm in NORMS {
            let (ab, bc, ac) = (norm.dist(&a, &b), norm.dist(&b, &c), norm.dist(&a, &c));
            prop_assert!(ab >= 0.0 && norm.dist(&a, &a) == 0.0);
            prop_assert!((ab - norm.dist(&b, &a)).abs() <= 1e-12);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn containment_is_pointwise(c1 in pt(2), r1 in 0.1..2.0f64, c2 in pt(2), r2 in 0.01..2.0f64, seed in any::<u64>()) {
        let outer = Ball::new(Point::new(c1), r1).unwrap();
        let inner = Ball::new(Point::new(c2), r2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for norm in NORMS {
            if ball_contains(&outer, &inner, norm).unwrap() {
                for _ in 0..50 {
                    let v: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    let s = inner.radius * rng.gen_range(0.0..=1.0) / norm.of(&v).max(1e-9);
                    let p: Vec<f64> = (0..2).map(|k| inner.center.0[k] + s * v[k]).collect();
                    prop_assert!(norm.dist(&p, &outer.center.0) <= outer.radius * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn boundary_points_have_distance_zero(c in pt(3), r in 0.01..2.0f64, v in pt(3)) {
        prop_assume!(v.iter().any(|x| x.abs() > 1e-3));
        for norm in NORMS {
            let b = Ball::new(Point::new(c.clone()), r).unwrap();
            let s = r / norm.of(&v);
            let on: Vec<f64> = (0..3).map(|k| c[k] + s * v[k]).collect();
            prop_assert!(dist_point_ball(&Point::new(on), &b, norm).unwrap() <= 1e-12);
            let out: Vec<f64> = (0..3).map(|k| c[k] + 1.1 * s * v[k]).collect();
            prop_assert!(dist_point_ball(&Point::new(out), &b, norm).unwrap() > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn children_stay_inside_parents((n, ell) in corner_params(), d in 1usize..=2) {
        let (_, sys) = corner(n, ell, d);
        prop_assert!(sys.validate(2).is_ok());
        prop_assert_eq!(sys.level(2).len(), (n as usize).pow(2 * d as u32));
        sys.visit(2, &mut |node, kids| {
            for k in kids {
                assert!(k.ball.radius < node.ball.radius);
                let reach = NormKind::Linf.dist(&node.ball.center.0, &k.ball.center.0) + k.ball.radius;
                assert!(reach <= node.ball.radius * (1.0 + 1e-12));
            }
        });
    }

    #[test]
    fn newhouse_identity(gl in gap_list()) {
        let nh = newhouse_thickness(&gl).unwrap();
        let sys = BallSystem::from_gaps_1d(gl).unwrap();
        let b = thickness(&sys, sys.finite_height().unwrap(), 1e-10).unwrap().overall;
        prop_assert!(b.width() <= 1e-9);
        prop_assert!((b.midpoint() - nh).abs() <= 1e-9, "{} vs [{}, {}]", nh, b.lo, b.hi);
    }

    #[test]
    fn distance_enclosures_contain_the_oracle((n, ell) in corner_params(), x in pt(2)) {
        let (p, sys) = corner(n, ell, 2);
        let b = dist_to_set(&Point::new(x.clone()), &sys, 1e-6).unwrap();
        let (lo, hi) = common::corner_dist(p, &[0.0, 0.0], &x, 1e-7);
        prop_assert!(b.lo <= hi + 1e-12 && lo <= b.hi + 1e-12, "[{}, {}] vs oracle [{}, {}]", b.lo, b.hi, lo, hi);
    }

    #[test]
    fn larger_budget_never_widens((n, ell) in corner_params(), x in pt(2), b1 in 1usize..200, extra in 1usize..2000) {
        let (_, sys) = corner(n, ell, 2);
        let x = Point::new(x);
        let a = nearest_point(&x, &sys, 1e-15, b1).unwrap().bound;
        let b = nearest_point(&x, &sys, 1e-15, b1 + extra).unwrap().bound;
        prop_assert!(b.width() <= a.width() * (1.0 + 1e-9) + 1e-15);
        prop_assert!(b.lo >= a.lo - 1e-12 && b.hi <= a.hi + 1e-12);
    }

    #[test]
    fn thickness_is_similarity_invariant((n, ell) in corner_params(), s in 0.01..100.0f64, v in pt(2)) {
        let (_, sys) = corner(n, ell, 2);
        let a = thickness(&sys, 2, 0.01).unwrap().overall;
        for img in [sys.translate(&Point::new(v.clone())).unwrap(), sys.similarity_image(s, &Point::new(v.clone())).unwrap()] {
            let b = thickness(&img, 2, 0.01).unwrap().overall;
            prop_assert!((a.lo - b.lo).abs() <= 1e-12 * a.lo.abs().max(1.0));
            prop_assert!((a.hi - b.hi).abs() <= 1e-12 * a.hi.abs().max(1.0));
        }
    }

    #[test]
    fn proven_denseness_bounds_children_and_holes((n, ell) in corner_params(), d in 1usize..=2, bump in 0.0..0.05f64) {
        let (_, sys) = corner(n, ell, d);
        let r = corner_stats(n, ell, d).unwrap().r_dense + bump;
        prop_assume!(r < 1.0);
        let rep = denseness_check(&sys, r, 1e-3, 2).unwrap();
        if rep.verdict == Verdict::Proven {
            let tol = 1e-6;
            for node in sys.level(1).into_iter().chain([sys.root()]) {
                let rad = node.ball.radius;
                let kids = sys.children(&node);
                prop_assert!(kids.iter().all(|k| k.ball.radius <= r * rad * (1.0 + 1e-12)));
                let h = hole_radius(&node.word, &sys, tol * rad).unwrap();
                prop_assert!(h.hi <= 2.0 * r * rad + tol);
            }
        }
    }

    #[test]
    fn points_of_a_ball_are_near_its_part_of_c((n, ell) in corner_params(), seed in any::<u64>(), depth in 0usize..=2) {
        let (p, sys) = corner(n, ell, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let word = Word((0..depth).map(|_| rng.gen_range(0..n * n)).collect());
        let node = sys.node(&word).unwrap();
        let tol = 1e-7 * node.ball.radius;
        let h = hole_radius(&word, &sys, tol).unwrap();
        for _ in 0..8 {
            let x: Vec<f64> = node.ball.center.0.iter().map(|c| c + node.ball.radius * rng.gen_range(-1.0..=1.0)).collect();
            let (lo, _) = common::corner_dist_in(p, &node.ball.center.0, node.ball.radius, &x, tol);
            prop_assert!(lo <= 2.0 * h.hi + tol, "dist {} vs 2h = {}", lo, 2.0 * h.hi);
        }
    }

    #[test]
    fn h0_upper_dominates_the_hole((n, ell) in corner_params(), d in 1usize..=2) {
        let p = CornerFamilyParams::new(n, ell, d).unwrap();
        let h = homothetic_h0_upper(&p.to_ifs(), NormKind::Linf, 1e-6).unwrap();
        prop_assert!(h.hi >= p.gap() / 2.0 - 1e-9);
    }

    #[test]
    fn biebler_ratio_identity((n, ell) in corner_params()) {
        let st = corner_stats(n, ell, 2).unwrap();
        let b = biebler_thickness(n, ell).unwrap();
        prop_assert!((st.tau / b.tau_b - 2f64.powf(1.25) / st.g.sqrt()).abs() <= 1e-12 * b.ratio);
        prop_assert!(b.ratio >= b.ratio_floor * (1.0 - 1e-12));
    }

    #[test]
    fn bridge_ball_fits_both(r in 0.01..0.33f64, big in 0.1..3.0f64, k in 1.0..3.0f64, dir in pt(2), reach in 0.0..1.0f64) {
        prop_assume!(dir.iter().any(|x| x.abs() > 1e-3));
        for norm in NORMS {
            let sl = Ball::new(Point::new(vec![0.0, 0.0]), big).unwrap();
            let rk = k * r * big;
            let u = Point::new(dir.clone()).scale(1.0 / norm.of(&dir));
            // S_k meets (1-2r) S_L
            let center = u.scale(reach * ((1.0 - 2.0 * r) * big + rk));
            let sk = Ball::new(center, rk).unwrap();
            let out = bridge_ball(&sk, &sl, r, norm).unwrap();
            prop_assert!(out.radius >= r * big - 1e-12);
            let slack = Ball::new(out.center.clone(), out.radius * (1.0 - 1e-9)).unwrap();
            prop_assert!(ball_contains(&sk, &slack, norm).unwrap() && ball_contains(&sl, &slack, norm).unwrap());
        }
    }

    #[test]
    fn moran_residual_is_tiny(ratios in prop::collection::vec(0.01..0.9f64, 2..12), d in 1usize..=3) {
        let m = moran_exponent(&ratios, d).unwrap();
        prop_assert!(m.exponent > 0.0 && m.residual <= 1e-12);
    }

    #[test]
    fn measure_is_additive((n, ell) in corner_params(), d in 1usize..=2) {
        let (_, sys) = corner(n, ell, d);
        let depth = if d == 1 { 6 } else { 3 };
        let mu = natural_measure(&sys, depth).unwrap();
        prop_assert_eq!(mu.mass(&Word::root()), Some(1.0));
        sys.visit(depth - 1, &mut |node, kids| {
            let s: f64 = kids.iter().map(|k| mu.mass(&k.word).unwrap()).sum();
            assert!((s - mu.mass(&node.word).unwrap()).abs() <= 1e-12);
        });
    }

    #[test]
    fn dimension_formula_is_monotone(d in 1usize..=4, tau in 0.01..1e4f64, f in 1.01..10.0f64, m0 in 2u64..1000) {
        let v = dim_lower_bound(d, tau, m0).unwrap();
        prop_assert!(v > 0.0 && v < d as f64);
        prop_assert!(dim_lower_bound(d, tau * f, m0).unwrap() > v);
        prop_assert!(dim_lower_bound(d, tau, m0 + 1).unwrap() > v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn intersection_witnesses_are_sound(sx in -0.08..0.08f64, sy in -0.08..0.08f64) {
        let (p, a) = corner(10, 0.19, 2);
        let shift = [sx, sy];
        let b = a.translate(&Point::new(shift.to_vec())).unwrap();
        let r = 0.19556;
        let cert = intersect(&a, &b, r, 1e-6, 200).unwrap();
        for st in cert.trace.windows(2) {
            prop_assert!(st[1].radius <= r * st[0].radius * (1.0 + 1e-12));
        }
        let w = &cert.witness;
        prop_assert!(dist_to_set(w, &a, 1e-7).unwrap().hi <= 1e-6);
        prop_assert!(dist_to_set(w, &b, 1e-7).unwrap().hi <= 1e-6);
        prop_assert!(common::corner_dist(p, &[0.0, 0.0], &w.0, 5e-8).0 <= 1e-6);
        prop_assert!(common::corner_dist(p, &shift, &w.0, 5e-8).0 <= 1e-6);
    }
}

fn game_params() -> GameParams {
    GameParams::new(1.0 / 3.0, 0.25, 0.0, 0.25, 68, 2, NormKind::Linf).unwrap()
}

fn recorded(seed: u64) -> Vec<Move> {
    let (_, sys) = corner(4, 0.4, 2);
    let mut alice = alice_strategy(&sys, 3.0, 0.25).unwrap();
    let mut bob = RandomBob::new(seed);
    play(&sys, &mut alice, &mut bob, &game_params(), &PlayOptions::default()).unwrap().moves
}

fn last_bob_radius(history: &[Move]) -> f64 {
    history
        .iter()
        .rev()
        .find_map(|m| match m {
            Move::Bob(b) => Some(b.ball.radius),
            Move::Alice(_) => None,
        })
        .unwrap()
}

fn erasure(rho: f64) -> Erasure {
    let s = Sphere::new(Point::new(vec![0.0, 0.0]), 0.3).unwrap();
    Erasure { set: SphereUnion::new(vec![s], 1).unwrap(), rho }
}

/// Sets with radii `x_i α ρ_m` where `Σ x_i^c = 1`, the largest legal budget.
fn full_budget(weights: &[f64], c: f64, cap: f64) -> Vec<Erasure> {
    let s: f64 = weights.iter().map(|w| w.powf(c)).sum();
    weights.iter().map(|w| erasure(cap * w / s.powf(1.0 / c))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn referee_flags_every_isolated_violation(seed in any::<u64>(), pick in any::<u64>()) {
        let params = game_params();
        let moves = recorded(seed);
        prop_assert_eq!(replay(&moves, &params), None);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let bobs: Vec<usize> = (2..moves.len()).filter(|&i| matches!(moves[i], Move::Bob(_))).collect();
        let i = bobs[rng.gen_range(0..bobs.len())];
        let Move::Bob(BobMove { ball }) = &moves[i] else { unreachable!() };
        let Move::Bob(BobMove { ball: prev }) = &moves[i - 2] else { unreachable!() };
        let mut too_small = ball.clone();
        too_small.radius = rng.gen_range(0.01..0.99) * params.beta * prev.radius;
        let mut outside = ball.clone();
        outside.center.0[rng.gen_range(0..2)] += prev.radius * rng.gen_range(1.0..2.0);
        for bad in [too_small, outside] {
            let mut m = moves[..i].to_vec();
            m.push(Move::Bob(BobMove { ball: bad }));
            prop_assert_eq!(replay(&m, &params).map(|v| v.0), Some(i));
        }
        let cap = params.alpha * ball.radius;
        let over = vec![erasure(cap * rng.gen_range(1.001..3.0))];
        let two = vec![erasure(0.1 * cap), erasure(0.1 * cap)];
        let many = {
            let s = Sphere::new(Point::new(vec![0.0, 0.0]), 0.3).unwrap();
            vec![Erasure { set: SphereUnion::new(vec![s; params.m + 1], params.m + 1).unwrap(), rho: 0.1 * cap }]
        };
        for bad in [over, two, many] {
            let mut m = moves[..=i].to_vec();
            m.push(Move::Alice(AliceMove { erased: bad }));
            prop_assert_eq!(replay(&m, &params).map(|v| v.0), Some(i + 1));
        }
        let mut twice = moves[..=i].to_vec();
        twice.push(moves[i].clone());
        prop_assert_eq!(replay(&twice, &params).map(|v| v.0), Some(i + 1));
    }

    #[test]
    fn mapped_transcripts_stay_legal(seed in any::<u64>(), s in 0.001..1000.0f64, v in pt(2)) {
        let params = game_params();
        let moves = recorded(seed);
        let mapped = map_transcript(&moves, s, &Point::new(v)).unwrap();
        let scaled = GameParams { rho: s * params.rho, ..params };
        prop_assert_eq!(replay(&mapped, &scaled), None);
    }

    #[test]
    fn alice_moves_stay_legal_for_larger_parameters(
        seed in any::<u64>(),
        da in 0.0..1.0f64,
        db in 0.0..0.7f64,
        c in 0.0..1.0f64,
        dc in 0.0..1.0f64,
    ) {
        let params = game_params();
        let moves = recorded(seed);
        let (c, c2) = if c < 0.2 { (0.0, dc) } else { (c, (c + dc).min(1.0)) };
        let base = GameParams { c, ..params };
        let bigger = GameParams { alpha: base.alpha + da, beta: base.beta + db, c: c2, rho: base.rho * 1.5, m: base.m + 3, ..base };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..moves.len() {
            let mv = match &moves[i] {
                Move::Alice(_) if c > 0.0 => {
                    let cap = base.alpha * last_bob_radius(&moves[..i]);
                    let w: Vec<f64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0.1..1.0)).collect();
                    Move::Alice(AliceMove { erased: full_budget(&w, c, cap) })
                }
                Move::Alice(_) => moves[i].clone(),
                Move::Bob(_) => continue,
            };
            prop_assert!(referee(&mv, &moves[..i], &base).is_legal());
            prop_assert!(referee(&mv, &moves[..i], &bigger).is_legal());
        }
    }

    #[test]
    fn union_of_strategies_meets_combined_budget(
        alphas in prop::collection::vec(0.01..0.5f64, 1..5),
        c in 0.1..1.0f64,
        rho_m in 0.001..10.0f64,
        seed in any::<u64>(),
    ) {
        let alpha = alphas.iter().map(|a| a.powf(c)).sum::<f64>().powf(1.0 / c);
        let params = GameParams::new(alpha, 0.25, c, 1e-6, 1, 2, NormKind::Linf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut erased = Vec::new();
        for a in &alphas {
            let w: Vec<f64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0.1..1.0)).collect();
            erased.extend(full_budget(&w, c, a * rho_m));
        }
        let bob = Move::Bob(BobMove { ball: Ball::new(Point::new(vec![0.0, 0.0]), rho_m).unwrap() });
        let answer = Move::Alice(AliceMove { erased });
        prop_assert!(referee(&answer, &[bob], &params).is_legal());
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (_, sys) = corner(4, 0.4, 2);
    let seeds: Vec<u64> = (0..24).collect();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let games = play_batch(&sys, 3.0, &game_params(), &seeds, &PlayOptions::default()).unwrap();
            let t = thickness(&sys, 3, 1e-3).unwrap();
            (serde_json::to_string(&games).unwrap(), serde_json::to_string(&t).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn multi_step_trace_contracts() {
    let (_, a) = corner(10, 0.19, 2);
    let b = a.translate(&Point::new(vec![0.026, 0.03562])).unwrap();
    let r = 0.19556;
    let cert = intersect(&a, &b, r, 1e-6, 200).unwrap();
    assert!(cert.trace.len() >= 2);
    for st in cert.trace.windows(2) {
        assert!(st[1].radius <= r * st[0].radius);
    }
}
