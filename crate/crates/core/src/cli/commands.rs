use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::*;
use crate::ballsystem::{load_system, render_csv, BallSystem};
use crate::dimension::{dim_bound_caveat, dim_lower_bound, moran_exponent};
use crate::error::{invalid, Result};
use crate::game::{
    best_intersection_bound, intersection_dim_bound, lambda_max, pattern_capacity, pattern_search_oracle, play_batch,
    to_jsonl, winning_dim_bound, BfsConstants, Classification, GameParams, PlayOptions, PropositionAlice,
};
use crate::gaplemma::{check_hypotheses_with, directional_distance_certificate, distance_interval, intersect_with};
use crate::gaplemma::{GapHypothesesReport, HypothesisOptions, IntersectOptions};
use crate::geometry::{NormKind, Point};
use crate::metrics::{thickness, Verdict};

pub(super) fn dispatch(cfg: &RunConfig) -> Result<i32> {
    match cfg {
        RunConfig::Thickness(a) => cmd_thickness(cfg, a),
        RunConfig::Gapcheck(a) => cmd_gapcheck(cfg, a),
        RunConfig::Distances(a) => cmd_distances(cfg, a),
        RunConfig::Game(a) => cmd_game(cfg, a),
        RunConfig::Dims(a) => cmd_dims(cfg, a),
        RunConfig::Pattern(a) => cmd_pattern(cfg, a),
        RunConfig::Render(a) => cmd_render(a),
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout(text)?,
    }
    Ok(())
}

fn stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.write_all(b"\n")) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn report(cfg: &RunConfig, mut body: Value) -> Result<()> {
    body["config"] = serde_json::to_value(cfg)?;
    emit(cfg.common(), &serde_json::to_string_pretty(&body)?)
}

fn load(p: &Path) -> Result<BallSystem> {
    load_system(p).map_err(|e| match e {
        Error::Io(io) => Error::Parse(format!("{}: {io}", p.display())),
        other => other,
    })
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!("--{name} must be positive, got {x}")));
    }
    Ok(())
}

fn cmd_thickness(cfg: &RunConfig, a: &ThicknessArgs) -> Result<i32> {
    positive("tol", a.tol)?;
    let sys = load(&a.spec)?;
    let rep = thickness(&sys, a.depth, a.tol)?;
    let body = json!({
        "tau": {"lo": rep.overall.lo, "hi": rep.overall.hi, "depth": rep.depth, "converged": rep.converged},
        "method": rep.method,
        "all_depths": rep.all_depths,
        "lower_bound_all_depths": rep.lower_bound_all_depths,
        "per_node": rep.per_node,
    });
    report(cfg, body)?;
    Ok(if rep.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn verdicts(rep: &GapHypothesesReport) -> [Verdict; 5] {
    [rep.hyp_tau.status, rep.hyp_meet, rep.hyp_radii, rep.hyp_dense.0.verdict, rep.hyp_dense.1.verdict]
}

fn hypothesis_code(rep: &GapHypothesesReport) -> i32 {
    let v = verdicts(rep);
    if v.contains(&Verdict::Refuted) {
        EXIT_REFUTED
    } else if v.contains(&Verdict::Unknown) {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    }
}

fn cmd_gapcheck(cfg: &RunConfig, a: &GapcheckArgs) -> Result<i32> {
    if !(a.r > 0.0 && a.r < 0.5) {
        return Err(invalid(format!("--r must lie in (0, 1/2), got {}", a.r)));
    }
    positive("tol", a.tol)?;
    let (s1, s2) = (load(&a.spec)?, load(&a.spec2)?);
    let opts = HypothesisOptions { depth: a.depth, ..HypothesisOptions::default() };
    let rep = check_hypotheses_with(&s1, &s2, a.r, opts)?;
    let mut code = hypothesis_code(&rep);
    let mut body = json!({ "hypotheses": rep });
    if a.intersect && code == EXIT_OK {
        let io = IntersectOptions { assume_hypotheses: true, hypotheses: opts, ..IntersectOptions::default() };
        match intersect_with(&s1, &s2, a.r, a.tol, a.max_steps, io) {
            Ok(cert) => body["certificate"] = serde_json::to_value(&cert)?,
            Err(e) => {
                code = exit_code(&e).max(EXIT_NOT_CONVERGED);
                body["certificate_error"] = json!(e.to_string());
            }
        }
    }
    body["exit_code"] = json!(code);
    report(cfg, body)?;
    Ok(code)
}

fn unit_directions(d: usize, n: usize, norm: NormKind, seed: u64) -> Vec<Point> {
    let unit = |v: Vec<f64>| {
        let s = norm.of(&v);
        Point(v.into_iter().map(|x| x / s).collect())
    };
    match d {
        1 => vec![Point(vec![1.0]), Point(vec![-1.0])],
        2 => (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                unit(vec![th.cos(), th.sin()])
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| loop {
                    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    if norm.of(&v) > 1e-3 {
                        break unit(v);
                    }
                })
                .collect()
        }
    }
}

/// `j/(steps-1)`, so the grid covers both ends; a single step sits at the top.
fn grid_fraction(j: usize, steps: usize) -> f64 {
    if steps == 1 {
        1.0
    } else {
        j as f64 / (steps - 1) as f64
    }
}

fn cmd_distances(cfg: &RunConfig, a: &DistancesArgs) -> Result<i32> {
    let span = distance_interval(a.r)?;
    positive("tol", a.tol)?;
    if a.directions == 0 || a.steps == 0 {
        return Err(invalid("--directions and --steps must be at least 1"));
    }
    let sys = load(&a.spec)?;
    let limit = span * sys.root_ball().radius;
    let t_max = a.t_max.unwrap_or(limit);
    positive("t-max", t_max)?;
    let rep = check_hypotheses_with(&sys, &sys, a.r, HypothesisOptions::default())?;
    let code = hypothesis_code(&rep);
    if code != EXIT_OK {
        report(cfg, json!({ "hypotheses": rep, "exit_code": code }))?;
        return Ok(code);
    }
    let dirs = unit_directions(sys.dim(), a.directions, sys.norm(), a.common.seed);
    let jobs: Vec<(Point, f64)> = dirs
        .iter()
        .flat_map(|v| (0..a.steps).map(move |j| (v.clone(), t_max * grid_fraction(j, a.steps))))
        .collect();
    let rows: Vec<Value> = jobs
        .par_iter()
        .map(|(v, t)| {
            if *t > limit {
                return json!({"v": v, "t": t, "status": "out_of_scope"});
            }
            match directional_distance_certificate(&sys, v, *t, a.r, a.tol) {
                Ok(c) => {
                    let gap = sys.norm().dist(&c.e1.sub(&c.e2).0, &v.scale(*t).0);
                    let ok = gap <= a.tol && c.residual <= a.tol;
                    json!({
                        "v": v, "t": t, "status": if ok { "ok" } else { "failed" },
                        "e1": c.e1, "e2": c.e2, "residual": c.residual, "difference_error": gap,
                    })
                }
                Err(e) => json!({"v": v, "t": t, "status": "failed", "error": e.to_string()}),
            }
        })
        .collect();
    let count = |s: &str| rows.iter().filter(|r| r["status"] == s).count();
    let (ok, failed, out) = (count("ok"), count("failed"), count("out_of_scope"));
    let code = if failed == 0 { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let body = json!({
        "certified_endpoint": limit,
        "summary": {"certificates": ok, "failures": failed, "out_of_scope": out},
        "rows": rows,
        "exit_code": code,
    });
    report(cfg, body)?;
    Ok(code)
}

fn cmd_game(cfg: &RunConfig, a: &GameArgs) -> Result<i32> {
    let sys = load(&a.spec)?;
    let tau = match a.tau {
        Some(t) => t,
        None => thickness(&sys, 1, 1e-3)?.overall.lo,
    };
    positive("tau", tau)?;
    let beta = a.beta.or(sys.decay_ratio()).ok_or_else(|| invalid("--beta is required for this system"))?;
    let alice = PropositionAlice::new(&sys, tau, beta, None)?;
    let alpha = a.alpha.unwrap_or(1.0 / tau);
    let rho = a.rho.unwrap_or(beta * sys.root_ball().radius);
    let params = GameParams::new(alpha, beta, a.c, rho, alice.required_m(), sys.dim(), sys.norm())?;
    let opts = PlayOptions { max_turns: a.max_turns, ..PlayOptions::default() };
    let seeds: Vec<u64> = (0..a.transcripts as u64).map(|i| a.common.seed.wrapping_add(i)).collect();
    let games = play_batch(&sys, tau, &params, &seeds, &opts)?;
    if let Some(dir) = &a.jsonl_dir {
        std::fs::create_dir_all(dir)?;
        for (seed, g) in seeds.iter().zip(&games) {
            std::fs::write(dir.join(format!("game_{seed}.jsonl")), to_jsonl(&g.moves))?;
        }
    }
    let count = |c: Classification| games.iter().filter(|g| g.classification == c).count();
    let violations = count(Classification::IllegalBob) + count(Classification::IllegalAlice);
    let escaped = count(Classification::Escaped);
    let stalled = count(Classification::RadiusNotVanishing);
    let code = if violations + escaped > 0 {
        EXIT_REFUTED
    } else if stalled > 0 {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    };
    let per_game: Vec<Value> = seeds
        .iter()
        .zip(&games)
        .map(|(s, g)| {
            json!({"seed": s, "classification": g.classification, "turns": g.bob_turns(),
                   "outcome": g.outcome, "final_radius": g.final_radius, "violation": g.violation})
        })
        .collect();
    let body = json!({
        "tau": tau,
        "params": params,
        "matches": games.len(),
        "in_target": count(Classification::InTarget),
        "erased": count(Classification::Erased),
        "violations": violations,
        "escaped": escaped,
        "radius_not_vanishing": stalled,
        "games": per_game,
        "exit_code": code,
    });
    report(cfg, body)?;
    Ok(code)
}

fn cmd_dims(cfg: &RunConfig, a: &DimsArgs) -> Result<i32> {
    let k = BfsConstants::new(a.k1, a.k2)?;
    let mut body = json!({ "constants": {"K1": k.k1, "K2": k.k2, "note": "placeholder values, not known constants"} });
    let mut any = false;
    if let Some(tau) = a.tau {
        any = true;
        if let (Some(d), Some(m0)) = (a.dim, a.m0) {
            let v = dim_lower_bound(d, tau, m0)?;
            body["dim_lower_bound"] = json!({"d": d, "tau": tau, "m0": m0, "value": v, "caveat": dim_bound_caveat(d)});
        }
        if tau > std::f64::consts::E {
            body["pattern_capacity"] = json!({"tau": tau, "value": pattern_capacity(tau, k)?});
        }
    }
    if let Some(p) = &a.spec {
        any = true;
        let sys = load(p)?;
        let kids = sys.children(&sys.root());
        let ratios: Vec<f64> = kids.iter().map(|c| c.ball.radius / sys.root_ball().radius).collect();
        body["moran"] = serde_json::to_value(moran_exponent(&ratios, sys.dim())?)?;
    }
    if let Some(alpha) = a.alpha {
        any = true;
        let beta = a.beta.ok_or_else(|| invalid("--alpha needs --beta"))?;
        let c = a.c.ok_or_else(|| invalid("--alpha needs --c"))?;
        let d = a.dim.ok_or_else(|| invalid("--alpha needs --dim"))?;
        body["winning"] = serde_json::to_value(winning_dim_bound(alpha, beta, c, d, k)?)?;
    }
    if let Some(taus) = &a.taus {
        any = true;
        let d = a.dim.ok_or_else(|| invalid("--taus needs --dim"))?;
        let br = a.ball_radius.ok_or_else(|| invalid("--taus needs --ball-radius"))?;
        let sr = a.sup_ratio.ok_or_else(|| invalid("--taus needs --sup-ratio"))?;
        body["intersection"] = match a.c0 {
            Some(c0) => serde_json::to_value(intersection_dim_bound(taus, c0, a.root_radius, br, sr, d, k)?)?,
            None => serde_json::to_value(best_intersection_bound(taus, a.root_radius, br, sr, d, k, 999)?)?,
        };
    }
    if !any {
        return Err(invalid("nothing to evaluate: pass --tau, --spec, --alpha or --taus"));
    }
    report(cfg, body)?;
    Ok(EXIT_OK)
}

fn parse_pattern(s: &str) -> Result<Vec<Point>> {
    s.split(';')
        .map(|p| {
            p.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("pattern point {p:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
                .map(Point)
        })
        .collect()
}

fn cmd_pattern(cfg: &RunConfig, a: &PatternArgs) -> Result<i32> {
    let sys = load(&a.spec)?;
    let pts = parse_pattern(&a.pattern)?;
    let max = lambda_max(sys.root_ball().radius, &pts, sys.norm())?;
    let hits = pattern_search_oracle(&sys, &pts, a.lambda, a.grid_step, a.tol)?;
    let code = if hits.is_empty() { EXIT_UNKNOWN } else { EXIT_OK };
    let body = json!({"lambda_max": max, "count": hits.len(), "witnesses": hits, "exit_code": code});
    report(cfg, body)?;
    Ok(code)
}

fn cmd_render(a: &RenderArgs) -> Result<i32> {
    let sys = load(&a.spec)?;
    let csv = render_csv(&sys, a.depth);
    match &a.common.out {
        Some(p) => std::fs::write(p, csv)?,
        None => stdout(csv.trim_end())?,
    }
    Ok(EXIT_OK)
}
