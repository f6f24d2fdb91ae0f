#![allow(dead_code)]

use thickgap::ballsystem::CornerFamilyParams;

/// Brute-force sup-norm distance from `x` to the attractor of the corner
/// family, rooted at `[-1,1]^d` and translated by `shift`. Works only from
/// the IFS maps; returns `(lo, hi)` with `hi - lo <= 2 leaf`.
pub fn corner_dist(p: CornerFamilyParams, shift: &[f64], x: &[f64], leaf: f64) -> (f64, f64) {
    corner_dist_in(p, shift, 1.0, x, leaf)
}

/// As [`corner_dist`] for the copy of the attractor in `B[center, radius]`.
pub fn corner_dist_in(p: CornerFamilyParams, center: &[f64], radius: f64, x: &[f64], leaf: f64) -> (f64, f64) {
    let ifs = p.to_ifs();
    let maps: Vec<(f64, Vec<f64>)> = ifs.maps.iter().map(|(l, t)| (*l, t.0.clone())).collect();
    let d = x.len();
    let y: Vec<f64> = (0..d).map(|k| (x[k] - center[k]) / radius).collect();
    let leaf = leaf / radius;
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    // fixed point of the first map lies in the attractor
    let (l0, t0) = &maps[0];
    let fix: Vec<f64> = t0.iter().map(|t| t / (1.0 - l0)).collect();
    let mut upper = f64::INFINITY;
    let mut lower = f64::INFINITY;
    let mut stack = vec![(vec![0.0; d], 1.0f64)];
    while let Some((c, r)) = stack.pop() {
        let lb = (sup(&y, &c) - r).max(0.0);
        if lb > upper {
            continue;
        }
        let inside: Vec<f64> = (0..d).map(|k| c[k] + r * fix[k]).collect();
        upper = upper.min(sup(&y, &inside));
        if r <= leaf {
            lower = lower.min(lb);
            continue;
        }
        let mut kids: Vec<(f64, Vec<f64>, f64)> = maps
            .iter()
            .map(|(l, t)| {
                let cc: Vec<f64> = (0..d).map(|k| c[k] + r * t[k]).collect();
                ((sup(&y, &cc) - r * l).max(0.0), cc, r * l)
            })
            .collect();
        kids.sort_by(|a, b| b.0.total_cmp(&a.0));
        stack.extend(kids.into_iter().map(|(_, c, r)| (c, r)));
    }
    (radius * lower.min(upper), radius * upper)
}
