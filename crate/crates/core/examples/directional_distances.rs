//! Pairs of points of C realising a prescribed distance in a prescribed direction.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::gaplemma::{directional_distance_certificate, distance_interval};
use thickgap::geometry::{NormKind, Point};

fn main() -> thickgap::Result<()> {
    let sys = BallSystem::corner_family(CornerFamilyParams::new(10, 0.19, 2)?)?;
    let r = 0.19556;
    let a = distance_interval(r)?;
    println!("every t in [0, {a:.6}] is realised in every direction");
    for k in 0..4 {
        let th = std::f64::consts::FRAC_PI_4 * k as f64;
        let v = [th.cos(), th.sin()];
        let s = NormKind::Linf.of(&v);
        let v = Point::new(vec![v[0] / s, v[1] / s]);
        let c = directional_distance_certificate(&sys, &v, 0.5 * a, r, 1e-6)?;
        println!("v = {:?}: e1 = {:?}, e2 = {:?}, residual {:.2e}", v.0, c.e1.0, c.e2.0, c.residual);
    }
    Ok(())
}
