//! Thickness under a C^1 perturbation, closed-form self-similar bounds and the 1-D comparison.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams, SmoothMap};
use thickgap::metrics::thickness;
use thickgap::selfsimilar::{biebler_thickness, corner_stats, perturbation_bound};

fn main() -> thickgap::Result<()> {
    let stats = corner_stats(4, 0.4, 2)?;
    println!("corner (4, 0.4): {stats:?}");
    let base = BallSystem::corner_family(CornerFamilyParams::new(4, 0.4, 2)?)?;
    for eps in [0.001, 0.01, 0.05] {
        let sys = base.perturbed_image(SmoothMap::sine_bump(), eps)?;
        let rep = thickness(&sys, 3, 0.1)?;
        println!(
            "eps = {eps}: certified tau >= {:.4}, closed-form bound {:.4}",
            rep.overall.lo,
            perturbation_bound(3.0, eps, 0.2)?
        );
    }
    let b = biebler_thickness(4, 0.4)?;
    println!("1-D comparison: tau_B = {:.6}, ratio {:.6}, floor {:.6}", b.tau_b, b.ratio, b.ratio_floor);
    Ok(())
}
