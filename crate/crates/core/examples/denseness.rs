//! r-uniform denseness verdicts with witness balls.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::metrics::denseness_check;

fn main() -> thickgap::Result<()> {
    let sys = BallSystem::corner_family(CornerFamilyParams::new(4, 0.4, 2)?)?;
    for r in [7.0 / 15.0, 0.15, 0.99] {
        let rep = denseness_check(&sys, r, 1e-3, 3)?;
        print!("r = {r:.6}: {:?}", rep.verdict);
        if let Some(w) = &rep.witness {
            print!("  empty ball centred at {:?} radius {}", w.center.0, w.radius);
        }
        println!();
    }
    Ok(())
}
