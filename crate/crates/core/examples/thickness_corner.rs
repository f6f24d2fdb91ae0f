//! Certified thickness of corner self-similar families.
use std::time::Instant;

use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::metrics::{hole_radius, thickness};

fn main() -> thickgap::Result<()> {
    for (n, ell, d) in [(4u32, 0.4, 2usize), (2, 2.0 / 3.0, 1), (10, 0.19, 2)] {
        let sys = BallSystem::corner_family(CornerFamilyParams::new(n, ell, d)?)?;
        let t0 = Instant::now();
        let rep = thickness(&sys, 5, 0.1)?;
        let closed = ell * (n as f64 - 1.0) / (2.0 - n as f64 * ell);
        println!(
            "n={n} ell={ell} d={d}: tau in [{:.6}, {:.6}] (closed form {closed:.6}), all depths: {}, {:.2?}",
            rep.overall.lo,
            rep.overall.hi,
            rep.all_depths,
            t0.elapsed()
        );
        let h = hole_radius(&thickgap::ballsystem::Word::root(), &sys, 1e-6)?;
        println!("  h_root in [{:.8}, {:.8}]", h.lo, h.hi);
    }
    Ok(())
}
