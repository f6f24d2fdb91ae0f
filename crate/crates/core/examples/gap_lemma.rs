//! Gap-lemma hypotheses and an intersection witness for a set and its translate.
use std::time::Instant;

use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::gaplemma::{check_hypotheses, intersect};
use thickgap::geometry::Point;
use thickgap::metrics::dist_to_set;

fn main() -> thickgap::Result<()> {
    let a = BallSystem::corner_family(CornerFamilyParams::new(10, 0.19, 2)?)?;
    let b = a.translate(&Point::new(vec![0.05, 0.02]))?;
    let r = 0.19556;
    let t0 = Instant::now();
    let rep = check_hypotheses(&a, &b, r)?;
    println!(
        "tau product in [{:.3}, {:.3}] vs {:.6}: {:?}; meet {:?}; dense {:?}/{:?}",
        rep.hyp_tau.lhs.lo,
        rep.hyp_tau.lhs.hi,
        rep.hyp_tau.rhs,
        rep.hyp_tau.status,
        rep.hyp_meet,
        rep.hyp_dense.0.verdict,
        rep.hyp_dense.1.verdict
    );
    let cert = intersect(&a, &b, r, 1e-6, 100)?;
    println!("witness {:?} after {} steps ({:.2?})", cert.witness.0, cert.trace.len(), t0.elapsed());
    for sys in [&a, &b] {
        let d = dist_to_set(&cert.witness, sys, 1e-8)?;
        println!("  residual <= {:.3e}", d.hi);
    }
    Ok(())
}
