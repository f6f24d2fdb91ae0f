//! Dimension lower bounds from thickness, Moran exponents and the natural measure.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams, Word};
use thickgap::dimension::{dim_bound_caveat, dim_lower_bound, measure_ball_bound_check, moran_exponent, natural_measure, uniform_beta};

fn main() -> thickgap::Result<()> {
    for (d, tau, m0) in [(1usize, 1.0, 2u64), (1, 3.0, 4), (2, 3.0, 16)] {
        let v = dim_lower_bound(d, tau, m0)?;
        println!("d={d} tau={tau} M0={m0}: {v:.10}");
        if let Some(c) = dim_bound_caveat(d) {
            println!("  note: {c}");
        }
    }
    let m = moran_exponent(&[0.2; 16], 2)?;
    println!("16 x 0.2 in the plane: exponent {:.12} (log16/log5 = {:.12})", m.exponent, 16f64.ln() / 5f64.ln());

    let sys = BallSystem::corner_family(CornerFamilyParams::new(2, 2.0 / 3.0, 1)?)?;
    let mu = natural_measure(&sys, 4)?;
    println!("mu(S_0) = {:?}, mu(S_0.1.1) = {:?}", mu.mass(&Word(vec![0])), mu.mass(&Word(vec![0, 1, 1])));
    let beta = uniform_beta(1.0, 2)?;
    let rep = measure_ball_bound_check(&sys, None, beta, 200, 7)?;
    println!("mu(B) <= c rad(B)^(d beta) on samples: {rep:?}");
    Ok(())
}
