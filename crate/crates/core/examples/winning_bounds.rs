//! Winning-set, intersection and pattern-capacity bounds with K1 = K2 = 1.
use thickgap::game::{best_intersection_bound, intersection_dim_bound, pattern_capacity, winning_dim_bound, BfsConstants};

fn main() -> thickgap::Result<()> {
    let k = BfsConstants::default();
    let w = winning_dim_bound(0.1, 0.25, 0.5, 2, k)?;
    println!("winning: {} <= {} -> {:?}", w.lhs, w.rhs, w.bound);
    let i = intersection_dim_bound(&[17.1, 17.1], 0.5, 1.0, 0.25, 0.2, 2, k)?;
    println!("two sets of thickness 17.1: sum {:.10} -> {:?}", i.sum, i.bound);
    if let Some(b) = best_intersection_bound(&[17.1, 17.1], 1.0, 0.25, 0.2, 2, k, 999)? {
        println!("  best over c0: c0 = {:.3} -> {:?}", b.c0, b.bound);
    }
    for tau in [10.0, 1000.0, 1e6] {
        println!("N({tau}) = {}", pattern_capacity(tau, k)?);
    }
    Ok(())
}
