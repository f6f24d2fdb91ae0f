//! Grid search for homothetic copies x + lambda A inside a thick Cantor set.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::game::{lambda_max, pattern_search_oracle};
use thickgap::geometry::Point;

fn main() -> thickgap::Result<()> {
    let sys = BallSystem::corner_family(CornerFamilyParams::new(10, 0.19, 1)?)?;
    let a: Vec<Point> = (0..3).map(|i| Point::new(vec![i as f64])).collect();
    println!("admissible lambda < {}", lambda_max(1.0, &a, sys.norm())?);
    let hits = pattern_search_oracle(&sys, &a, 0.05, 1e-3, 1e-6)?;
    println!("{} witnesses; first few:", hits.len());
    for x in hits.iter().take(5) {
        println!("  x = {:.4}: {{x, x + 0.05, x + 0.1}} within 1e-6 of C", x.0[0]);
    }
    Ok(())
}
