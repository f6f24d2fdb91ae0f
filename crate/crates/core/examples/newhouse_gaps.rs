//! 1-D Cantor sets from gap lists: Newhouse thickness against the system of balls.
use thickgap::ballsystem::{newhouse_thickness, BallSystem, GapList1D};
use thickgap::metrics::thickness;

fn main() -> thickgap::Result<()> {
    let lists = [
        vec![(1.0 / 3.0, 2.0 / 3.0), (1.0 / 9.0, 2.0 / 9.0), (7.0 / 9.0, 8.0 / 9.0)],
        vec![(0.3, 0.45), (0.7, 0.75), (0.1, 0.12)],
        vec![(0.45, 0.55), (0.15, 0.25)],
    ];
    for gaps in lists {
        let gl = GapList1D::new((0.0, 1.0), gaps.clone())?;
        let nh = newhouse_thickness(&gl)?;
        let rep = thickness(&BallSystem::from_gaps_1d(gl)?, 8, 1e-9)?;
        println!("{gaps:?}\n  newhouse {nh:.12}  system [{:.12}, {:.12}]", rep.overall.lo, rep.overall.hi);
    }
    Ok(())
}
