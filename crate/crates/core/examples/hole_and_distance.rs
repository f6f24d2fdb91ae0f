//! Distance-to-set enclosures and the hole radius of a node.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams, Word};
use thickgap::geometry::Point;
use thickgap::metrics::{dist_to_set, hole_radius, nearest_point, DEFAULT_NODE_BUDGET};

fn main() -> thickgap::Result<()> {
    let sys = BallSystem::corner_family(CornerFamilyParams::new(4, 0.4, 2)?)?;
    for x in [[0.0, 0.0], [-1.0, -1.0], [0.13, -0.71], [1.5, 0.0]] {
        let b = dist_to_set(&Point::new(x.to_vec()), &sys, 1e-9)?;
        println!("dist({x:?}, C) in [{:.10}, {:.10}]", b.lo, b.hi);
    }
    let n = nearest_point(&Point::new(vec![0.05, 0.3]), &sys, 1e-9, DEFAULT_NODE_BUDGET)?;
    println!("nearest point to (0.05, 0.3): {:?}", n.point.0);
    for w in [Word::root(), Word(vec![5]), Word(vec![5, 3])] {
        let h = hole_radius(&w, &sys, 1e-8)?;
        println!("h[{w}] in [{:.10}, {:.10}]", h.lo, h.hi);
    }
    Ok(())
}
