//! Certified enclosures of `dist(x, C)`, hole radii and thickness, and
//! r-uniform denseness verdicts.

mod denseness;
mod hole;
mod search;
mod thickness;

pub use denseness::{denseness_check, DensenessReport, Verdict};
pub use hole::{hole_radius, node_hole, DEFAULT_BOX_BUDGET};
pub use search::{dist_to_set, nearest_point, Nearest, DEFAULT_NODE_BUDGET};
pub use thickness::{thickness, NodeRecord, ThicknessMethod, ThicknessReport};


/// Relative outward padding applied to every computed enclosure.
pub(crate) const ROUNDING: f64 = 4e-15;
