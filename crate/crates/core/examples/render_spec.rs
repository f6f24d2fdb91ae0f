//! JSON set-specs in, CSV geometry dumps out, and back again.
use thickgap::ballsystem::{parse_render_csv, render_csv, SetSpec};
use thickgap::geometry::NormKind;
use thickgap::metrics::thickness;

fn main() -> thickgap::Result<()> {
    let spec = SetSpec::from_json(
        r#"{"norm": "linf", "dimension": 1, "generator": {"type": "gaps1d", "hull": [0, 1], "gaps": [[0.4, 0.5], [0.1, 0.15]]}}"#,
    )?;
    let sys = spec.build()?;
    let csv = render_csv(&sys, 3);
    print!("{csv}");
    let back = parse_render_csv(&csv, NormKind::Linf)?;
    let (a, b) = (thickness(&sys, 3, 1e-9)?, thickness(&back, 3, 1e-9)?);
    println!("thickness {:.12} vs reloaded {:.12}", a.overall.lo, b.overall.lo);
    Ok(())
}
