//! JSON set-specs and the CSV geometry dump.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Ball, NormKind, Point};

use super::{BallSystem, CornerFamilyParams, ExplicitTree, GapList1D, HomotheticIFS, Word};

/// `{"norm": …, "dimension": …, "generator": {…}}`, with an optional
/// `"translate": [v…]` applied after construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default)]
    pub norm: NormKind,
    pub dimension: usize,
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    Corner { n: u32, ell: f64 },
    Ifs { maps: Vec<MapSpec> },
    Gaps1d { hull: [f64; 2], gaps: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub lambda: f64,
    pub t: Vec<f64>,
}

impl SetSpec {
    pub fn from_json(text: &str) -> Result<SetSpec> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("set-spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("set-spec serializes")
    }

    pub fn build(&self) -> Result<BallSystem> {
        let d = self.dimension;
        if d == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        let sys = match &self.generator {
            GeneratorSpec::Corner { n, ell } => {
                if self.norm != NormKind::Linf {
                    return Err(invalid("the corner family is defined for the linf norm"));
                }
                BallSystem::corner_family(CornerFamilyParams::new(*n, *ell, d)?)?
            }
            GeneratorSpec::Ifs { maps } => {
                let maps = maps
                    .iter()
                    .map(|m| {
                        if m.t.len() != d {
                            return Err(Error::DimensionMismatch { expected: d, found: m.t.len() });
                        }
                        Ok((m.lambda, Point(m.t.clone())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                BallSystem::from_ifs(HomotheticIFS::new(maps), self.norm)?
            }
            GeneratorSpec::Gaps1d { hull, gaps } => {
                if d != 1 {
                    return Err(invalid("gaps1d specs must have dimension 1"));
                }
                let gl = GapList1D::new((hull[0], hull[1]), gaps.iter().map(|g| (g[0], g[1])).collect())?;
                BallSystem::from_gaps_1d(gl)?
            }
        };
        match &self.translate {
            Some(v) => sys.translate(&Point(v.clone())),
            None => Ok(sys),
        }
    }
}

/// Load a system from a JSON set-spec, or from a CSV dump written by
/// [`render_csv`] when the path ends in `.csv`.
pub fn load_system(path: &Path) -> Result<BallSystem> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_render_csv(&text, NormKind::Linf)
    } else {
        SetSpec::from_json(&text)?.build()
    }
}

/// One row `word,c_1,…,c_d,radius` per ball with `|I| ≤ depth`, preceded by
/// a header. The root word is the empty string.
pub fn render_csv(sys: &BallSystem, depth: usize) -> String {
    let mut out = String::from("word");
    for k in 0..sys.dim() {
        let _ = write!(out, ",c{k}");
    }
    out.push_str(",radius\n");
    sys.visit(depth, &mut |node, _| {
        let _ = write!(out, "{}", node.word);
        for c in &node.ball.center.0 {
            let _ = write!(out, ",{c:?}");
        }
        let _ = writeln!(out, ",{:?}", node.ball.radius);
    });
    out
}

/// Rebuild an explicit finite tree from [`render_csv`] output. Leaves of the
/// dump become solid balls of the reconstructed set.
pub fn parse_render_csv(text: &str, norm: NormKind) -> Result<BallSystem> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols = header.split(',').count();
    if cols < 3 || !header.starts_with("word") {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let d = cols - 2;
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::Parse(format!("row {}: expected {cols} fields", lineno + 2)));
        }
        let nums = fields[1..]
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2))))
            .collect::<Result<Vec<_>>>()?;
        let ball = Ball::new(Point(nums[..d].to_vec()), nums[d])?;
        entries.push((Word::parse(fields[0])?, ball));
    }
    BallSystem::from_explicit(ExplicitTree::from_nodes(entries)?, norm)
}
