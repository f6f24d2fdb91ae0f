//! Systems of balls: recursive trees of closed norm balls generating a
//! compact set `C = ⋂_n ⋃_{|I|=n} S_I`.
//!
//! Trees are infinite in general, so nodes are produced on demand from the
//! generator; nothing is materialized beyond what a caller walks. Each node
//! may carry an *anchor*: a point known to lie in `C ∩ S_I`. Anchors give the
//! distance searches in [`crate::metrics`] their upper bounds.

mod gaps;
mod spec;

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{check_dims, contains_with_slack, Ball, IntervalBound, NormKind, Point};

pub use gaps::{newhouse_thickness, GapList1D};
pub use spec::{load_system, parse_render_csv, render_csv, GeneratorSpec, MapSpec, SetSpec};

/// Finite sequence of child indices; the empty word is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn root() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Word {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.0.len())].to_vec())
    }

    /// Parse the dotted form written by [`Display`], e.g. `"3.0.12"`.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::root());
        }
        s.split('.')
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("word {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Homothetic IFS `f_i(x) = λ_i x + t_i` with `f_i(B[0,1]) = B[t_i, λ_i] ⊆ B[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotheticIFS {
    pub maps: Vec<(f64, Point)>,
}

impl HomotheticIFS {
    pub fn new(maps: Vec<(f64, Point)>) -> HomotheticIFS {
        HomotheticIFS { maps }
    }

    pub fn dim(&self) -> usize {
        self.maps.first().map_or(0, |(_, t)| t.dim())
    }

    pub fn min_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.0).fold(0.0, f64::max)
    }

    fn validate(&self, norm: NormKind) -> Result<()> {
        let d = self.dim();
        if self.maps.is_empty() || d == 0 {
            return Err(invalid("IFS needs at least one map in dimension >= 1"));
        }
        for (i, (lambda, t)) in self.maps.iter().enumerate() {
            check_dims(d, t.dim())?;
            if !(*lambda > 0.0 && *lambda < 1.0) {
                return Err(invalid(format!("map {i}: ratio {lambda} outside (0,1)")));
            }
            if norm.of(&t.0) + lambda > 1.0 + 1e-12 {
                return Err(Error::InvalidSystem(format!(
                    "map {i} sends the unit ball outside itself (|t| + λ = {})",
                    norm.of(&t.0) + lambda
                )));
            }
        }
        Ok(())
    }

    /// Fixed points `t_i / (1 - λ_i)` on the unit sphere (all of them if none
    /// lies there). For cubes only the most extreme ones are kept: those
    /// with the largest number of coordinates equal to ±1.
    pub fn fixed_points(&self, norm: NormKind) -> Vec<Point> {
        let all: Vec<Point> = self.maps.iter().map(|(l, t)| t.scale(1.0 / (1.0 - l))).collect();
        let outer: Vec<Point> = all.iter().filter(|p| norm.of(&p.0) >= 1.0 - 1e-12).cloned().collect();
        if outer.is_empty() {
            return all;
        }
        if norm != NormKind::Linf {
            return outer;
        }
        let faces = |p: &Point| p.0.iter().filter(|x| x.abs() >= 1.0 - 1e-12).count();
        let most = outer.iter().map(faces).max().unwrap_or(0);
        outer.into_iter().filter(|p| faces(p) == most).collect()
    }

    /// Fixed point of the first map; it belongs to the attractor.
    fn anchor(&self) -> Point {
        let (lambda, t) = &self.maps[0];
        t.scale(1.0 / (1.0 - lambda))
    }
}

/// Parameters of the corner family: `n^d` equidistant cubes of relative
/// radius `ℓ/2` in `[-1,1]^d`, corners preserved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerFamilyParams {
    pub n: u32,
    pub ell: f64,
    pub d: usize,
}

impl CornerFamilyParams {
    pub fn new(n: u32, ell: f64, d: usize) -> Result<CornerFamilyParams> {
        if n < 2 {
            return Err(invalid(format!("corner family needs n >= 2, got {n}")));
        }
        if !(ell > 0.0 && ell < 2.0 / n as f64) {
            return Err(invalid(format!("corner family needs 0 < ell < 2/n, got ell = {ell}")));
        }
        if d == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        Ok(CornerFamilyParams { n, ell, d })
    }

    /// Gap between consecutive cubes along an axis, relative to the parent radius.
    pub fn gap(&self) -> f64 {
        (2.0 - self.n as f64 * self.ell) / (self.n as f64 - 1.0)
    }

    /// Child center offsets along one axis.
    pub fn axis_centers(&self) -> Vec<f64> {
        let g = self.gap();
        (0..self.n).map(|k| -1.0 + self.ell / 2.0 + k as f64 * (self.ell + g)).collect()
    }

    /// The same set as a homothetic IFS (row-major over axes, last axis fastest).
    pub fn to_ifs(&self) -> HomotheticIFS {
        let axis = self.axis_centers();
        let n = self.n as usize;
        let count = n.pow(self.d as u32);
        let maps = (0..count)
            .map(|mut idx| {
                let mut t = vec![0.0; self.d];
                for k in (0..self.d).rev() {
                    t[k] = axis[idx % n];
                    idx /= n;
                }
                (self.ell / 2.0, Point(t))
            })
            .collect();
        HomotheticIFS { maps }
    }
}

/// Smooth map handle used by [`BallSystem::perturbed_image`].
#[derive(Clone)]
pub struct SmoothMap {
    pub name: String,
    f: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl SmoothMap {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        SmoothMap { name: name.into(), f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        SmoothMap::new("identity", |x| x.to_vec())
    }

    /// `f_k(x) = x_k + 0.005 sin(x_k + x_{k+1}/2)` (indices mod d; `x + 0.005 sin(1.5x)` for d = 1).
    ///
    /// Every row of `Df - I` has absolute sum at most 0.0075, so the map
    /// satisfies `‖Df - I‖_∞ < 0.01` everywhere.
    pub fn sine_bump() -> Self {
        SmoothMap::new("sine_bump", |x| {
            let d = x.len();
            (0..d)
                .map(|k| {
                    let arg = if d == 1 { 1.5 * x[0] } else { x[k] + 0.5 * x[(k + 1) % d] };
                    x[k] + 0.005 * arg.sin()
                })
                .collect()
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({})", self.name)
    }
}

/// Finite tree given node by node. Leaves are treated as solid balls of `C`.
#[derive(Clone, Debug)]
pub struct ExplicitTree {
    nodes: Vec<ExplicitNode>,
}

#[derive(Clone, Debug)]
struct ExplicitNode {
    ball: Ball,
    children: Vec<usize>,
}

impl ExplicitTree {
    /// Build from `(word, ball)` pairs. Words must form a prefix-closed tree
    /// whose children are numbered `0..k` under each parent.
    pub fn from_nodes(mut entries: Vec<(Word, Ball)>) -> Result<ExplicitTree> {
        entries.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        if entries.first().map(|e| !e.0.is_empty()).unwrap_or(true) {
            return Err(Error::InvalidSystem("explicit tree needs a root row".into()));
        }
        let mut index: std::collections::HashMap<Word, usize> = std::collections::HashMap::new();
        let mut nodes: Vec<ExplicitNode> = Vec::with_capacity(entries.len());
        for (word, ball) in entries {
            if index.contains_key(&word) {
                return Err(Error::InvalidSystem(format!("duplicate word {word}")));
            }
            let id = nodes.len();
            if !word.is_empty() {
                let parent = word.prefix(word.len() - 1);
                let pid = *index
                    .get(&parent)
                    .ok_or_else(|| Error::InvalidSystem(format!("word {word} has no parent")))?;
                let expected = nodes[pid].children.len() as u32;
                if *word.0.last().unwrap() != expected {
                    return Err(Error::InvalidSystem(format!(
                        "children of {parent} must be numbered consecutively from 0"
                    )));
                }
                nodes[pid].children.push(id);
            }
            index.insert(word, id);
            nodes.push(ExplicitNode { ball, children: Vec::new() });
        }
        Ok(ExplicitTree { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn height(&self, id: usize) -> usize {
        self.nodes[id].children.iter().map(|&c| 1 + self.height(c)).max().unwrap_or(0)
    }
}

/// Transformation applied to every ball of a base system.
#[derive(Clone, Debug)]
pub enum Transform {
    Translate(Point),
    Similarity { scale: f64, shift: Point },
    /// `R_I = B[f(z_I), (1+ε) r_I]` for a caller-certified `‖Df - I‖_∞ < ε`.
    Perturbed { map: SmoothMap, eps: f64 },
}

impl Transform {
    fn point(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Transform::Translate(v) => x.iter().zip(&v.0).map(|(a, b)| a + b).collect(),
            Transform::Similarity { scale, shift } => {
                x.iter().zip(&shift.0).map(|(a, b)| scale * a + b).collect()
            }
            Transform::Perturbed { map, .. } => map.apply(x),
        }
    }

    fn radius(&self, r: f64) -> f64 {
        match self {
            Transform::Translate(_) => r,
            Transform::Similarity { scale, .. } => scale * r,
            Transform::Perturbed { eps, .. } => (1.0 + eps) * r,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Generator {
    HomotheticIFS(HomotheticIFS),
    CornerFamily(CornerFamilyParams, HomotheticIFS),
    GapDerived1D(GapList1D, Arc<gaps::GapTree>),
    ExplicitTree(Arc<ExplicitTree>),
    Transformed(Arc<BallSystem>, Transform),
}

/// A system of balls `{S_I}` for a compact set.
#[derive(Clone, Debug)]
pub struct BallSystem {
    norm: NormKind,
    dim: usize,
    root: Ball,
    generator: Generator,
    max_children: Option<usize>,
    /// Memoized root hole-radius enclosures, keyed by the tolerance used.
    hole_memo: Arc<Mutex<Vec<IntervalBound>>>,
    anchor_dirs: Arc<std::sync::OnceLock<Vec<Point>>>,
}

/// One node of a system, produced on demand.
#[derive(Clone, Debug)]
pub struct Node {
    pub word: Word,
    pub ball: Ball,
    /// A point known to lie in `C ∩ S_I`.
    pub anchor: Option<Point>,
    /// The whole ball lies in `C` (terminal node of a finite tree).
    pub solid: bool,
    base: NodeBase,
}

#[derive(Clone, Debug)]
enum NodeBase {
    Unit,
    Slot(usize),
    Inner(Box<Node>),
}

impl BallSystem {
    fn with_generator(norm: NormKind, root: Ball, generator: Generator, max_children: Option<usize>) -> Self {
        BallSystem {
            norm,
            dim: root.dim(),
            root,
            generator,
            max_children,
            hole_memo: Arc::new(Mutex::new(Vec::new())),
            anchor_dirs: Arc::default(),
        }
    }

    /// Corner family `C_{ℓ,n}` on `B_∞[0,1] = [-1,1]^d`.
    pub fn corner_family(params: CornerFamilyParams) -> Result<BallSystem> {
        let p = CornerFamilyParams::new(params.n, params.ell, params.d)?;
        let ifs = p.to_ifs();
        let count = ifs.maps.len();
        Ok(Self::with_generator(
            NormKind::Linf,
            Ball::unit(p.d),
            Generator::CornerFamily(p, ifs),
            Some(count),
        ))
    }

    /// System whose node at word `i_1…i_k` is `f_{i_1}∘…∘f_{i_k}(B[0,1])`.
    pub fn from_ifs(ifs: HomotheticIFS, norm: NormKind) -> Result<BallSystem> {
        ifs.validate(norm)?;
        let count = ifs.maps.len();
        let d = ifs.dim();
        Ok(Self::with_generator(norm, Ball::unit(d), Generator::HomotheticIFS(ifs), Some(count)))
    }

    /// Binary tree splitting each interval at the longest listed gap it contains.
    pub fn from_gaps_1d(gl: GapList1D) -> Result<BallSystem> {
        let tree = gaps::GapTree::build(&gl)?;
        let (a, b) = gl.hull;
        let root = Ball::new(Point(vec![0.5 * (a + b)]), 0.5 * (b - a))?;
        Ok(Self::with_generator(NormKind::Linf, root, Generator::GapDerived1D(gl, Arc::new(tree)), Some(2)))
    }

    pub fn from_explicit(tree: ExplicitTree, norm: NormKind) -> Result<BallSystem> {
        let root = tree.nodes[0].ball.clone();
        let max_children = tree.nodes.iter().map(|n| n.children.len()).max();
        let sys = Self::with_generator(norm, root, Generator::ExplicitTree(Arc::new(tree)), max_children);
        sys.validate(usize::MAX)?;
        Ok(sys)
    }

    fn transformed(&self, t: Transform) -> BallSystem {
        let root = Ball {
            center: Point(t.point(&self.root.center.0)),
            radius: t.radius(self.root.radius),
        };
        Self::with_generator(
            self.norm,
            root,
            Generator::Transformed(Arc::new(self.clone()), t),
            self.max_children,
        )
    }

    /// Every ball shifted by `v`.
    pub fn translate(&self, v: &Point) -> Result<BallSystem> {
        check_dims(self.dim, v.dim())?;
        Ok(self.transformed(Transform::Translate(v.clone())))
    }

    /// Image under `x ↦ scale·x + shift`.
    pub fn similarity_image(&self, scale: f64, shift: &Point) -> Result<BallSystem> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("similarity scale must be positive, got {scale}")));
        }
        check_dims(self.dim, shift.dim())?;
        Ok(self.transformed(Transform::Similarity { scale, shift: shift.clone() }))
    }

    /// System `R_I = B_∞[f(z_I), (1+ε) r_I]` for `f(C)`; the caller certifies
    /// `‖Df - I‖_∞ < ε` on the root cube.
    pub fn perturbed_image(&self, map: SmoothMap, eps: f64) -> Result<BallSystem> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0,1), got {eps}")));
        }
        if self.norm != NormKind::Linf {
            return Err(invalid("perturbed images are defined for the Linf norm only"));
        }
        let unit = Ball::unit(self.dim);
        if !contains_with_slack(&unit, &self.root, NormKind::Linf, 1e-12) {
            return Err(invalid("perturbed images need the root inside B_inf[0,1]"));
        }
        Ok(self.transformed(Transform::Perturbed { map, eps }))
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root_ball(&self) -> &Ball {
        &self.root
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Known bound `N0` on the number of children, if any.
    pub fn max_children(&self) -> Option<usize> {
        self.max_children
    }

    /// The homothetic IFS behind this system, looking through transforms
    /// that preserve homothety (translations and similarities).
    pub fn homothetic_core(&self) -> Option<&HomotheticIFS> {
        match &self.generator {
            Generator::HomotheticIFS(ifs) | Generator::CornerFamily(_, ifs) => Some(ifs),
            Generator::Transformed(base, Transform::Translate(_) | Transform::Similarity { .. }) => {
                base.homothetic_core()
            }
            _ => None,
        }
    }

    pub fn corner_params(&self) -> Option<CornerFamilyParams> {
        match &self.generator {
            Generator::CornerFamily(p, _) => Some(*p),
            Generator::Transformed(base, Transform::Translate(_) | Transform::Similarity { .. }) => {
                base.corner_params()
            }
            _ => None,
        }
    }

    /// Height of the tree when it is finite.
    pub fn finite_height(&self) -> Option<usize> {
        match &self.generator {
            Generator::GapDerived1D(_, tree) => Some(tree.height(0)),
            Generator::ExplicitTree(tree) => Some(tree.height(0)),
            Generator::Transformed(base, _) => base.finite_height(),
            _ => None,
        }
    }

    /// Recorded contraction ratio `q < 1` with `rad(S_I) ≤ rad(S_∅) q^{|I|}`.
    pub fn decay_ratio(&self) -> Option<f64> {
        match &self.generator {
            Generator::HomotheticIFS(ifs) | Generator::CornerFamily(_, ifs) => Some(ifs.max_ratio()),
            Generator::Transformed(base, _) => base.decay_ratio(),
            _ => None,
        }
    }

    pub(crate) fn hole_memo(&self) -> &Mutex<Vec<IntervalBound>> {
        &self.hole_memo
    }

    pub fn root(&self) -> Node {
        match &self.generator {
            Generator::HomotheticIFS(ifs) | Generator::CornerFamily(_, ifs) => Node {
                word: Word::root(),
                ball: self.root.clone(),
                anchor: Some(ifs.anchor()),
                solid: false,
                base: NodeBase::Unit,
            },
            Generator::GapDerived1D(_, tree) => tree.node(Word::root(), 0),
            Generator::ExplicitTree(tree) => explicit_node(tree, Word::root(), 0),
            Generator::Transformed(base, t) => map_node(base.root(), t),
        }
    }

    /// Children of `node`, in index order.
    pub fn children(&self, node: &Node) -> Vec<Node> {
        match &self.generator {
            Generator::HomotheticIFS(ifs) | Generator::CornerFamily(_, ifs) => {
                let c = &node.ball.center.0;
                let rho = node.ball.radius;
                let p0 = ifs.anchor();
                ifs.maps
                    .iter()
                    .enumerate()
                    .map(|(i, (lambda, t))| {
                        let center: Vec<f64> = c.iter().zip(&t.0).map(|(a, b)| a + rho * b).collect();
                        let r = rho * lambda;
                        let anchor = center.iter().zip(&p0.0).map(|(a, b)| a + r * b).collect();
                        Node {
                            word: node.word.child(i as u32),
                            ball: Ball { center: Point(center), radius: r },
                            anchor: Some(Point(anchor)),
                            solid: false,
                            base: NodeBase::Unit,
                        }
                    })
                    .collect()
            }
            Generator::GapDerived1D(_, tree) => {
                let NodeBase::Slot(id) = node.base else { return Vec::new() };
                tree.children(id)
                    .iter()
                    .enumerate()
                    .map(|(i, &cid)| tree.node(node.word.child(i as u32), cid))
                    .collect()
            }
            Generator::ExplicitTree(tree) => {
                let NodeBase::Slot(id) = node.base else { return Vec::new() };
                tree.nodes[id]
                    .children
                    .iter()
                    .enumerate()
                    .map(|(i, &cid)| explicit_node(tree, node.word.child(i as u32), cid))
                    .collect()
            }
            Generator::Transformed(base, t) => {
                let NodeBase::Inner(inner) = &node.base else { return Vec::new() };
                base.children(inner).into_iter().map(|n| map_node(n, t)).collect()
            }
        }
    }

    /// Node at `word`.
    pub fn node(&self, word: &Word) -> Result<Node> {
        let mut node = self.root();
        for &i in &word.0 {
            node = self
                .children(&node)
                .into_iter()
                .nth(i as usize)
                .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
        }
        Ok(node)
    }

    /// All nodes with `|I| = depth` (the root when `depth = 0`); terminal
    /// nodes of finite trees above that depth are not included.
    pub fn level(&self, depth: usize) -> Vec<Node> {
        let mut frontier = vec![self.root()];
        for _ in 0..depth {
            frontier = frontier.iter().flat_map(|n| self.children(n)).collect();
        }
        frontier
    }

    /// Depth-first visit of every node with `|I| ≤ depth`.
    pub fn visit(&self, depth: usize, f: &mut dyn FnMut(&Node, &[Node])) {
        fn rec(sys: &BallSystem, node: &Node, left: usize, f: &mut dyn FnMut(&Node, &[Node])) {
            let kids = sys.children(node);
            f(node, &kids);
            if left > 0 {
                for k in &kids {
                    rec(sys, k, left - 1, f);
                }
            }
        }
        rec(self, &self.root(), depth, f);
    }

    /// Checks, for every node with `|I| < depth`, that each child lies inside
    /// its parent and that non-terminal nodes have children.
    pub fn validate(&self, depth: usize) -> Result<()> {
        let mut err = None;
        self.visit(depth.saturating_sub(1), &mut |node, kids| {
            if err.is_some() {
                return;
            }
            if kids.is_empty() && !node.solid {
                err = Some(Error::InvalidSystem(format!("node {} has no children", node.word)));
            }
            for k in kids {
                if !contains_with_slack(&node.ball, &k.ball, self.norm, 1e-12) {
                    err = Some(Error::InvalidSystem(format!(
                        "child {} escapes its parent {}",
                        k.word, node.word
                    )));
                    return;
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Points known to lie in `C ∩ S_I`. For homothetic systems these are the
    /// images of the maps' fixed points lying on the unit sphere (all fixed
    /// points when none does); both endpoints for 1-D gap trees.
    pub fn node_anchors(&self, node: &Node) -> Vec<Point> {
        match &self.generator {
            Generator::HomotheticIFS(ifs) | Generator::CornerFamily(_, ifs) => {
                let c = &node.ball.center;
                let rho = node.ball.radius;
                let dirs = self.anchor_dirs.get_or_init(|| ifs.fixed_points(self.norm));
                dirs.iter().map(|p| c.add_scaled(rho, p)).collect()
            }
            Generator::GapDerived1D(..) => {
                let (z, r) = (node.ball.center.0[0], node.ball.radius);
                vec![Point(vec![z - r]), Point(vec![z + r])]
            }
            Generator::ExplicitTree(_) => node.anchor.iter().cloned().collect(),
            Generator::Transformed(base, t) => {
                let NodeBase::Inner(inner) = &node.base else { return Vec::new() };
                base.node_anchors(inner).iter().map(|a| Point(t.point(&a.0))).collect()
            }
        }
    }

    /// Whether the depth-1 balls are pairwise disjoint (exact test).
    pub fn siblings_disjoint_at_root(&self) -> bool {
        let kids = self.children(&self.root());
        for i in 0..kids.len() {
            for j in i + 1..kids.len() {
                if kids[i].ball.meets(&kids[j].ball, self.norm) {
                    return false;
                }
            }
        }
        true
    }
}

fn explicit_node(tree: &ExplicitTree, word: Word, id: usize) -> Node {
    let n = &tree.nodes[id];
    let solid = n.children.is_empty();
    let mut leaf = id;
    while let Some(&first) = tree.nodes[leaf].children.first() {
        leaf = first;
    }
    Node {
        word,
        ball: n.ball.clone(),
        anchor: Some(tree.nodes[leaf].ball.center.clone()),
        solid,
        base: NodeBase::Slot(id),
    }
}

fn map_node(inner: Node, t: &Transform) -> Node {
    let ball = Ball { center: Point(t.point(&inner.ball.center.0)), radius: t.radius(inner.ball.radius) };
    let anchor = inner.anchor.as_ref().map(|a| Point(t.point(&a.0)));
    let solid = inner.solid && !matches!(t, Transform::Perturbed { .. });
    Node { word: inner.word.clone(), ball, anchor, solid, base: NodeBase::Inner(Box::new(inner)) }
}
