//! Points, norms, closed balls and spheres.
//!
//! Every ball in a workspace is a closed ball of one of the three supported
//! norms. In `Linf` a ball is an axis-aligned cube, which is the setting most
//! of the toolkit is tuned for.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point of R^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(d: usize) -> Self {
        Point(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// The norm shared by every ball of a workspace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Linf,
    L2,
    L1,
}

impl NormKind {
    /// Norm of a coordinate vector.
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            NormKind::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
        }
    }

    /// Distance between two coordinate slices of equal length.
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            NormKind::Linf => a
                .iter()
                .zip(b)
                .fold(0.0, |m, (x, y)| m.max((x - y).abs())),
            NormKind::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            NormKind::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    /// Largest distance from `p` to a point of the box `center ± half`.
    pub fn farthest_in_box(self, center: &[f64], half: &[f64], p: &[f64]) -> f64 {
        match self {
            NormKind::Linf => center
                .iter()
                .zip(half)
                .zip(p)
                .fold(0.0, |m, ((c, w), x)| m.max((c - x).abs() + w)),
            NormKind::L2 => center
                .iter()
                .zip(half)
                .zip(p)
                .map(|((c, w), x)| {
                    let t = (c - x).abs() + w;
                    t * t
                })
                .sum::<f64>()
                .sqrt(),
            NormKind::L1 => center
                .iter()
                .zip(half)
                .zip(p)
                .map(|((c, w), x)| (c - x).abs() + w)
                .sum(),
        }
    }

    /// Lower bound on `min_{a in B[z,rho]} max_{x in box} |x - a|`.
    ///
    /// Exact for `Linf`; for the other norms it is the reverse triangle
    /// inequality bound.
    pub fn box_ball_minimax_lower(
        self,
        center: &[f64],
        half: &[f64],
        z: &[f64],
        rho: f64,
    ) -> f64 {
        match self {
            NormKind::Linf => center
                .iter()
                .zip(half)
                .zip(z)
                .fold(0.0, |m, ((c, w), zz)| {
                    m.max(((c - zz).abs() - rho).max(0.0) + w)
                }),
            _ => (self.farthest_in_box(center, half, z) - rho).max(self.of(half)),
        }
    }

    /// Point of the closed ball `B[z, rho]` closest to `q` (exact for `Linf`
    /// and `L2`; for `L1` a point of the ball on the segment towards `q`).
    pub fn nearest_in_ball(self, z: &[f64], rho: f64, q: &[f64]) -> Vec<f64> {
        match self {
            NormKind::Linf => z
                .iter()
                .zip(q)
                .map(|(zz, qq)| qq.clamp(zz - rho, zz + rho))
                .collect(),
            _ => {
                let d = self.dist(z, q);
                if d <= rho {
                    q.to_vec()
                } else {
                    let s = rho / d;
                    z.iter().zip(q).map(|(zz, qq)| zz + s * (qq - zz)).collect()
                }
            }
        }
    }

    /// Distance from `q` to the box `center ± half`.
    pub fn dist_to_box(self, center: &[f64], half: &[f64], q: &[f64]) -> f64 {
        let gap: Vec<f64> = center
            .iter()
            .zip(half)
            .zip(q)
            .map(|((c, w), x)| ((x - c).abs() - w).max(0.0))
            .collect();
        self.of(&gap)
    }

    pub fn parse(s: &str) -> Result<NormKind> {
        match s.to_ascii_lowercase().as_str() {
            "linf" => Ok(NormKind::Linf),
            "l2" => Ok(NormKind::L2),
            "l1" => Ok(NormKind::L1),
            other => Err(invalid(format!("unknown norm {other:?}"))),
        }
    }
}

/// Norm of `p - q`.
pub fn norm_distance(p: &Point, q: &Point, norm: NormKind) -> Result<f64> {
    check_dims(p.dim(), q.dim())?;
    Ok(norm.dist(&p.0, &q.0))
}

/// A closed norm ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Ball> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("ball radius must be positive, got {radius}")));
        }
        if !center.is_finite() {
            return Err(invalid("ball center must be finite"));
        }
        Ok(Ball { center, radius })
    }

    /// Unit ball at the origin.
    pub fn unit(d: usize) -> Ball {
        Ball { center: Point::zeros(d), radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains_point(&self, p: &[f64], norm: NormKind) -> bool {
        norm.dist(&self.center.0, p) <= self.radius
    }

    pub fn meets(&self, other: &Ball, norm: NormKind) -> bool {
        norm.dist(&self.center.0, &other.center.0) <= self.radius + other.radius
    }

    /// Distance between two balls (zero when they meet).
    pub fn gap_to(&self, other: &Ball, norm: NormKind) -> f64 {
        (norm.dist(&self.center.0, &other.center.0) - self.radius - other.radius).max(0.0)
    }

}

/// `max(0, |p - center| - radius)`.
pub fn dist_point_ball(p: &Point, b: &Ball, norm: NormKind) -> Result<f64> {
    check_dims(p.dim(), b.dim())?;
    Ok((norm.dist(&p.0, &b.center.0) - b.radius).max(0.0))
}

/// The ball with the same center and radius scaled by `a`.
pub fn ball_scale(b: &Ball, a: f64) -> Result<Ball> {
    if !(a > 0.0) {
        return Err(invalid(format!("scale factor must be positive, got {a}")));
    }
    Ok(Ball { center: b.center.clone(), radius: a * b.radius })
}

/// Exact containment test for norm balls.
pub fn ball_contains(outer: &Ball, inner: &Ball, norm: NormKind) -> Result<bool> {
    check_dims(outer.dim(), inner.dim())?;
    Ok(norm.dist(&outer.center.0, &inner.center.0) + inner.radius <= outer.radius)
}

/// Containment allowing a relative slack of `rel` on the outer radius.
pub(crate) fn contains_with_slack(outer: &Ball, inner: &Ball, norm: NormKind, rel: f64) -> bool {
    norm.dist(&outer.center.0, &inner.center.0) + inner.radius
        <= outer.radius + rel * outer.radius.max(inner.radius)
}

/// Boundary of a norm ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Point,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Point, radius: f64) -> Result<Sphere> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Sphere { center, radius })
    }
}

/// `| |p - center| - radius |`.
pub fn dist_point_sphere(p: &Point, s: &Sphere, norm: NormKind) -> Result<f64> {
    check_dims(p.dim(), s.center.dim())?;
    Ok((norm.dist(&p.0, &s.center.0) - s.radius).abs())
}

/// A union of at most `bound` spheres: one element of the family H_M.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereUnion {
    pub spheres: Vec<Sphere>,
    pub bound: usize,
}

impl SphereUnion {
    pub fn new(spheres: Vec<Sphere>, bound: usize) -> Result<SphereUnion> {
        if spheres.is_empty() {
            return Err(invalid("sphere union must be nonempty"));
        }
        if spheres.len() > bound {
            return Err(invalid(format!(
                "sphere union has {} spheres, bound is {bound}",
                spheres.len()
            )));
        }
        Ok(SphereUnion { spheres, bound })
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    /// Distance from `p` to the union.
    pub fn dist(&self, p: &[f64], norm: NormKind) -> f64 {
        self.spheres
            .iter()
            .map(|s| (norm.dist(p, &s.center.0) - s.radius).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A certified enclosure `[lo, hi]` of some real quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBound {
    pub lo: f64,
    pub hi: f64,
    /// Width the producing operation was asked for.
    pub tol: f64,
    /// Whether `hi - lo <= tol` was reached within budget.
    pub converged: bool,
}

impl IntervalBound {
    pub fn new(lo: f64, hi: f64, tol: f64) -> IntervalBound {
        debug_assert!(lo <= hi, "lo {lo} > hi {hi}");
        IntervalBound { lo, hi, tol, converged: hi - lo <= tol }
    }

    pub fn exact(x: f64) -> IntervalBound {
        IntervalBound { lo: x, hi: x, tol: 0.0, converged: true }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Push both ends outward by `rel` times their magnitude, absorbing
    /// floating-point rounding in the computation that produced them.
    pub fn widened(&self, rel: f64) -> IntervalBound {
        IntervalBound { lo: self.lo - rel * self.lo.abs(), hi: self.hi + rel * self.hi.abs(), ..*self }
    }

    /// Scale both ends by a positive factor.
    pub fn scaled(&self, s: f64) -> IntervalBound {
        IntervalBound { lo: self.lo * s, hi: self.hi * s, tol: self.tol * s, converged: self.converged }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point(v.to_vec())
    }

    #[test]
    fn norm_distance_examples() {
        let o = p(&[0.0, 0.0]);
        let q = p(&[3.0, -4.0]);
        assert_eq!(norm_distance(&o, &q, NormKind::Linf).unwrap(), 4.0);
        assert_eq!(norm_distance(&o, &q, NormKind::L2).unwrap(), 5.0);
        assert_eq!(norm_distance(&p(&[1.0, 1.0]), &p(&[1.0, 1.0]), NormKind::L1).unwrap(), 0.0);
        assert!(matches!(
            norm_distance(&o, &p(&[1.0]), NormKind::L2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn point_ball_and_sphere() {
        let b = Ball::unit(2);
        let n = NormKind::Linf;
        assert_eq!(dist_point_ball(&p(&[0.0, 0.0]), &b, n).unwrap(), 0.0);
        assert_eq!(dist_point_ball(&p(&[2.0, 0.0]), &b, n).unwrap(), 1.0);
        assert_eq!(dist_point_ball(&p(&[0.5, 0.0]), &b, n).unwrap(), 0.0);

        let s = Sphere::new(p(&[0.0, 0.0]), 2.0).unwrap();
        assert_eq!(dist_point_sphere(&p(&[0.0, 0.0]), &s, n).unwrap(), 2.0);
        assert_eq!(dist_point_sphere(&p(&[2.0, 1.0]), &s, n).unwrap(), 0.0);
        let unit = Sphere::new(p(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(dist_point_sphere(&p(&[3.0, 0.0]), &unit, n).unwrap(), 2.0);
    }

    #[test]
    fn scaling_and_containment() {
        let b = Ball::unit(2);
        assert_eq!(ball_scale(&b, 1.0).unwrap(), b);
        let half = ball_scale(&b, 1.0 - 2.0 * 0.25).unwrap();
        assert_eq!(half.radius, 0.5);
        assert!(ball_contains(&b, &half, NormKind::Linf).unwrap());
        assert!(ball_scale(&b, 0.0).is_err());

        let n = NormKind::Linf;
        assert!(ball_contains(&b, &b, n).unwrap());
        let inner = Ball::new(p(&[0.5, 0.0]), 0.5).unwrap();
        assert!(ball_contains(&b, &inner, n).unwrap());
        let outside = Ball::new(p(&[0.9, 0.0]), 0.2).unwrap();
        assert!(!ball_contains(&b, &outside, n).unwrap());
    }

    #[test]
    fn ball_rejects_bad_radius() {
        assert!(Ball::new(p(&[0.0]), 0.0).is_err());
        assert!(Ball::new(p(&[0.0]), f64::NAN).is_err());
        assert!(Sphere::new(p(&[0.0]), -1.0).is_err());
    }

    #[test]
    fn box_helpers_agree_with_brute_force() {
        let c = [0.1, -0.2];
        let w = [0.3, 0.05];
        let q = [1.0, 0.4];
        for norm in [NormKind::Linf, NormKind::L2, NormKind::L1] {
            let mut far: f64 = 0.0;
            let mut near = f64::INFINITY;
            for i in 0..=20 {
                for j in 0..=20 {
                    let x = [c[0] - w[0] + 2.0 * w[0] * i as f64 / 20.0, c[1] - w[1] + 2.0 * w[1] * j as f64 / 20.0];
                    far = far.max(norm.dist(&x, &q));
                    near = near.min(norm.dist(&x, &q));
                }
            }
            assert!((norm.farthest_in_box(&c, &w, &q) - far).abs() < 1e-12);
            assert!((norm.dist_to_box(&c, &w, &q) - near).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_union_bound() {
        let s = Sphere::new(p(&[0.0]), 1.0).unwrap();
        assert!(SphereUnion::new(vec![], 2).is_err());
        assert!(SphereUnion::new(vec![s.clone(), s.clone(), s.clone()], 2).is_err());
        let u = SphereUnion::new(vec![s], 2).unwrap();
        assert_eq!(u.dist(&[3.0], NormKind::Linf), 2.0);
    }
}
