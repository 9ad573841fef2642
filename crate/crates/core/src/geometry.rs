//! Boundary curves of the thin stadium domains and of ellipses.
//!
//! Every curve is a 2π-periodic parameterization sampled at `n` equispaced
//! parameter values `t_k = 2πk/n`. Stadium nodes are graded towards the four
//! flat/cap junctions so that the periodic trapezoid rule keeps a high order
//! despite the curvature jump there; each junction sits exactly halfway
//! between two nodes. After sampling, curves are rescaled to diameter 1/2.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Smallest accepted node count.
pub const MIN_NODES: usize = 32;

/// Diameter every built curve is rescaled to.
pub const TARGET_DIAMETER: f64 = 0.5;

/// Order of the polynomial grading used near stadium junctions.
pub const GRADING_ORDER: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Flats `[-R, R] x {±1}` closed by unit semicircles centred at `(±R, 0)`.
    Stadium {
        half_length: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Circle {
        radius: f64,
    },
}

impl Shape {
    /// Diameter of the unscaled shape.
    pub fn natural_diameter(&self) -> f64 {
        match *self {
            Shape::Stadium { half_length } => 2.0 * half_length + 2.0,
            Shape::Ellipse { a, .. } => 2.0 * a,
            Shape::Circle { radius } => 2.0 * radius,
        }
    }

    /// Short tag used in file names.
    pub fn tag(&self) -> &'static str {
        match self {
            Shape::Stadium { .. } => "stadium",
            Shape::Ellipse { .. } => "ellipse",
            Shape::Circle { .. } => "circle",
        }
    }
}

/// Shape of a curve together with the dilation applied to it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub shape: Shape,
    pub scale: f64,
}

impl CurveDescriptor {
    pub fn diameter(&self) -> f64 {
        self.shape.natural_diameter() * self.scale
    }
}

/// Which part of the boundary a node lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    Bottom,
    RightCap,
    Top,
    LeftCap,
    /// Single smooth arc (ellipse, circle).
    Arc,
}

impl Segment {
    pub fn is_flat(self) -> bool {
        matches!(self, Segment::Bottom | Segment::Top)
    }

    pub fn is_cap(self) -> bool {
        matches!(self, Segment::RightCap | Segment::LeftCap)
    }
}

/// Geometry of a parameterized curve at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub point: Point,
    /// Unit outward normal.
    pub normal: Point,
    /// `|x'(t)|`.
    pub speed: f64,
    /// Signed curvature, positive where the domain is convex.
    pub curvature: f64,
    pub segment: Segment,
}

/// A closed, counter-clockwise, 2π-periodic parameterization.
pub trait CurveParameterization {
    fn sample(&self, t: f64) -> CurveSample;
    fn shape(&self) -> Shape;
}

/// Polynomial grading map on `[0, 1]` whose derivative vanishes to order
/// `p - 1` at both ends. Returns `(g(u), g'(u))`.
fn grade(u: f64, p: f64) -> (f64, f64) {
    let c = 1.0 / p - 0.5;
    let s = 1.0 - 2.0 * u;
    let v = c * s.powi(3) + (2.0 * u - 1.0) / p + 0.5;
    let dv = -6.0 * c * s * s + 2.0 / p;
    let vp = v.powf(p);
    let wp = (1.0 - v).powf(p);
    let denom = vp + wp;
    let g = vp / denom;
    let dg = p * v.powf(p - 1.0) * (1.0 - v).powf(p - 1.0) / (denom * denom) * dv;
    (g, dg)
}

/// Stadium parameterization for a fixed node count.
///
/// The parameter circle is split into four pieces whose lengths are whole
/// multiples of the node spacing `2π/n`: the bottom flat (centred on `t = 0`),
/// the right cap, the top flat (centred on `t = π`) and the left cap. Within
/// each piece arc length is a graded function of the local parameter.
#[derive(Clone, Copy, Debug)]
pub struct StadiumParameterization {
    half_length: f64,
    n_nodes: usize,
    n_flat: usize,
    n_cap: usize,
}

impl StadiumParameterization {
    pub fn new(half_length: f64, n_nodes: usize) -> Result<Self> {
        check_nodes(n_nodes)?;
        if half_length < 1.0 || !half_length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "R",
                value: half_length,
                reason: "stadium half-length must be finite and at least 1",
            });
        }
        let perimeter = 4.0 * half_length + 2.0 * PI;
        let mut n_cap = ((n_nodes as f64 * PI / perimeter).round() as usize).max(4);
        let mut n_flat = n_nodes / 2 - n_cap;
        // odd flats put a node at x1 = 0 on both top and bottom
        if n_flat.is_multiple_of(2) {
            n_flat -= 1;
            n_cap += 1;
        }
        Ok(Self {
            half_length,
            n_nodes,
            n_flat,
            n_cap,
        })
    }

    pub fn nodes_per_flat(&self) -> usize {
        self.n_flat
    }

    pub fn nodes_per_cap(&self) -> usize {
        self.n_cap
    }
}

impl CurveParameterization for StadiumParameterization {
    fn sample(&self, t: f64) -> CurveSample {
        let r = self.half_length;
        let dt = 2.0 * PI / self.n_nodes as f64;
        // offset so the bottom flat starts at tau = 0
        let tau = (t + 0.5 * self.n_flat as f64 * dt).rem_euclid(2.0 * PI);
        let pieces = [
            (Segment::Bottom, self.n_flat, 2.0 * r),
            (Segment::RightCap, self.n_cap, PI),
            (Segment::Top, self.n_flat, 2.0 * r),
            (Segment::LeftCap, self.n_cap, PI),
        ];
        let mut start = 0.0;
        let mut chosen = pieces[3];
        let mut local = 0.0;
        for (i, piece) in pieces.iter().enumerate() {
            let width = piece.1 as f64 * dt;
            if tau < start + width || i == 3 {
                chosen = *piece;
                local = ((tau - start) / width).clamp(0.0, 1.0);
                break;
            }
            start += width;
        }
        let (segment, count, length) = chosen;
        let (g, dg) = grade(local, GRADING_ORDER);
        let s = length * g;
        let speed = length * dg / (count as f64 * dt);
        let (point, normal, curvature) = match segment {
            Segment::Bottom => (Point::new(-r + s, -1.0), Point::new(0.0, -1.0), 0.0),
            Segment::RightCap => {
                let phi = -0.5 * PI + s;
                let n = Point::new(phi.cos(), phi.sin());
                (Point::new(r, 0.0) + n, n, 1.0)
            }
            Segment::Top => (Point::new(r - s, 1.0), Point::new(0.0, 1.0), 0.0),
            Segment::LeftCap => {
                let phi = 0.5 * PI + s;
                let n = Point::new(phi.cos(), phi.sin());
                (Point::new(-r, 0.0) + n, n, 1.0)
            }
            Segment::Arc => unreachable!(),
        };
        CurveSample {
            point,
            normal,
            speed,
            curvature,
            segment,
        }
    }

    fn shape(&self) -> Shape {
        Shape::Stadium {
            half_length: self.half_length,
        }
    }
}

/// `(a cos t, b sin t)`.
#[derive(Clone, Copy, Debug)]
pub struct EllipseParameterization {
    pub a: f64,
    pub b: f64,
}

impl CurveParameterization for EllipseParameterization {
    fn sample(&self, t: f64) -> CurveSample {
        let (sin, cos) = t.sin_cos();
        let tangent = Point::new(-self.a * sin, self.b * cos);
        let speed = tangent.norm();
        CurveSample {
            point: Point::new(self.a * cos, self.b * sin),
            normal: Point::new(tangent.y, -tangent.x) / speed,
            speed,
            curvature: self.a * self.b / speed.powi(3),
            segment: Segment::Arc,
        }
    }

    fn shape(&self) -> Shape {
        if self.a == self.b {
            Shape::Circle { radius: self.a }
        } else {
            Shape::Ellipse {
                a: self.a,
                b: self.b,
            }
        }
    }
}

/// A closed curve sampled at `n` equispaced parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    params: Vec<f64>,
    points: Vec<Point>,
    normals: Vec<Point>,
    speeds: Vec<f64>,
    curvatures: Vec<f64>,
    segments: Vec<Segment>,
    perimeter: f64,
    descriptor: CurveDescriptor,
}

impl BoundaryCurve {
    /// Samples `param` at `t_k = 2πk/n` without rescaling.
    pub fn sample<P: CurveParameterization>(param: &P, n_nodes: usize) -> Result<Self> {
        check_nodes(n_nodes)?;
        let dt = 2.0 * PI / n_nodes as f64;
        let mut curve = BoundaryCurve {
            params: Vec::with_capacity(n_nodes),
            points: Vec::with_capacity(n_nodes),
            normals: Vec::with_capacity(n_nodes),
            speeds: Vec::with_capacity(n_nodes),
            curvatures: Vec::with_capacity(n_nodes),
            segments: Vec::with_capacity(n_nodes),
            perimeter: 0.0,
            descriptor: CurveDescriptor {
                shape: param.shape(),
                scale: 1.0,
            },
        };
        for k in 0..n_nodes {
            let t = k as f64 * dt;
            let s = param.sample(t);
            curve.params.push(t);
            curve.points.push(s.point);
            curve.normals.push(s.normal);
            curve.speeds.push(s.speed);
            curve.curvatures.push(s.curvature);
            curve.segments.push(s.segment);
        }
        curve.perimeter = curve.speeds.iter().sum::<f64>() * dt;
        Ok(curve)
    }

    pub fn n_nodes(&self) -> usize {
        self.points.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn descriptor(&self) -> CurveDescriptor {
        self.descriptor
    }

    pub fn node_spacing(&self) -> f64 {
        2.0 * PI / self.n_nodes() as f64
    }

    /// Trapezoid weights `speed_k * 2π/n` for integrals against arc length.
    pub fn weights(&self) -> Vec<f64> {
        let dt = self.node_spacing();
        self.speeds.iter().map(|s| s * dt).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.descriptor.diameter()
    }

    /// Node position in the coordinates of the unscaled shape.
    pub fn unscaled_point(&self, i: usize) -> Point {
        self.points[i] / self.descriptor.scale
    }
}

fn check_nodes(n_nodes: usize) -> Result<()> {
    if n_nodes < MIN_NODES || !n_nodes.is_multiple_of(2) {
        return Err(Error::NodeCount {
            got: n_nodes,
            min: MIN_NODES,
        });
    }
    Ok(())
}

/// Stadium of half-length `half_length`, rescaled to diameter 1/2.
pub fn build_stadium(half_length: f64, n_nodes: usize) -> Result<BoundaryCurve> {
    let param = StadiumParameterization::new(half_length, n_nodes)?;
    let curve = BoundaryCurve::sample(&param, n_nodes)?;
    let factor = TARGET_DIAMETER / curve.diameter();
    rescale(&curve, factor)
}

/// Ellipse with semi-axes `a >= b > 0`, rescaled to diameter 1/2.
/// `a == b` yields a circle.
pub fn build_ellipse(a: f64, b: f64, n_nodes: usize) -> Result<BoundaryCurve> {
    check_nodes(n_nodes)?;
    if b <= 0.0 || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "semi-axis must be positive and finite",
        });
    }
    if a < b || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "major semi-axis must satisfy a >= b",
        });
    }
    let curve = BoundaryCurve::sample(&EllipseParameterization { a, b }, n_nodes)?;
    let factor = TARGET_DIAMETER / curve.diameter();
    rescale(&curve, factor)
}

/// Dilation by `factor`. Normals are unchanged; curvatures scale inversely.
pub fn rescale(curve: &BoundaryCurve, factor: f64) -> Result<BoundaryCurve> {
    if factor <= 0.0 || !factor.is_finite() {
        return Err(Error::InvalidParameter {
            name: "factor",
            value: factor,
            reason: "rescale factor must be positive and finite",
        });
    }
    Ok(BoundaryCurve {
        params: curve.params.clone(),
        points: curve.points.iter().map(|p| p * factor).collect(),
        normals: curve.normals.clone(),
        speeds: curve.speeds.iter().map(|s| s * factor).collect(),
        curvatures: curve.curvatures.iter().map(|k| k / factor).collect(),
        segments: curve.segments.clone(),
        perimeter: curve.perimeter * factor,
        descriptor: CurveDescriptor {
            shape: curve.descriptor.shape,
            scale: curve.descriptor.scale * factor,
        },
    })
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    pub fn with_points(curve: &BoundaryCurve, points: Vec<Point>) -> BoundaryCurve {
        BoundaryCurve {
            points,
            ..curve.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unscaled(curve: &BoundaryCurve) -> BoundaryCurve {
        rescale(curve, 1.0 / curve.descriptor().scale).unwrap()
    }

    #[test]
    fn stadium_perimeter_and_curvature() {
        let c = unscaled(&build_stadium(1.0, 256).unwrap());
        assert_relative_eq!(c.perimeter(), 10.28319, epsilon = 1e-5);
        assert_relative_eq!(c.perimeter(), 4.0 + 2.0 * PI, max_relative = 1e-6);
        for (seg, k) in c.segments().iter().zip(c.curvatures()) {
            if seg.is_flat() {
                assert_eq!(*k, 0.0);
            } else {
                assert_relative_eq!(*k, 1.0, epsilon = 1e-12);
            }
        }
        assert!(c.segments().iter().any(|s| s.is_flat()));
        assert!(c.segments().iter().any(|s| s.is_cap()));
    }

    #[test]
    fn stadium_rescaled_diameter() {
        let c = build_stadium(8.0, 256).unwrap();
        assert_relative_eq!(Shape::Stadium { half_length: 8.0 }.natural_diameter(), 18.0);
        assert_relative_eq!(c.diameter(), 0.5, epsilon = 1e-15);
        let max_abs_x = c.points().iter().map(|p| p.x.abs()).fold(0.0, f64::max);
        assert!(max_abs_x <= 0.25 + 1e-15);
    }

    #[test]
    fn stadium_has_center_nodes() {
        let c = unscaled(&build_stadium(3.0, 128).unwrap());
        let n = c.n_nodes();
        assert_relative_eq!(c.points()[0].x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.points()[0].y, -1.0);
        assert_relative_eq!(c.points()[n / 2].x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(c.points()[n / 2].y, 1.0);
        // mirror pairs share x1
        for k in 1..n / 2 {
            if c.segments()[k] == Segment::Bottom {
                assert_eq!(c.segments()[n / 2 - k], Segment::Top);
                assert_relative_eq!(c.points()[k].x, c.points()[n / 2 - k].x, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ellipse_examples() {
        let c = unscaled(&build_ellipse(1.0, 1.0, 64).unwrap());
        assert_eq!(c.descriptor().shape, Shape::Circle { radius: 1.0 });
        assert_relative_eq!(c.perimeter(), 2.0 * PI, epsilon = 1e-12);
        for k in c.curvatures() {
            assert_relative_eq!(*k, 1.0, epsilon = 1e-12);
        }
        let e = unscaled(&build_ellipse(2.0, 1.0, 64).unwrap());
        assert_relative_eq!(e.curvatures()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_stadium(2.0, 63),
            Err(Error::NodeCount { .. })
        ));
        assert!(matches!(
            build_stadium(2.0, 16),
            Err(Error::NodeCount { .. })
        ));
        assert!(build_stadium(0.5, 64).is_err());
        assert!(build_ellipse(1.0, 2.0, 64).is_err());
        assert!(build_ellipse(1.0, 0.0, 64).is_err());
        let c = build_ellipse(1.0, 1.0, 64).unwrap();
        assert!(rescale(&c, 0.0).is_err());
        assert!(rescale(&c, -1.0).is_err());
    }

    #[test]
    fn rescale_circle() {
        let c = unscaled(&build_ellipse(1.0, 1.0, 64).unwrap());
        assert_eq!(rescale(&c, 1.0).unwrap(), c);
        let q = rescale(&c, 0.25).unwrap();
        for (p, k) in q.points().iter().zip(q.curvatures()) {
            assert_relative_eq!(p.norm(), 0.25, epsilon = 1e-15);
            assert_relative_eq!(*k, 4.0, epsilon = 1e-12);
        }
        assert_eq!(q.normals(), c.normals());
    }

    #[test]
    fn grading_is_symmetric() {
        for &u in &[0.01, 0.2, 0.37, 0.5] {
            let (g, dg) = grade(u, GRADING_ORDER);
            let (h, dh) = grade(1.0 - u, GRADING_ORDER);
            assert_relative_eq!(g + h, 1.0, epsilon = 1e-14);
            assert_relative_eq!(dg, dh, epsilon = 1e-12);
        }
        // nodes sit twice as far apart mid-piece as in uniform placement
        assert_relative_eq!(grade(0.5, GRADING_ORDER).1, 2.0, epsilon = 1e-14);
    }
}
