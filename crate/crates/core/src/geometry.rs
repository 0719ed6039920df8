//! Planar primitives shared by every simplifier.
//!
//! Angles are radians measured counter-clockwise from the +x axis. Distances
//! are always to the *infinite* line through a segment, never the clamped
//! segment itself.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance below which two headings count as parallel.
pub const PARALLEL_TOLERANCE: f64 = 1e-9;

/// A timestamped planar position (meters, meters, seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Point { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn same_position(&self, other: &Point) -> bool {
        self.x == other.x && self.y == other.y
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // `-tiny + 2π` rounds to exactly 2π.
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// A directed segment stored as start point, length and heading.
///
/// The heading's unit vector is cached since distance queries dominate the
/// hot loop of the one-pass encoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedSegment {
    start: Point,
    length: f64,
    theta: f64,
    cos: f64,
    sin: f64,
}

impl DirectedSegment {
    /// Zero-length segment anchored at `start` (heading stored as 0).
    pub fn degenerate(start: Point) -> Self {
        DirectedSegment {
            start,
            length: 0.0,
            theta: 0.0,
            cos: 1.0,
            sin: 0.0,
        }
    }

    pub fn from_polar(start: Point, length: f64, theta: f64) -> Self {
        if length <= 0.0 {
            return Self::degenerate(start);
        }
        let theta = normalize_angle(theta);
        let (sin, cos) = theta.sin_cos();
        DirectedSegment {
            start,
            length,
            theta,
            cos,
            sin,
        }
    }

    pub fn from_points(a: Point, b: Point) -> Self {
        let length = a.distance(&b);
        if length == 0.0 {
            return Self::degenerate(a);
        }
        let dx = (b.x - a.x) / length;
        let dy = (b.y - a.y) / length;
        DirectedSegment {
            start: a,
            length,
            theta: angle_of(&a, &b),
            cos: dx,
            sin: dy,
        }
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Unit heading vector `(cos θ, sin θ)`.
    pub fn direction(&self) -> (f64, f64) {
        (self.cos, self.sin)
    }

    /// End point; its timestamp is copied from the start.
    pub fn end(&self) -> Point {
        Point::new(
            self.start.x + self.length * self.cos,
            self.start.y + self.length * self.sin,
            self.start.t,
        )
    }

    pub fn is_degenerate(&self) -> bool {
        self.length == 0.0
    }
}

/// Heading of the ray `a → b` in `[0, 2π)`; 0 when the points coincide.
pub fn angle_of(a: &Point, b: &Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    normalize_angle(dy.atan2(dx))
}

/// Perpendicular distance from `p` to the infinite line through `seg`.
///
/// Falls back to the distance to `seg.start()` for a zero-length segment.
pub fn point_line_distance(p: &Point, seg: &DirectedSegment) -> f64 {
    let dx = p.x - seg.start.x;
    let dy = p.y - seg.start.y;
    if seg.is_degenerate() {
        return dx.hypot(dy);
    }
    (seg.cos * dy - seg.sin * dx).abs()
}

/// Distance from `p` to the line through `a` and `b` (to `a` if they coincide).
pub fn distance_to_line(p: &Point, a: &Point, b: &Point) -> f64 {
    let ux = b.x - a.x;
    let uy = b.y - a.y;
    let len = ux.hypot(uy);
    let dx = p.x - a.x;
    let dy = p.y - a.y;
    if len == 0.0 {
        return dx.hypot(dy);
    }
    (ux * dy - uy * dx).abs() / len
}

/// `l2.θ − l1.θ`, left in `(−2π, 2π)`.
pub fn included_angle(l1: &DirectedSegment, l2: &DirectedSegment) -> f64 {
    l2.theta - l1.theta
}

/// Sign used by the fitting function to rotate the fitted line toward `r`.
///
/// Returns +1 when `r.θ − l_prev.θ` lies in
/// `(−2π, −3π/2] ∪ [−π, −π/2] ∪ [0, π/2] ∪ [π, 3π/2)`, −1 otherwise.
pub fn fit_sign(r: &DirectedSegment, l_prev: &DirectedSegment) -> i8 {
    sign_of_included_angle(included_angle(l_prev, r))
}

pub(crate) fn sign_of_included_angle(a: f64) -> i8 {
    let positive = (a > -TAU && a <= -3.0 * FRAC_PI_2)
        || (-PI..=-FRAC_PI_2).contains(&a)
        || (0.0..=FRAC_PI_2).contains(&a)
        || (PI..3.0 * FRAC_PI_2).contains(&a);
    if positive {
        1
    } else {
        -1
    }
}

/// Intersection of the infinite lines through `l1` and `l2`.
///
/// Returns `None` for parallel or coincident lines (`|sin(θ1 − θ2)| < tol`).
/// The timestamp of the result is 0; callers assign their own.
pub fn line_intersection(l1: &DirectedSegment, l2: &DirectedSegment, parallel_tol: f64) -> Result<Option<Point>> {
    if l1.is_degenerate() || l2.is_degenerate() {
        return Err(Error::Precondition(
            "line_intersection needs two segments of positive length",
        ));
    }
    let denom = l1.cos * l2.sin - l1.sin * l2.cos;
    if denom.abs() < parallel_tol {
        return Ok(None);
    }
    let wx = l2.start.x - l1.start.x;
    let wy = l2.start.y - l1.start.y;
    let s = (wx * l2.sin - wy * l2.cos) / denom;
    Ok(Some(Point::new(l1.start.x + s * l1.cos, l1.start.y + s * l1.sin, 0.0)))
}

/// Equirectangular projection about a reference coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equirectangular {
    lon0: f64,
    lat0: f64,
    meters_per_lon_degree: f64,
}

impl Equirectangular {
    pub const METERS_PER_LAT_DEGREE: f64 = 110_540.0;
    pub const METERS_PER_LON_DEGREE_AT_EQUATOR: f64 = 111_320.0;

    pub fn new(lon0: f64, lat0: f64) -> Self {
        Equirectangular {
            lon0,
            lat0,
            meters_per_lon_degree: Self::METERS_PER_LON_DEGREE_AT_EQUATOR * lat0.to_radians().cos(),
        }
    }

    /// Maps `(lon, lat)` in degrees to planar meters `(x, y)`.
    pub fn project(&self, lon: f64, lat: f64) -> (f64, f64) {
        (
            (lon - self.lon0) * self.meters_per_lon_degree,
            (lat - self.lat0) * Self::METERS_PER_LAT_DEGREE,
        )
    }
}
