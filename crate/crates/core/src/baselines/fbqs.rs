use crate::error::Result;
use crate::geometry::{distance_to_line, Point};
use crate::repr::PiecewiseRepresentation;

use super::{check_zeta, from_breakpoints, trivial};

/// Bounding data for the buffered points of one quadrant around the anchor,
/// in coordinates relative to the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantHull {
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
    /// Point with the smallest angle from the anchor.
    pub low: (f64, f64),
    /// Point with the largest angle from the anchor.
    pub high: (f64, f64),
}

impl QuadrantHull {
    fn new(v: (f64, f64)) -> Self {
        QuadrantHull {
            min_x: v.0,
            max_x: v.0,
            min_y: v.1,
            max_y: v.1,
            low: v,
            high: v,
        }
    }

    fn insert(&mut self, v: (f64, f64)) {
        self.min_x = self.min_x.min(v.0);
        self.max_x = self.max_x.max(v.0);
        self.min_y = self.min_y.min(v.1);
        self.max_y = self.max_y.max(v.1);
        if cross(v, self.low) > 0.0 {
            self.low = v;
        }
        if cross(self.high, v) > 0.0 {
            self.high = v;
        }
    }

    /// Vertices of the box clipped to the wedge between the two extreme rays.
    ///
    /// Every buffered point of the quadrant lies in their convex hull.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let rect = vec![
            (self.min_x, self.min_y),
            (self.max_x, self.min_y),
            (self.max_x, self.max_y),
            (self.min_x, self.max_y),
        ];
        let extent = (self.max_x.abs().max(self.min_x.abs())).max(self.max_y.abs().max(self.min_y.abs()));
        let tol = 1e-12 * extent * extent;
        let (low, high) = (self.low, self.high);
        let clipped = clip(&rect, |v| cross(low, v) + tol);
        let clipped = clip(&clipped, |v| cross(v, high) + tol);
        if clipped.is_empty() {
            rect
        } else {
            clipped
        }
    }
}

/// Per-quadrant hulls of the points buffered since the window's anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct HullState {
    anchor: Point,
    quads: [Option<QuadrantHull>; 4],
}

impl HullState {
    pub fn new(anchor: Point) -> Self {
        HullState {
            anchor,
            quads: [None; 4],
        }
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn quadrant(&self, q: usize) -> Option<&QuadrantHull> {
        self.quads[q].as_ref()
    }

    pub fn insert(&mut self, p: &Point) {
        let v = (p.x - self.anchor.x, p.y - self.anchor.y);
        // Points on the anchor are at distance zero from every candidate line.
        let Some(q) = quadrant_of(v) else { return };
        match &mut self.quads[q] {
            Some(h) => h.insert(v),
            slot => *slot = Some(QuadrantHull::new(v)),
        }
    }

    /// All significant points, in absolute coordinates.
    pub fn significant_points(&self) -> Vec<Point> {
        self.quads
            .iter()
            .flatten()
            .flat_map(|h| h.vertices())
            .map(|(x, y)| Point::new(self.anchor.x + x, self.anchor.y + y, self.anchor.t))
            .collect()
    }

    /// Upper bound on the distance of any buffered point to line(anchor, `end`).
    pub fn upper_bound(&self, end: &Point) -> f64 {
        self.significant_points()
            .iter()
            .map(|v| distance_to_line(v, &self.anchor, end))
            .fold(0.0, f64::max)
    }

    /// Lower bound on the same maximum, from the angle-extreme points, which
    /// are actual buffered points.
    pub fn lower_bound(&self, end: &Point) -> f64 {
        let a = self.anchor;
        self.quads
            .iter()
            .flatten()
            .flat_map(|h| [h.low, h.high])
            .map(|(x, y)| distance_to_line(&Point::new(a.x + x, a.y + y, a.t), &a, end))
            .fold(0.0, f64::max)
    }
}

/// Fast bounded-quadrant simplification: extend the window while the hull
/// bound certifies every buffered point within `zeta` of line(P_s, P_k);
/// otherwise close at `k − 1` and restart there.
pub fn fbqs_simplify(traj: &[Point], zeta: f64) -> Result<PiecewiseRepresentation> {
    check_zeta(zeta)?;
    if let Some(rep) = trivial(traj)? {
        return Ok(rep);
    }
    let n = traj.len();
    let mut keep = vec![0usize];
    let mut hull = HullState::new(traj[0]);
    for k in 1..n {
        if hull.upper_bound(&traj[k]) > zeta {
            keep.push(k - 1);
            hull = HullState::new(traj[k - 1]);
        }
        hull.insert(&traj[k]);
    }
    keep.push(n - 1);
    Ok(from_breakpoints(traj, &keep))
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Quadrants are half-open so each nonzero vector has exactly one.
fn quadrant_of((x, y): (f64, f64)) -> Option<usize> {
    match (x, y) {
        (x, y) if x > 0.0 && y >= 0.0 => Some(0),
        (x, y) if x <= 0.0 && y > 0.0 => Some(1),
        (x, y) if x < 0.0 && y <= 0.0 => Some(2),
        (x, y) if x >= 0.0 && y < 0.0 => Some(3),
        _ => None,
    }
}

/// One Sutherland–Hodgman pass keeping the side where `f >= 0`.
fn clip(poly: &[(f64, f64)], f: impl Fn((f64, f64)) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    for (i, &a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}
