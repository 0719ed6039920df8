//! Piecewise line representations shared by all simplifiers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{angle_of, distance_to_line, Point};

/// One output segment.
///
/// A segment represents its start point plus the contiguous run of input
/// indices `(previous.last_index, last_index]`. That run usually ends at the
/// segment's end point but may extend past it, for points that were checked
/// against this segment's line after its last active point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    /// Original points represented, endpoints included.
    pub covered: usize,
    /// Highest input index represented by this segment.
    pub last_index: usize,
    /// The start is an interpolated patch point, not an input point.
    pub patched_start: bool,
}

impl Segment {
    /// Covers exactly the input range `start_index..=end_index` of `traj`.
    pub fn between(traj: &[Point], start_index: usize, end_index: usize) -> Self {
        Segment {
            start: traj[start_index],
            end: traj[end_index],
            covered: end_index - start_index + 1,
            last_index: end_index,
            patched_start: false,
        }
    }

    /// Represents only its own two endpoints.
    pub fn is_anomalous(&self) -> bool {
        self.covered == 2
    }

    pub fn is_degenerate(&self) -> bool {
        self.start.same_position(&self.end)
    }

    pub fn heading(&self) -> f64 {
        angle_of(&self.start, &self.end)
    }

    pub fn length(&self) -> f64 {
        self.start.distance(&self.end)
    }

    /// Distance from `p` to this segment's infinite line.
    pub fn line_distance(&self, p: &Point) -> f64 {
        distance_to_line(p, &self.start, &self.end)
    }
}

/// Ordered continuous segments plus the patching counters of the run that
/// produced them.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PiecewiseRepresentation {
    pub segments: Vec<Segment>,
    /// Anomalous segments buffered as patch candidates (OPERB-A).
    pub anomalous_candidates: usize,
    /// Successful patches (OPERB-A).
    pub patches: usize,
}

impl PiecewiseRepresentation {
    pub fn new(segments: Vec<Segment>) -> Self {
        PiecewiseRepresentation {
            segments,
            anomalous_candidates: 0,
            patches: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn anomalous_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_anomalous()).count()
    }

    pub fn patched_count(&self) -> usize {
        self.segments.iter().filter(|s| s.patched_start).count()
    }

    /// Points stored by the representation: one per segment start plus the final end.
    pub fn stored_points(&self) -> usize {
        if self.segments.is_empty() {
            0
        } else {
            self.segments.len() + 1
        }
    }

    /// For every index of an `n`-point input, the index of the segment covering it.
    pub fn covering(&self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let last = self
            .segments
            .last()
            .ok_or_else(|| Error::Invariant("no segments for a non-empty trajectory".into()))?;
        if last.last_index != n - 1 {
            return Err(Error::Invariant(format!(
                "segments cover indices up to {} but the trajectory has {n} points",
                last.last_index
            )));
        }
        let mut map = Vec::with_capacity(n);
        for (k, seg) in self.segments.iter().enumerate() {
            if k > 0 && seg.last_index < map.len() {
                return Err(Error::Invariant(format!(
                    "segment {k} covers no new points (last index {})",
                    seg.last_index
                )));
            }
            map.resize(seg.last_index + 1, k);
        }
        Ok(map)
    }

    /// Checks endpoint continuity and that the representation spans `traj`.
    pub fn check_continuity(&self, traj: &[Point]) -> Result<()> {
        let (Some(first), Some(last)) = (self.segments.first(), self.segments.last()) else {
            return Err(Error::Invariant("empty representation".into()));
        };
        if first.start != traj[0] {
            return Err(Error::Invariant(
                "first segment does not start at the first point".into(),
            ));
        }
        if last.end != traj[traj.len() - 1] {
            return Err(Error::Invariant("last segment does not end at the last point".into()));
        }
        for (k, w) in self.segments.windows(2).enumerate() {
            if w[0].end != w[1].start {
                return Err(Error::Invariant(format!(
                    "segments {k} and {} are not continuous",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64, 0.0, i as f64)).collect()
    }

    #[test]
    fn covering_maps_ranges() {
        let traj = line(6);
        let rep = PiecewiseRepresentation::new(vec![Segment::between(&traj, 0, 2), Segment::between(&traj, 2, 5)]);
        assert_eq!(rep.covering(6).unwrap(), vec![0, 0, 0, 1, 1, 1]);
        assert!(rep.covering(7).is_err());
        rep.check_continuity(&traj).unwrap();
    }

    #[test]
    fn covering_rejects_empty_ranges() {
        let traj = line(4);
        let rep = PiecewiseRepresentation::new(vec![
            Segment::between(&traj, 0, 3),
            Segment {
                last_index: 3,
                ..Segment::between(&traj, 3, 3)
            },
        ]);
        assert!(rep.covering(4).is_err());
    }

    #[test]
    fn anomalous_and_counts() {
        let traj = line(3);
        let s = Segment::between(&traj, 1, 2);
        assert!(s.is_anomalous());
        assert!(!Segment::between(&traj, 0, 2).is_anomalous());
        let rep = PiecewiseRepresentation::new(vec![Segment::between(&traj, 0, 1), s]);
        assert_eq!(rep.anomalous_count(), 2);
        assert_eq!(rep.stored_points(), 3);
    }
}
