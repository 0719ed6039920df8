//! Evaluation quantities: compression ratio, average and maximum error,
//! the Z(k) histogram, patching ratio, and the per-point error-bound check.
//!
//! Ratios count output segments against input points. Stored points
//! (segments + 1) are reported alongside so either convention is available.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::repr::PiecewiseRepresentation;

/// Relative slack allowed by [`verify_error_bound`].
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CompressionStats {
    pub input_points: usize,
    pub output_segments: usize,
    pub stored_points: usize,
    pub ratio: f64,
    pub avg_error: f64,
    pub max_error: f64,
    /// Z(k): number of segments covering exactly k points.
    pub histogram: BTreeMap<usize, usize>,
    /// N_a: anomalous segments before patching.
    pub anomalous: usize,
    /// N_p: patch points inserted.
    pub patched: usize,
    pub patching_ratio: f64,
    /// Seconds spent compressing, excluding I/O.
    pub wall_time: f64,
}

impl CompressionStats {
    /// Aggregates one run over a corpus. `reps[i]` must describe `trajs[i]`.
    pub fn collect<T: AsRef<[Point]>>(reps: &[PiecewiseRepresentation], trajs: &[T], wall_time: f64) -> Result<Self> {
        let ratio = compression_ratio(reps, trajs)?;
        let mut total = 0.0;
        let mut max_error = 0.0f64;
        for (rep, traj) in reps.iter().zip(trajs) {
            for d in point_errors(rep, traj.as_ref())? {
                total += d;
                max_error = max_error.max(d);
            }
        }
        let input_points: usize = trajs.iter().map(|t| t.as_ref().len()).sum();
        let anomalous = reps.iter().map(|r| r.anomalous_candidates).sum();
        let patched = reps.iter().map(|r| r.patches).sum();
        Ok(CompressionStats {
            input_points,
            output_segments: reps.iter().map(|r| r.len()).sum(),
            stored_points: reps.iter().map(|r| r.stored_points()).sum(),
            ratio,
            avg_error: total / input_points as f64,
            max_error,
            histogram: segment_histogram(reps),
            anomalous,
            patched,
            patching_ratio: patching_ratio(patched, anomalous),
            wall_time,
        })
    }
}

/// Total segments over total input points.
pub fn compression_ratio<T: AsRef<[Point]>>(reps: &[PiecewiseRepresentation], trajs: &[T]) -> Result<f64> {
    check_lengths(reps, trajs)?;
    let points: usize = trajs.iter().map(|t| t.as_ref().len()).sum();
    if points == 0 {
        return Err(Error::EmptyInput);
    }
    let segments: usize = reps.iter().map(|r| r.len()).sum();
    Ok(segments as f64 / points as f64)
}

/// Mean distance of every input point to the line of its covering segment.
pub fn average_error<T: AsRef<[Point]>>(reps: &[PiecewiseRepresentation], trajs: &[T]) -> Result<f64> {
    check_lengths(reps, trajs)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (rep, traj) in reps.iter().zip(trajs) {
        let errs = point_errors(rep, traj.as_ref())?;
        count += errs.len();
        sum += errs.iter().sum::<f64>();
    }
    if count == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(sum / count as f64)
}

/// Largest point-to-line distance in one representation.
pub fn max_error(rep: &PiecewiseRepresentation, traj: &[Point]) -> Result<f64> {
    Ok(point_errors(rep, traj)?.into_iter().fold(0.0, f64::max))
}

/// Distance of each input point to the line of the segment covering it.
pub fn point_errors(rep: &PiecewiseRepresentation, traj: &[Point]) -> Result<Vec<f64>> {
    let map = rep.covering(traj.len())?;
    Ok(traj
        .iter()
        .zip(map)
        .map(|(p, k)| rep.segments[k].line_distance(p))
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub ok: bool,
    /// `(point index, distance)` for every point beyond the bound.
    pub violations: Vec<(usize, f64)>,
    /// Set when the segments do not partition the input.
    pub coverage_error: Option<String>,
}

/// Checks every point against `zeta · (1 + 1e-9)`.
pub fn verify_error_bound(rep: &PiecewiseRepresentation, traj: &[Point], zeta: f64) -> BoundReport {
    let limit = zeta * (1.0 + BOUND_TOLERANCE);
    match point_errors(rep, traj) {
        Ok(errs) => {
            let violations: Vec<_> = errs
                .into_iter()
                .enumerate()
                .filter(|&(_, d)| d > limit || d.is_nan())
                .collect();
            BoundReport {
                ok: violations.is_empty(),
                violations,
                coverage_error: None,
            }
        }
        Err(e) => BoundReport {
            ok: false,
            violations: Vec::new(),
            coverage_error: Some(e.to_string()),
        },
    }
}

/// Z(k) over all segments of all representations.
pub fn segment_histogram(reps: &[PiecewiseRepresentation]) -> BTreeMap<usize, usize> {
    let mut z = BTreeMap::new();
    for seg in reps.iter().flat_map(|r| &r.segments) {
        *z.entry(seg.covered).or_insert(0) += 1;
    }
    z
}

/// N_p / N_a, or 0 when there were no anomalous segments.
pub fn patching_ratio(patched: usize, anomalous: usize) -> f64 {
    if anomalous == 0 {
        0.0
    } else {
        patched as f64 / anomalous as f64
    }
}

fn check_lengths<T>(reps: &[PiecewiseRepresentation], trajs: &[T]) -> Result<()> {
    if reps.len() != trajs.len() {
        return Err(Error::InvalidConfig(format!(
            "{} representations for {} trajectories",
            reps.len(),
            trajs.len()
        )));
    }
    if reps.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::Segment;

    fn pts(xy: &[(f64, f64)]) -> Vec<Point> {
        xy.iter()
            .enumerate()
            .map(|(i, &(x, y))| Point::new(x, y, i as f64))
            .collect()
    }

    fn line(n: usize) -> Vec<Point> {
        (0..n).map(|i| Point::new(i as f64, 0.0, i as f64)).collect()
    }

    fn whole(traj: &[Point]) -> PiecewiseRepresentation {
        PiecewiseRepresentation::new(vec![Segment::between(traj, 0, traj.len() - 1)])
    }

    fn split(traj: &[Point], cuts: &[usize]) -> PiecewiseRepresentation {
        PiecewiseRepresentation::new(cuts.windows(2).map(|w| Segment::between(traj, w[0], w[1])).collect())
    }

    #[test]
    fn ratio_examples() {
        let t2 = line(2);
        assert_eq!(
            compression_ratio(&[whole(&t2)], std::slice::from_ref(&t2)).unwrap(),
            0.5
        );

        let a = line(10);
        let b = line(10);
        let reps = [split(&a, &[0, 4, 9]), split(&b, &[0, 3, 6, 9])];
        assert_eq!(compression_ratio(&reps, &[a, b]).unwrap(), 0.25);

        let fifteen = line(15);
        let r = compression_ratio(&[split(&fifteen, &[0, 5, 8, 10, 14])], &[fifteen]).unwrap();
        assert!((r - 4.0 / 15.0).abs() < 1e-15);

        let empty: [Vec<Point>; 0] = [];
        assert!(compression_ratio(&[], &empty).is_err());
    }

    #[test]
    fn average_error_examples() {
        let flat = line(3);
        assert_eq!(
            average_error(&[whole(&flat)], std::slice::from_ref(&flat)).unwrap(),
            0.0
        );
        let tent = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let e = average_error(&[whole(&tent)], std::slice::from_ref(&tent)).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bound_check_reports_violations() {
        let traj = pts(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]);
        let report = verify_error_bound(&whole(&traj), &traj, 1.0);
        assert!(!report.ok);
        assert_eq!(report.violations, vec![(1, 2.0)]);

        let single = pts(&[(5.0, 5.0)]);
        let rep = PiecewiseRepresentation::new(vec![Segment::between(&single, 0, 0)]);
        assert!(verify_error_bound(&rep, &single, 1.0).ok);

        let short = PiecewiseRepresentation::new(vec![Segment::between(&traj, 0, 1)]);
        let report = verify_error_bound(&short, &traj, 10.0);
        assert!(!report.ok && report.coverage_error.is_some());
    }

    #[test]
    fn histogram_and_patching_ratio() {
        let t = line(10);
        assert_eq!(segment_histogram(&[whole(&t)]), BTreeMap::from([(10, 1)]));
        let t = line(9);
        assert_eq!(segment_histogram(&[split(&t, &[0, 4, 8])]), BTreeMap::from([(5, 2)]));
        assert_eq!(patching_ratio(0, 0), 0.0);
        assert_eq!(patching_ratio(1, 2), 0.5);
    }

    #[test]
    fn stats_aggregate() {
        let traj = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let s = CompressionStats::collect(&[whole(&traj)], std::slice::from_ref(&traj), 0.5).unwrap();
        assert_eq!(s.input_points, 3);
        assert_eq!(s.output_segments, 1);
        assert_eq!(s.stored_points, 2);
        assert_eq!(s.max_error, 1.0);
        assert!(s.avg_error <= s.max_error);
    }
}
