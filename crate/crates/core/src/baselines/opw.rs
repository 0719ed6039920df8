use crate::error::Result;
use crate::geometry::{distance_to_line, Point};
use crate::repr::PiecewiseRepresentation;

use super::{check_zeta, from_breakpoints, trivial};

/// Open window: grow `[s, k]` while every inner point is within `zeta` of
/// line(P_s, P_k); on failure close at `k − 1` and restart there.
pub fn opw_simplify(traj: &[Point], zeta: f64) -> Result<PiecewiseRepresentation> {
    opw_simplify_counted(traj, zeta).map(|(rep, _)| rep)
}

/// [`opw_simplify`] plus the number of point-to-line distance evaluations.
pub fn opw_simplify_counted(traj: &[Point], zeta: f64) -> Result<(PiecewiseRepresentation, u64)> {
    check_zeta(zeta)?;
    if let Some(rep) = trivial(traj)? {
        return Ok((rep, 0));
    }
    let n = traj.len();
    let mut evals = 0u64;
    let mut keep = vec![0usize];
    let mut s = 0usize;
    let mut k = 2usize;
    while k < n {
        let (a, b) = (traj[s], traj[k]);
        let fits = traj[s + 1..k].iter().all(|p| {
            evals += 1;
            distance_to_line(p, &a, &b) <= zeta
        });
        if fits {
            k += 1;
        } else {
            s = k - 1;
            keep.push(s);
            k = s + 2;
        }
    }
    keep.push(n - 1);
    Ok((from_breakpoints(traj, &keep), evals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<Point> {
        xy.iter()
            .enumerate()
            .map(|(i, &(x, y))| Point::new(x, y, i as f64))
            .collect()
    }

    #[test]
    fn collinear_is_one_segment() {
        let traj = pts(&(0..20).map(|i| (i as f64, 2.0 * i as f64)).collect::<Vec<_>>());
        let rep = opw_simplify(&traj, 0.1).unwrap();
        assert_eq!(rep.len(), 1);
        assert_eq!(rep.segments[0].covered, 20);
    }

    #[test]
    fn window_closes_before_violating_point() {
        let traj = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 2.0), (3.0, 0.0)]);
        let rep = opw_simplify(&traj, 0.5).unwrap();
        assert_eq!(rep.segments[0].start, traj[0]);
        assert_eq!(rep.segments[0].end, traj[1]);
        rep.check_continuity(&traj).unwrap();
    }

    #[test]
    fn evaluations_grow_quadratically_on_a_long_window() {
        let line = |n: usize| pts(&(0..n).map(|i| (i as f64, 0.0)).collect::<Vec<_>>());
        let (_, e1) = opw_simplify_counted(&line(100), 1.0).unwrap();
        let (_, e2) = opw_simplify_counted(&line(200), 1.0).unwrap();
        assert_eq!(e1, (1..=98).sum::<u64>());
        assert!(e2 > 3 * e1);
    }
}
