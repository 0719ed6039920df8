use crate::error::Result;
use crate::geometry::{distance_to_line, Point};
use crate::repr::PiecewiseRepresentation;

use super::{check_zeta, from_breakpoints, trivial};

/// Douglas–Peucker: split at the farthest point while it is more than `zeta`
/// from the chord. Ties go to the smallest index.
pub fn dp_simplify(traj: &[Point], zeta: f64) -> Result<PiecewiseRepresentation> {
    check_zeta(zeta)?;
    if let Some(rep) = trivial(traj)? {
        return Ok(rep);
    }
    let n = traj.len();
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((s, e)) = stack.pop() {
        let (a, b) = (traj[s], traj[e]);
        let mut best = (0usize, -1.0f64);
        for (i, p) in traj.iter().enumerate().take(e).skip(s + 1) {
            let d = distance_to_line(p, &a, &b);
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 > zeta {
            keep[best.0] = true;
            stack.push((best.0, e));
            stack.push((s, best.0));
        }
    }
    let idx: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    Ok(from_breakpoints(traj, &idx))
}
