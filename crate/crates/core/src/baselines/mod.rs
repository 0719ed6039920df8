//! Reference simplifiers used for comparison: Douglas–Peucker, the
//! open-window method and the fast bounded-quadrant system.
//!
//! All three work on in-memory trajectories and report the same
//! [`PiecewiseRepresentation`] as the one-pass encoders, with segments that
//! start and end on sampled points.

mod dp;
mod fbqs;
mod opw;

pub use dp::dp_simplify;
pub use fbqs::{fbqs_simplify, HullState, QuadrantHull};
pub use opw::{opw_simplify, opw_simplify_counted};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::repr::{PiecewiseRepresentation, Segment};

/// Output for inputs too short to simplify, or `None` if there are at least two points.
fn trivial(traj: &[Point]) -> Result<Option<PiecewiseRepresentation>> {
    match traj.len() {
        0 => Err(Error::EmptyInput),
        1 => Ok(Some(PiecewiseRepresentation::new(vec![Segment::between(traj, 0, 0)]))),
        _ => Ok(None),
    }
}

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta.is_finite() && zeta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "zeta must be positive and finite, got {zeta}"
        )))
    }
}

/// Segments joining consecutive kept indices.
fn from_breakpoints(traj: &[Point], keep: &[usize]) -> PiecewiseRepresentation {
    PiecewiseRepresentation::new(keep.windows(2).map(|w| Segment::between(traj, w[0], w[1])).collect())
}
