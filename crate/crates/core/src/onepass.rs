//! Streaming one-pass encoders: OPERB and its patching variant OPERB-A.
//!
//! [`OperbEncoder`] receives each point exactly once through
//! [`OperbEncoder::push`] and emits segments as soon as they are final. Its
//! state is a fixed-size value: the fitted segment, at most one segment still
//! absorbing trailing points, and (OPERB-A) at most two segments held back
//! until a patch decision can be made.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{apply, classify, FitConfig, FitState, PointClass, DISTANCE_SLACK};
use crate::geometry::{included_angle, line_intersection, DirectedSegment, Point};
use crate::repr::{PiecewiseRepresentation, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Emit every closed segment immediately.
    Operb,
    /// Buffer segments so anomalous ones can be replaced by a patch point.
    OperbA,
}

/// Closed segments not yet emitted by OPERB-A.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PendingBuffer {
    prev: Option<Segment>,
    anom: Option<Segment>,
}

impl PendingBuffer {
    pub fn prev(&self) -> Option<&Segment> {
        self.prev.as_ref()
    }

    pub fn anom(&self) -> Option<&Segment> {
        self.anom.as_ref()
    }

    pub fn len(&self) -> usize {
        self.prev.is_some() as usize + self.anom.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct OperbEncoder {
    cfg: FitConfig,
    mode: Mode,
    fit: Option<FitState>,
    pending: PendingBuffer,
    absorb: Option<Segment>,
    consumed: usize,
    last_point: Point,
    anomalous_candidates: usize,
    patches: usize,
    finished: bool,
}

impl OperbEncoder {
    /// An encoder waiting for its first point.
    pub fn new(cfg: FitConfig, mode: Mode) -> Result<Self> {
        cfg.validate()?;
        Ok(OperbEncoder {
            cfg,
            mode,
            fit: None,
            pending: PendingBuffer::default(),
            absorb: None,
            consumed: 0,
            last_point: Point::new(0.0, 0.0, f64::NEG_INFINITY),
            anomalous_candidates: 0,
            patches: 0,
            finished: false,
        })
    }

    /// An encoder already anchored at `first`.
    pub fn start(cfg: FitConfig, mode: Mode, first: Point) -> Result<Self> {
        let mut enc = Self::new(cfg, mode)?;
        enc.push(first)?;
        Ok(enc)
    }

    pub fn config(&self) -> &FitConfig {
        &self.cfg
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn fit_state(&self) -> Option<&FitState> {
        self.fit.as_ref()
    }

    pub fn pending(&self) -> &PendingBuffer {
        &self.pending
    }

    pub fn absorbing(&self) -> Option<&Segment> {
        self.absorb.as_ref()
    }

    /// Points consumed so far.
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// Anomalous segments that entered the lazy buffer as patch candidates.
    pub fn anomalous_candidates(&self) -> usize {
        self.anomalous_candidates
    }

    pub fn patches(&self) -> usize {
        self.patches
    }

    /// Consumes `p` and returns whatever segments became final.
    pub fn push(&mut self, p: Point) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        self.push_into(p, &mut out)?;
        Ok(out)
    }

    /// Like [`push`](Self::push) but appends to a caller-owned buffer.
    pub fn push_into(&mut self, p: Point, out: &mut Vec<Segment>) -> Result<()> {
        if self.finished {
            return Err(Error::Precondition("push after finish"));
        }
        let index = self.consumed;
        if !p.is_finite() {
            return Err(Error::NonFinite { index });
        }
        let Some(mut fit) = self.fit else {
            self.fit = Some(FitState::new(p));
            self.consumed = 1;
            self.last_point = p;
            return Ok(());
        };
        if p.t <= self.last_point.t {
            return Err(Error::NonMonotoneTimestamp {
                index,
                previous: self.last_point.t,
                t: p.t,
            });
        }
        self.consumed += 1;
        self.last_point = p;
        let zeta = self.cfg.zeta;

        if let Some(seg) = self.absorb.as_mut() {
            if seg.line_distance(&p) <= zeta * (1.0 + DISTANCE_SLACK) {
                seg.covered += 1;
                seg.last_index = index;
                return Ok(());
            }
            let seg = self.absorb.take().expect("absorbing segment present");
            self.route(seg, out);
        }

        let c = classify(&fit, &p, &self.cfg);
        if c.class != PointClass::Break {
            apply(&mut fit, &p, &c, &self.cfg);
            self.fit = Some(fit);
            return Ok(());
        }

        let closed = Segment {
            start: fit.anchor(),
            end: fit.last_active(),
            covered: 1 + fit.points_in_segment(),
            last_index: index - 1,
            patched_start: false,
        };
        let mut fresh = FitState::new(fit.last_active());
        if self.cfg.opts.absorb && closed.line_distance(&p) <= zeta * (1.0 + DISTANCE_SLACK) {
            self.absorb = Some(Segment {
                covered: closed.covered + 1,
                last_index: index,
                ..closed
            });
            self.fit = Some(fresh);
            return Ok(());
        }
        self.route(closed, out);

        let c = classify(&fresh, &p, &self.cfg);
        if c.class == PointClass::Break {
            return Err(Error::Invariant("point breaks a freshly anchored segment".into()));
        }
        apply(&mut fresh, &p, &c, &self.cfg);
        self.fit = Some(fresh);
        Ok(())
    }

    /// Closes the open segment at the last pushed point and flushes all
    /// buffered segments.
    pub fn finish(&mut self) -> Result<Vec<Segment>> {
        if self.finished {
            return Err(Error::Precondition("finish called twice"));
        }
        let Some(fit) = self.fit else {
            return Err(Error::EmptyInput);
        };
        self.finished = true;
        let last_index = self.consumed - 1;
        let last = self.last_point;
        let mut out = Vec::new();

        if let Some(mut seg) = self.absorb.take() {
            // The final point was absorbed; hand it to a closing segment so
            // the representation ends on it.
            seg.covered -= 1;
            seg.last_index -= 1;
            let end = seg.end;
            self.route(seg, &mut out);
            self.route(
                Segment {
                    start: end,
                    end: last,
                    covered: 2,
                    last_index,
                    patched_start: false,
                },
                &mut out,
            );
        } else {
            let k = fit.points_in_segment();
            if k == 0 {
                if self.consumed != 1 {
                    return Err(Error::Invariant("open segment is empty at finish".into()));
                }
                self.route(
                    Segment {
                        start: fit.anchor(),
                        end: fit.anchor(),
                        covered: 1,
                        last_index,
                        patched_start: false,
                    },
                    &mut out,
                );
            } else if !fit.has_active() || fit.last_active() == last {
                self.route(
                    Segment {
                        start: fit.anchor(),
                        end: last,
                        covered: 1 + k,
                        last_index,
                        patched_start: false,
                    },
                    &mut out,
                );
            } else {
                // Points after the last active point were checked against
                // ℛ_a and stay with it; the final point gets its own segment.
                let e = fit.last_active();
                self.route(
                    Segment {
                        start: fit.anchor(),
                        end: e,
                        covered: k,
                        last_index: last_index - 1,
                        patched_start: false,
                    },
                    &mut out,
                );
                self.route(
                    Segment {
                        start: e,
                        end: last,
                        covered: 2,
                        last_index,
                        patched_start: false,
                    },
                    &mut out,
                );
            }
        }

        if let Some(prev) = self.pending.prev.take() {
            out.push(prev);
        }
        if let Some(anom) = self.pending.anom.take() {
            out.push(anom);
        }
        Ok(out)
    }

    fn route(&mut self, seg: Segment, out: &mut Vec<Segment>) {
        match self.mode {
            Mode::Operb => out.push(seg),
            Mode::OperbA => self.route_lazy(seg, out),
        }
    }

    fn route_lazy(&mut self, seg: Segment, out: &mut Vec<Segment>) {
        match (self.pending.prev.take(), self.pending.anom.take()) {
            (None, _) => self.pending.prev = Some(seg),
            (Some(prev), None) => {
                if seg.is_anomalous() {
                    self.anomalous_candidates += 1;
                    self.pending.prev = Some(prev);
                    self.pending.anom = Some(seg);
                } else {
                    out.push(prev);
                    self.pending.prev = Some(seg);
                }
            }
            (Some(prev), Some(anom)) => match try_patch(&prev, &anom, &seg, &self.cfg) {
                Some(g) => {
                    self.patches += 1;
                    out.push(Segment { end: g, ..prev });
                    self.pending.prev = Some(Segment {
                        start: g,
                        patched_start: true,
                        ..seg
                    });
                }
                None => {
                    out.push(prev);
                    out.push(anom);
                    self.pending.prev = Some(seg);
                }
            },
        }
    }
}

/// Patch point replacing the anomalous `anom` between `prev` and `next`.
///
/// `G` is the intersection of the lines of `prev` and `next`. It is accepted
/// only if it lies ahead of `prev.start` along `prev` and no further than
/// `next.start` along `next` (so neither line changes direction), at least
/// `|prev| − ζ/2` from `prev.start`, and the turn from `prev` to `next` keeps
/// a clearance of `γ_m` from a full reversal.
pub fn try_patch(prev: &Segment, anom: &Segment, next: &Segment, cfg: &FitConfig) -> Option<Point> {
    if !anom.is_anomalous() {
        return None;
    }
    let lp = DirectedSegment::from_points(prev.start, prev.end);
    let ln = DirectedSegment::from_points(next.start, next.end);
    if lp.is_degenerate() || ln.is_degenerate() {
        return None;
    }
    let g = line_intersection(&lp, &ln, cfg.parallel_tol).ok()??;

    let (ux, uy) = lp.direction();
    let along_prev = (g.x - prev.start.x) * ux + (g.y - prev.start.y) * uy;
    let (vx, vy) = ln.direction();
    let along_next = (g.x - next.start.x) * vx + (g.y - next.start.y) * vy;
    let slack = 1e-9 * cfg.zeta;
    if along_prev <= 0.0 || along_next > slack {
        return None;
    }
    if along_prev < lp.length() - cfg.zeta / 2.0 {
        return None;
    }
    if !turn_within_limit(included_angle(&lp, &ln), cfg.gamma_m) {
        return None;
    }
    Some(Point::new(g.x, g.y, 0.5 * (anom.start.t + anom.end.t)))
}

/// `a ∈ (−2π, −π−γ] ∪ [γ−π, π−γ] ∪ [π+γ, 2π)`.
fn turn_within_limit(a: f64, gamma_m: f64) -> bool {
    (a > -TAU && a <= -PI - gamma_m) || (gamma_m - PI..=PI - gamma_m).contains(&a) || (a >= PI + gamma_m && a < TAU)
}

/// Compresses a whole stream in one pass.
pub fn simplify_stream<I>(points: I, cfg: &FitConfig, mode: Mode) -> Result<PiecewiseRepresentation>
where
    I: IntoIterator<Item = Point>,
{
    let mut enc = OperbEncoder::new(*cfg, mode)?;
    let mut segments = Vec::new();
    for p in points {
        enc.push_into(p, &mut segments)?;
    }
    segments.extend(enc.finish()?);
    Ok(PiecewiseRepresentation {
        segments,
        anomalous_candidates: enc.anomalous_candidates(),
        patches: enc.patches(),
    })
}

/// Compresses an in-memory trajectory.
pub fn simplify(traj: &[Point], cfg: &FitConfig, mode: Mode) -> Result<PiecewiseRepresentation> {
    if traj.is_empty() {
        return Err(Error::EmptyInput);
    }
    simplify_stream(traj.iter().copied(), cfg, mode)
}
