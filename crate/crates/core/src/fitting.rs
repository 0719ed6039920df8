//! The fitting function behind local distance checking.
//!
//! A [`FitState`] holds one synthetic segment anchored at the current start
//! point. Each new point is classified against it in O(1) and, unless it
//! breaks the segment, folded in by [`fit_step`]. The fitted segment only
//! ever grows in steps of `ζ/2` and rotates toward active points by an
//! arcsine correction divided by the zone index.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fit_sign, point_line_distance, DirectedSegment, Point, PARALLEL_TOLERANCE};

/// Largest number of points a single fitted segment may absorb.
pub const MAX_SEGMENT_POINTS: usize = 400_000;

/// Relative slack on every distance comparison made while fitting.
///
/// Points placed exactly on a threshold (as the stepwise generator does)
/// would otherwise flip on the last ulp.
pub const DISTANCE_SLACK: f64 = 1e-12;

/// Rounding allowance, in ulps of the coordinate magnitude, for distances
/// computed far from the origin or from the anchor.
const ROUNDING_ULPS: f64 = 16.0;

const ZONE_SNAP: f64 = 1e-12;

#[inline]
fn within(value: f64, bound: f64, scale: f64) -> bool {
    value <= bound * (1.0 + DISTANCE_SLACK) + ROUNDING_ULPS * f64::EPSILON * scale
}

/// The five optional refinements of the base one-pass algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Optimizations {
    /// (1) First active point must be more than ζ (not ζ/4) from the anchor.
    pub first_active: bool,
    /// (2) Replace the per-point ζ/2 test with `d⁺max + d⁻max ≤ ζ`.
    pub signed_distance: bool,
    /// (3) Rotate with the larger same-side extreme `d_x` instead of `d`.
    pub closer_fit: bool,
    /// (4) Scale the rotation by the number of zones skipped.
    pub missing_zones: bool,
    /// (5) Keep absorbing points into a closed segment while within ζ.
    pub absorb: bool,
}

impl Optimizations {
    pub const ALL: Optimizations = Optimizations {
        first_active: true,
        signed_distance: true,
        closer_fit: true,
        missing_zones: true,
        absorb: true,
    };

    pub const NONE: Optimizations = Optimizations {
        first_active: false,
        signed_distance: false,
        closer_fit: false,
        missing_zones: false,
        absorb: false,
    };

    /// Bit `i` (0-based) enables optimization `i + 1`.
    pub fn from_bits(bits: u8) -> Self {
        Optimizations {
            first_active: bits & 0b00001 != 0,
            signed_distance: bits & 0b00010 != 0,
            closer_fit: bits & 0b00100 != 0,
            missing_zones: bits & 0b01000 != 0,
            absorb: bits & 0b10000 != 0,
        }
    }

    pub fn bits(&self) -> u8 {
        (self.first_active as u8)
            | (self.signed_distance as u8) << 1
            | (self.closer_fit as u8) << 2
            | (self.missing_zones as u8) << 3
            | (self.absorb as u8) << 4
    }

    /// Iterates over all 32 flag combinations.
    pub fn all_combinations() -> impl Iterator<Item = Optimizations> {
        (0u8..32).map(Optimizations::from_bits)
    }
}

impl Default for Optimizations {
    fn default() -> Self {
        Optimizations::ALL
    }
}

impl fmt::Display for Optimizations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bits() {
            0 => f.write_str("none"),
            0b11111 => f.write_str("all"),
            bits => {
                let on: Vec<String> = (0..5)
                    .filter(|i| bits & (1 << i) != 0)
                    .map(|i| (i + 1).to_string())
                    .collect();
                f.write_str(&on.join(","))
            }
        }
    }
}

impl FromStr for Optimizations {
    type Err = Error;

    /// Accepts `all`, `none`, or a comma-separated list of optimization numbers 1–5.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "all" => return Ok(Optimizations::ALL),
            "none" | "" => return Ok(Optimizations::NONE),
            _ => {}
        }
        let mut bits = 0u8;
        for part in s.split(',') {
            let n: u8 = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad optimization list `{s}`")))?;
            if !(1..=5).contains(&n) {
                return Err(Error::InvalidConfig(format!(
                    "optimization number {n} out of range 1-5"
                )));
            }
            bits |= 1 << (n - 1);
        }
        Ok(Optimizations::from_bits(bits))
    }
}

/// Parameters of one one-pass compression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Error bound ζ in meters.
    pub zeta: f64,
    /// Cap on the points folded into one segment.
    pub k_cap: usize,
    pub opts: Optimizations,
    /// Minimum turn clearance γ_m for patch points (OPERB-A only).
    pub gamma_m: f64,
    pub parallel_tol: f64,
}

impl FitConfig {
    pub const DEFAULT_GAMMA_M: f64 = PI / 3.0;

    /// Default configuration (all optimizations, γ_m = π/3) for bound `zeta`.
    pub fn new(zeta: f64) -> Result<Self> {
        let cfg = FitConfig {
            zeta,
            k_cap: MAX_SEGMENT_POINTS,
            opts: Optimizations::ALL,
            gamma_m: Self::DEFAULT_GAMMA_M,
            parallel_tol: PARALLEL_TOLERANCE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_opts(mut self, opts: Optimizations) -> Self {
        self.opts = opts;
        self
    }

    pub fn with_gamma_m(mut self, gamma_m: f64) -> Self {
        self.gamma_m = gamma_m;
        self
    }

    pub fn with_k_cap(mut self, k_cap: usize) -> Self {
        self.k_cap = k_cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta.is_finite() && self.zeta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "error bound must be a positive finite number, got {}",
                self.zeta
            )));
        }
        if !(1..=MAX_SEGMENT_POINTS).contains(&self.k_cap) {
            return Err(Error::InvalidConfig(format!(
                "k_cap must be in 1..={MAX_SEGMENT_POINTS}, got {}",
                self.k_cap
            )));
        }
        if !(0.0..=PI).contains(&self.gamma_m) {
            return Err(Error::InvalidConfig(format!(
                "gamma_m must be in [0, pi], got {}",
                self.gamma_m
            )));
        }
        if !(self.parallel_tol >= 0.0 && self.parallel_tol.is_finite()) {
            return Err(Error::InvalidConfig("parallel tolerance must be >= 0".into()));
        }
        Ok(())
    }
}

/// Zone index `⌈2r/ζ − 0.5⌉`, clamped at 0.
///
/// Zone `Z_j` is the annulus `j·ζ/2 − ζ/4 < r ≤ j·ζ/2 + ζ/4`.
pub fn zone_index(r_len: f64, zeta: f64) -> u64 {
    let mut x = r_len * 2.0 / zeta - 0.5;
    let nearest = x.round();
    if (x - nearest).abs() < ZONE_SNAP {
        x = nearest;
    }
    let j = x.ceil();
    if j <= 0.0 {
        0
    } else {
        j as u64
    }
}

/// Radius beyond which the first point after the anchor becomes active.
pub fn first_active_threshold(cfg: &FitConfig) -> f64 {
    if cfg.opts.first_active {
        cfg.zeta
    } else {
        cfg.zeta / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Within ζ/4 of the fitted length: the fitted segment is kept as is.
    Inactive,
    /// Advances to a further zone: the fitted segment grows and rotates.
    Active,
    /// Cannot join the current segment.
    Break,
}

/// Which branch of the fitting function a step took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitCase {
    Unchanged,
    Initial,
    Rotated,
}

/// Outcome of [`classify`], carrying the quantities [`fit_step`] reuses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: PointClass,
    /// `|P_s p|`.
    pub radius: f64,
    /// Heading of `P_s → p`.
    pub heading: f64,
    /// `d(p, ℒ)`; equals `radius` while ℒ has zero length.
    pub distance: f64,
    pub sign: i8,
    /// Signed extremes after including this point.
    pub d_plus_max: f64,
    pub d_minus_max: f64,
}

/// Mutable state of one in-flight fitted segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitState {
    anchor: Point,
    fitted: DirectedSegment,
    r_active: DirectedSegment,
    last_active: Point,
    points_in_segment: usize,
    d_plus_max: f64,
    d_minus_max: f64,
    last_zone: u64,
}

impl FitState {
    pub fn new(anchor: Point) -> Self {
        FitState {
            anchor,
            fitted: DirectedSegment::degenerate(anchor),
            r_active: DirectedSegment::degenerate(anchor),
            last_active: anchor,
            points_in_segment: 0,
            d_plus_max: 0.0,
            d_minus_max: 0.0,
            last_zone: 0,
        }
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    /// The fitted segment ℒ.
    pub fn fitted(&self) -> &DirectedSegment {
        &self.fitted
    }

    /// ℛ_a, from the anchor to the last active point.
    pub fn active_ray(&self) -> &DirectedSegment {
        &self.r_active
    }

    pub fn last_active(&self) -> Point {
        self.last_active
    }

    /// Points folded in after the anchor.
    pub fn points_in_segment(&self) -> usize {
        self.points_in_segment
    }

    pub fn d_plus_max(&self) -> f64 {
        self.d_plus_max
    }

    pub fn d_minus_max(&self) -> f64 {
        self.d_minus_max
    }

    pub fn last_zone(&self) -> u64 {
        self.last_zone
    }

    /// True once any point after the anchor has been active.
    pub fn has_active(&self) -> bool {
        !self.fitted.is_degenerate()
    }
}

/// Classifies `p` against `state` without modifying it.
pub fn classify(state: &FitState, p: &Point, cfg: &FitConfig) -> Classification {
    let zeta = cfg.zeta;
    let r = DirectedSegment::from_points(state.anchor, *p);
    let radius = r.length();
    let capped = state.points_in_segment >= cfg.k_cap;

    if state.fitted.is_degenerate() {
        // Every point inside the threshold is within ζ of any line through
        // the anchor, so no distance test applies yet.
        let class = if capped {
            PointClass::Break
        } else if radius > first_active_threshold(cfg) {
            PointClass::Active
        } else {
            PointClass::Inactive
        };
        return Classification {
            class,
            radius,
            heading: r.theta(),
            distance: radius,
            sign: 1,
            d_plus_max: state.d_plus_max,
            d_minus_max: state.d_minus_max,
        };
    }

    let distance = point_line_distance(p, &state.fitted);
    let sign = fit_sign(&r, &state.fitted);
    let (d_plus_max, d_minus_max) = if sign > 0 {
        (state.d_plus_max.max(distance), state.d_minus_max)
    } else {
        (state.d_plus_max, state.d_minus_max.max(distance))
    };
    let scale = radius + state.anchor.x.abs() + state.anchor.y.abs();
    let line_ok = if cfg.opts.signed_distance {
        within(d_plus_max + d_minus_max, zeta, scale)
    } else {
        within(distance, zeta / 2.0, scale)
    };
    let inactive = radius - state.fitted.length() <= zeta / 4.0;

    let class = if capped || !line_ok {
        PointClass::Break
    } else if inactive {
        if within(point_line_distance(p, &state.r_active), zeta, scale) {
            PointClass::Inactive
        } else {
            PointClass::Break
        }
    } else {
        PointClass::Active
    };

    Classification {
        class,
        radius,
        heading: r.theta(),
        distance,
        sign,
        d_plus_max,
        d_minus_max,
    }
}

/// Largest `d_x` whose per-step rotation `asin(d_x/step)/j` stays within
/// `asin(d/step)`.
fn closer_fit_bound(distance: f64, step: f64, j: f64) -> f64 {
    let alpha = (distance / step).clamp(0.0, 1.0).asin();
    if j * alpha >= FRAC_PI_2 {
        step
    } else {
        step * (j * alpha).sin()
    }
}

/// Folds a classified, non-breaking point into `state`.
pub(crate) fn apply(state: &mut FitState, p: &Point, c: &Classification, cfg: &FitConfig) -> FitCase {
    debug_assert_ne!(c.class, PointClass::Break);
    let half = cfg.zeta / 2.0;
    state.points_in_segment += 1;
    state.d_plus_max = c.d_plus_max;
    state.d_minus_max = c.d_minus_max;

    if c.class == PointClass::Inactive {
        return FitCase::Unchanged;
    }

    let case = if state.fitted.is_degenerate() {
        let j = zone_index(c.radius, cfg.zeta).max(1);
        state.fitted = DirectedSegment::from_polar(state.anchor, j as f64 * half, c.heading);
        state.last_zone = j;
        FitCase::Initial
    } else {
        let j = zone_index(c.radius, cfg.zeta).max(state.last_zone + 1);
        let jf = j as f64;
        let step = jf * half;
        let d_x = if cfg.opts.closer_fit {
            let extreme = if c.sign > 0 { c.d_plus_max } else { c.d_minus_max };
            extreme.min(closer_fit_bound(c.distance, step, jf))
        } else {
            c.distance
        };
        let zones = if cfg.opts.missing_zones {
            (j - state.last_zone) as f64
        } else {
            1.0
        };
        let turn = (d_x / step).clamp(0.0, 1.0).asin() * zones / jf;
        let theta = state.fitted.theta() + f64::from(c.sign) * turn;
        state.fitted = DirectedSegment::from_polar(state.anchor, step, theta);
        state.last_zone = j;
        FitCase::Rotated
    };
    state.last_active = *p;
    state.r_active = DirectedSegment::from_points(state.anchor, *p);
    case
}

/// One application of the fitting function.
///
/// Fails if `p` classifies as a break; callers close the segment instead.
pub fn fit_step(state: &FitState, p: &Point, cfg: &FitConfig) -> Result<(FitState, FitCase)> {
    let c = classify(state, p, cfg);
    if c.class == PointClass::Break {
        return Err(Error::Precondition("fit_step called with a breaking point"));
    }
    let mut next = *state;
    let case = apply(&mut next, p, &c, cfg);
    Ok((next, case))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y, 0.0)
    }

    fn base(zeta: f64) -> FitConfig {
        FitConfig::new(zeta).unwrap().with_opts(Optimizations::NONE)
    }

    #[test]
    fn zone_index_examples() {
        assert_eq!(zone_index(2.0, 4.0), 1);
        assert_eq!(zone_index(1.0, 4.0), 0);
        assert_eq!(zone_index(17f64.sqrt(), 4.0), 2);
        assert_eq!(zone_index(0.0, 4.0), 0);
    }

    #[test]
    fn zone_index_matches_annulus_definition() {
        let zeta = 3.0;
        for step in 1..20_000 {
            let r = step as f64 * 0.000_731 * zeta;
            let j = zone_index(r, zeta) as f64;
            if r > zeta / 4.0 {
                let lo = j * zeta / 2.0 - zeta / 4.0;
                let hi = j * zeta / 2.0 + zeta / 4.0;
                assert!(lo < r && r <= hi + 1e-12, "r={r} j={j}");
            } else {
                assert_eq!(j, 0.0);
            }
        }
    }

    #[test]
    fn first_active_threshold_follows_flag() {
        let cfg = FitConfig::new(4.0).unwrap();
        assert_eq!(first_active_threshold(&cfg), 4.0);
        assert_eq!(first_active_threshold(&base(4.0)), 1.0);
        assert_eq!(first_active_threshold(&FitConfig::new(10.0).unwrap()), 10.0);
    }

    #[test]
    fn classify_examples() {
        let cfg = base(4.0);
        let s = FitState::new(p(0.0, 0.0));
        assert_eq!(classify(&s, &p(0.5, 0.0), &cfg).class, PointClass::Inactive);
        assert_eq!(classify(&s, &p(2.0, 0.0), &cfg).class, PointClass::Active);

        let (s, _) = fit_step(&s, &p(2.0, 0.0), &cfg).unwrap();
        assert_eq!(s.fitted().length(), 2.0);
        // d((2,3), ℒ) = 3 > ζ/2
        assert_eq!(classify(&s, &p(2.0, 3.0), &cfg).class, PointClass::Break);
    }

    #[test]
    fn fit_step_cases() {
        let cfg = base(4.0);
        let s0 = FitState::new(p(0.0, 0.0));

        let (s, case) = fit_step(&s0, &p(0.5, 0.0), &cfg).unwrap();
        assert_eq!(case, FitCase::Unchanged);
        assert_eq!(s.fitted().length(), 0.0);

        let (s, case) = fit_step(&s0, &p(2.0, 0.0), &cfg).unwrap();
        assert_eq!(case, FitCase::Initial);
        assert_eq!(s.fitted().length(), 2.0);
        assert_eq!(s.fitted().theta(), 0.0);

        let (s, case) = fit_step(&s, &p(4.0, 1.0), &cfg).unwrap();
        assert_eq!(case, FitCase::Rotated);
        // Oracle: j = ⌈2·√17/4 − 0.5⌉ = 2, d = 1, sign +1.
        let j = (2.0 * 17f64.sqrt() / 4.0 - 0.5).ceil();
        let expected = (1.0 / (j * 2.0)).asin() / j;
        assert_eq!(s.fitted().length(), 4.0);
        assert!((s.fitted().theta() - expected).abs() < 1e-15);
        assert!((s.fitted().theta() - 0.126_340_127_571_039_3).abs() < 1e-12);
    }

    #[test]
    fn fit_step_rejects_break() {
        let cfg = base(4.0);
        let (s, _) = fit_step(&FitState::new(p(0.0, 0.0)), &p(2.0, 0.0), &cfg).unwrap();
        assert!(matches!(fit_step(&s, &p(2.0, 3.0), &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn k_cap_forces_break() {
        let cfg = base(4.0).with_k_cap(3);
        let mut s = FitState::new(p(0.0, 0.0));
        for i in 1..=3 {
            s = fit_step(&s, &p(i as f64 * 2.0, 0.0), &cfg).unwrap().0;
        }
        assert_eq!(s.points_in_segment(), 3);
        assert_eq!(classify(&s, &p(8.0, 0.0), &cfg).class, PointClass::Break);
    }

    #[test]
    fn first_active_optimization_delays_case_two() {
        let cfg = base(4.0).with_opts(Optimizations::from_bits(0b00001));
        let s = FitState::new(p(0.0, 0.0));
        // Within ζ of the anchor, even far off any later line, stays inactive.
        assert_eq!(classify(&s, &p(0.0, 3.9), &cfg).class, PointClass::Inactive);
        let c = classify(&s, &p(4.5, 0.0), &cfg);
        assert_eq!(c.class, PointClass::Active);
        let (s, case) = fit_step(&s, &p(4.5, 0.0), &cfg).unwrap();
        assert_eq!(case, FitCase::Initial);
        assert_eq!(s.fitted().length(), 4.0);
    }

    #[test]
    fn signed_distance_allows_one_sided_drift_up_to_zeta() {
        let zeta = 4.0;
        let plain = base(zeta);
        let signed = base(zeta).with_opts(Optimizations::from_bits(0b00010));
        let s = fit_step(&FitState::new(p(0.0, 0.0)), &p(2.0, 0.0), &plain).unwrap().0;
        let q = p(4.0, 3.0);
        assert_eq!(classify(&s, &q, &plain).class, PointClass::Break);
        let c = classify(&s, &q, &signed);
        assert_eq!(c.class, PointClass::Active);
        assert_eq!(c.d_plus_max, 3.0);
        assert_eq!(c.d_minus_max, 0.0);
        // Opposite-side deviations add up.
        let s2 = fit_step(&s, &q, &signed).unwrap().0;
        let c = classify(&s2, &p(6.0, -2.0), &signed);
        assert!(c.d_minus_max > 0.0);
        assert_eq!(c.class, PointClass::Break);
    }

    #[test]
    fn missing_zones_scales_rotation() {
        let zeta = 4.0;
        let plain = base(zeta);
        let o4 = base(zeta).with_opts(Optimizations::from_bits(0b01000));
        let s = fit_step(&FitState::new(p(0.0, 0.0)), &p(2.0, 0.0), &plain).unwrap().0;
        // Jump from zone 1 to zone 3.
        let q = p(6.0, 1.0);
        let j = zone_index(q.x.hypot(q.y), zeta) as f64;
        assert_eq!(j, 3.0);
        let a = fit_step(&s, &q, &plain).unwrap().0.fitted().theta();
        let b = fit_step(&s, &q, &o4).unwrap().0.fitted().theta();
        let unit = (1.0 / (j * 2.0)).asin() / j;
        assert!((a - unit).abs() < 1e-15);
        assert!((b - 2.0 * unit).abs() < 1e-15);
    }

    #[test]
    fn closer_fit_respects_restriction() {
        let zeta = 4.0;
        let o3 = base(zeta).with_opts(Optimizations::from_bits(0b00100));
        let mut s = fit_step(&FitState::new(p(0.0, 0.0)), &p(2.0, 0.0), &o3).unwrap().0;
        // Large same-side deviation first, then a small one.
        s = fit_step(&s, &p(2.2, 1.5), &o3).unwrap().0;
        let before = s.fitted().theta();
        let q_dist = 0.2;
        let q = {
            let (c, sn) = (before.cos(), before.sin());
            p(4.0 * c - q_dist * sn, 4.0 * sn + q_dist * c)
        };
        let c = classify(&s, &q, &o3);
        assert_eq!(c.class, PointClass::Active);
        let j = zone_index(c.radius, zeta) as f64;
        let step = j * zeta / 2.0;
        let s2 = fit_step(&s, &q, &o3).unwrap().0;
        let turn = s2.fitted().theta() - before;
        assert!(turn > (c.distance / step).asin() / j);
        assert!(turn <= (c.distance / step).asin() + 1e-12);
    }

    #[test]
    fn optimizations_parse_and_display() {
        assert_eq!("all".parse::<Optimizations>().unwrap(), Optimizations::ALL);
        assert_eq!("none".parse::<Optimizations>().unwrap(), Optimizations::NONE);
        let o: Optimizations = "1,3,5".parse().unwrap();
        assert_eq!(o.bits(), 0b10101);
        assert_eq!(o.to_string(), "1,3,5");
        assert!("6".parse::<Optimizations>().is_err());
        assert_eq!(Optimizations::all_combinations().count(), 32);
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::new(0.0).is_err());
        assert!(FitConfig::new(-1.0).is_err());
        assert!(FitConfig::new(f64::NAN).is_err());
        assert!(FitConfig::new(1.0).unwrap().with_k_cap(0).validate().is_err());
        assert!(FitConfig::new(1.0)
            .unwrap()
            .with_k_cap(MAX_SEGMENT_POINTS + 1)
            .validate()
            .is_err());
        assert!(FitConfig::new(1.0).unwrap().with_gamma_m(4.0).validate().is_err());
    }
}
