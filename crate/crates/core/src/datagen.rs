//! Deterministic synthetic trajectories, figure fixtures and the
//! optimal-segment-count oracle.
//!
//! All randomness comes from [`SplitMix64`], so a [`GenSpec`] fully
//! determines its output on every platform.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_to_line, Point};
use crate::io::read_csv;

/// SplitMix64 (Steele, Lea and Flood): state += 0x9E3779B97F4A7C15, then
/// two xor-shift-multiply rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    pub const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
    pub const MIX2: u64 = 0x94D0_49BB_1331_11EB;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(Self::MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(Self::MIX2);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Figure {
    /// Fifteen-point path used for the DP, OPERB and OPERB-A walkthroughs.
    Fig1,
    /// Short window for the FBQS hull bounds.
    Fig5,
    /// Road turn whose corner sample is missing.
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fig1, Figure::Fig5, Figure::Fig7];

    /// Error bound the fixture is designed for.
    pub fn zeta(self) -> f64 {
        match self {
            Figure::Fig1 => 0.65,
            Figure::Fig5 => 1.0,
            Figure::Fig7 => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig5 => "fig5",
            Figure::Fig7 => "fig7",
        }
    }

    fn csv(self) -> &'static str {
        match self {
            Figure::Fig1 => include_str!("../data/fig1.csv"),
            Figure::Fig5 => include_str!("../data/fig5.csv"),
            Figure::Fig7 => include_str!("../data/fig7.csv"),
        }
    }

    pub fn points(self) -> Vec<Point> {
        let mut trajs = read_csv(self.csv().as_bytes(), Path::new(self.name()), false).expect("bundled fixture parses");
        trajs.remove(0).points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GenKind {
    RandomWalk,
    GridRoute,
    StepwiseAdversarial,
    FigureFixture(Figure),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    pub step: f64,
    /// Only used by the stepwise generator.
    pub zeta: f64,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64, step: f64) -> Self {
        GenSpec {
            kind,
            n,
            seed,
            step,
            zeta: step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.kind == GenKind::StepwiseAdversarial && !(self.zeta.is_finite() && self.zeta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "zeta must be positive, got {}",
                self.zeta
            )));
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<Vec<Point>> {
    spec.validate()?;
    match spec.kind {
        GenKind::RandomWalk => Ok(gen_random_walk(spec)),
        GenKind::GridRoute => Ok(gen_grid_route(spec)),
        GenKind::StepwiseAdversarial => gen_stepwise_adversarial(spec.n.saturating_sub(1), spec.zeta),
        GenKind::FigureFixture(f) => Ok(f.points()),
    }
}

/// `count` trajectories with lengths drawn from `n_min..=n_max`, seeded from `seed`.
pub fn corpus(kind: GenKind, count: usize, seed: u64, n_min: usize, n_max: usize, step: f64) -> Vec<Vec<Point>> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let n = rng.range(n_min as u64, n_max as u64) as usize;
            let spec = GenSpec::new(kind, n, rng.next_u64(), step);
            generate(&spec).expect("corpus spec is valid")
        })
        .collect()
}

/// Fixed-length steps with headings drifting by up to ±π/8 per step.
pub fn gen_random_walk(spec: &GenSpec) -> Vec<Point> {
    let mut rng = SplitMix64::new(spec.seed);
    let mut heading = rng.uniform(0.0, TAU);
    let (mut x, mut y) = (0.0, 0.0);
    let mut out = Vec::with_capacity(spec.n);
    out.push(Point::new(x, y, 0.0));
    for i in 1..spec.n {
        heading += rng.uniform(-PI / 8.0, PI / 8.0);
        x += spec.step * heading.cos();
        y += spec.step * heading.sin();
        out.push(Point::new(x, y, i as f64));
    }
    out
}

/// Axis-aligned legs of 5–20 steps joined by right-angle turns. Each corner
/// sample is dropped with probability 0.5; its timestamp is skipped too.
pub fn gen_grid_route(spec: &GenSpec) -> Vec<Point> {
    const DIRS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
    let mut rng = SplitMix64::new(spec.seed);
    let mut dir = rng.range(0, 3) as usize;
    let (mut x, mut y) = (0.0, 0.0);
    let mut t = 0u64;
    let mut out = Vec::with_capacity(spec.n);
    out.push(Point::new(x, y, 0.0));
    let mut left = rng.range(5, 20);
    while out.len() < spec.n {
        x += spec.step * DIRS[dir].0;
        y += spec.step * DIRS[dir].1;
        t += 1;
        left -= 1;
        if left == 0 {
            let drop = rng.bernoulli(0.5);
            dir = if rng.bernoulli(0.5) {
                (dir + 1) % 4
            } else {
                (dir + 3) % 4
            };
            left = rng.range(5, 20);
            if drop {
                continue;
            }
        }
        out.push(Point::new(x, y, t as f64));
    }
    out
}

/// Anchor plus `k` points with `|P_s P_{s+i}| = iζ/2`, each placed ζ/2 to the
/// left of the previous fitted direction, which then turns by `asin(1/i)/i`.
pub fn gen_stepwise_adversarial(k: usize, zeta: f64) -> Result<Vec<Point>> {
    if !(2..=100_000).contains(&k) {
        return Err(Error::InvalidConfig(format!("k must be in 2..=100000, got {k}")));
    }
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::InvalidConfig(format!("zeta must be positive, got {zeta}")));
    }
    let mut out = Vec::with_capacity(k + 1);
    out.push(Point::new(0.0, 0.0, 0.0));
    out.push(Point::new(zeta / 2.0, 0.0, 1.0));
    let mut theta = 0.0f64;
    for i in 2..=k {
        let fi = i as f64;
        let step = (1.0 / fi).asin();
        let phi = theta + step;
        let r = fi * zeta / 2.0;
        out.push(Point::new(r * phi.cos(), r * phi.sin(), fi));
        theta += step / fi;
    }
    Ok(out)
}

/// Largest input accepted by [`optimal_segments`].
pub const OPTIMAL_MAX_POINTS: usize = 2_000;

/// Fewest continuous segments with sampled endpoints keeping every point
/// within `zeta` of its segment's line.
///
/// For each start `i` the lines through `P_i` within `zeta` of all points
/// seen so far form an intersection of direction arcs (mod π); an edge
/// `i → j` exists when the direction to `P_j` lies inside it. Distances are
/// compared against `zeta · (1 + 1e-9)`, so the count never exceeds the true
/// optimum under the verifier's tolerance.
pub fn optimal_segments(traj: &[Point], zeta: f64) -> Result<usize> {
    let n = traj.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > OPTIMAL_MAX_POINTS {
        return Err(Error::TooLarge {
            len: n,
            max: OPTIMAL_MAX_POINTS,
        });
    }
    if n <= 2 {
        return Ok(1);
    }
    let tol = zeta * (1.0 + 1e-9);
    let mut best = vec![usize::MAX; n];
    best[0] = 0;
    for i in 0..n - 1 {
        let base = best[i];
        let origin = traj[i];
        let mut arcs = ArcSet::full();
        let mut max_radius = 0.0f64;
        for j in i + 1..n {
            let (dx, dy) = (traj[j].x - origin.x, traj[j].y - origin.y);
            let r = dx.hypot(dy);
            let feasible = if r == 0.0 {
                max_radius <= tol
            } else {
                arcs.contains(dy.atan2(dx).rem_euclid(PI))
            };
            if feasible && base + 1 < best[j] {
                best[j] = base + 1;
            }
            if r > tol {
                arcs.intersect(dy.atan2(dx), (tol / r).asin());
                if arcs.is_empty() {
                    break;
                }
            }
            max_radius = max_radius.max(r);
        }
    }
    Ok(best[n - 1])
}

/// O(n³) reference for [`optimal_segments`], for small inputs in tests.
pub fn optimal_segments_brute_force(traj: &[Point], zeta: f64) -> usize {
    let n = traj.len();
    if n <= 2 {
        return 1;
    }
    let tol = zeta * (1.0 + 1e-9);
    let mut best = vec![usize::MAX; n];
    best[0] = 0;
    for j in 1..n {
        for i in 0..j {
            let ok = (i + 1..j).all(|k| distance_to_line(&traj[k], &traj[i], &traj[j]) <= tol);
            if ok && best[i] + 1 < best[j] {
                best[j] = best[i] + 1;
            }
        }
    }
    best[n - 1]
}

/// Fewest contiguous runs whose points each fit in a strip of half-width
/// `zeta` around some line.
///
/// Unlike [`optimal_segments`] the lines are unconstrained, so this is a
/// floor for every algorithm whose segments partition the input into runs
/// within `zeta` of the segment line, including ones that cover points past
/// a segment's end or start segments at interpolated points. Greedy maximal
/// runs are optimal because any sub-run of a feasible run is feasible.
pub fn strip_partition_floor(traj: &[Point], zeta: f64) -> Result<usize> {
    let n = traj.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > OPTIMAL_MAX_POINTS {
        return Err(Error::TooLarge {
            len: n,
            max: OPTIMAL_MAX_POINTS,
        });
    }
    let limit = 2.0 * zeta * (1.0 + 1e-9);
    let mut runs = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && point_set_width(&traj[start..=end]) <= limit {
            end += 1;
        }
        runs += 1;
        // The last point of a run also starts the next one.
        if end >= n {
            break;
        }
        start = end;
    }
    Ok(runs)
}

/// Minimum width over all strip directions, via the convex hull.
fn point_set_width(points: &[Point]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let base = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= base + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return 0.0;
    }
    let h = hull.len();
    (0..h)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % h]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            hull.iter().map(|&q| cross(a, b, q).abs() / len).fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Union of closed intervals on `[0, π)`, read as line directions.
#[derive(Debug, Clone)]
struct ArcSet {
    intervals: Vec<(f64, f64)>,
}

impl ArcSet {
    /// Small angular slack so boundary directions are not lost to rounding;
    /// the distance tolerance already makes the set generous.
    const SLACK: f64 = 1e-12;

    fn full() -> Self {
        ArcSet {
            intervals: vec![(0.0, PI)],
        }
    }

    fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    fn contains(&self, phi: f64) -> bool {
        [phi, phi + PI, phi - PI].iter().any(|&a| {
            self.intervals
                .iter()
                .any(|&(lo, hi)| a >= lo - Self::SLACK && a <= hi + Self::SLACK)
        })
    }

    /// Intersects with directions within `half` of `center` (mod π).
    fn intersect(&mut self, center: f64, half: f64) {
        if half >= PI / 2.0 {
            return;
        }
        let lo = (center - half).rem_euclid(PI);
        let hi = lo + 2.0 * half;
        let pieces: &[(f64, f64)] = if hi <= PI {
            &[(lo, hi)]
        } else {
            &[(lo, PI), (0.0, hi - PI)]
        };
        let mut next = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            for &(c, d) in pieces {
                let (l, h) = (a.max(c), b.min(d));
                if l <= h {
                    next.push((l, h));
                }
            }
        }
        self.intervals = next;
    }
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
    fn splitmix_reference_values() {
        // Reference outputs for seed 1234567.
        let mut rng = SplitMix64::new(1234567);
        let expected = [
            6457827717110365317u64,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for e in expected {
            assert_eq!(rng.next_u64(), e);
        }
    }

    #[test]
    fn random_walk_is_deterministic_with_fixed_steps() {
        let spec = GenSpec::new(GenKind::RandomWalk, 1000, 7, 5.0);
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        let length: f64 = a.windows(2).map(|w| w[0].distance(&w[1])).sum();
        assert!((length - 999.0 * 5.0).abs() < 1e-6);
        let one = generate(&GenSpec::new(GenKind::RandomWalk, 1, 7, 5.0)).unwrap();
        assert_eq!(one, vec![Point::new(0.0, 0.0, 0.0)]);
        assert!(generate(&GenSpec::new(GenKind::RandomWalk, 0, 7, 5.0)).is_err());
    }

    #[test]
    fn grid_route_is_axis_aligned() {
        let spec = GenSpec::new(GenKind::GridRoute, 500, 3, 10.0);
        let a = generate(&spec).unwrap();
        assert_eq!(a.len(), 500);
        assert_eq!(a, generate(&spec).unwrap());
        let mut dropped = 0;
        for w in a.windows(2) {
            assert!(w[1].t > w[0].t);
            if w[1].t - w[0].t == 1.0 {
                let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
                assert!(dx == 0.0 || dy == 0.0);
            } else {
                dropped += 1;
            }
        }
        assert!(dropped > 0);
    }

    #[test]
    fn stepwise_radii_and_offsets() {
        let zeta = 2.0;
        let traj = gen_stepwise_adversarial(200, zeta).unwrap();
        assert_eq!(traj.len(), 201);
        let mut theta = 0.0f64;
        for (i, p) in traj.iter().enumerate().skip(1) {
            let r = p.x.hypot(p.y);
            assert!((r - i as f64 * zeta / 2.0).abs() < 1e-9 * r);
            if i >= 2 {
                let fi = i as f64;
                let off = (p.x * theta.sin() - p.y * theta.cos()).abs();
                assert!((off - zeta / 2.0).abs() < 1e-9 * r);
                theta += (1.0 / fi).asin() / fi;
            }
        }
        assert!(gen_stepwise_adversarial(1, zeta).is_err());
        assert!(gen_stepwise_adversarial(100_001, zeta).is_err());
    }

    #[test]
    fn fixtures_load() {
        assert_eq!(Figure::Fig1.points().len(), 15);
        for f in Figure::ALL {
            let p = f.points();
            assert!(p.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn optimal_examples() {
        let line = pts(&(0..50).map(|i| (i as f64, 0.5 * i as f64)).collect::<Vec<_>>());
        assert_eq!(optimal_segments(&line, 0.1).unwrap(), 1);
        let tent = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert_eq!(optimal_segments(&tent, 0.5).unwrap(), 2);
        assert_eq!(optimal_segments(&tent, 1.5).unwrap(), 1);
        let big = vec![Point::new(0.0, 0.0, 0.0); OPTIMAL_MAX_POINTS + 1];
        assert!(matches!(optimal_segments(&big, 1.0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn optimal_matches_brute_force() {
        for seed in 0..40u64 {
            for kind in [GenKind::RandomWalk, GenKind::GridRoute] {
                let traj = generate(&GenSpec::new(kind, 60, seed, 10.0)).unwrap();
                for zeta in [2.0, 5.0, 15.0, 40.0] {
                    assert_eq!(
                        optimal_segments(&traj, zeta).unwrap(),
                        optimal_segments_brute_force(&traj, zeta),
                        "seed {seed} {kind:?} zeta {zeta}"
                    );
                }
            }
        }
    }

    #[test]
    fn strip_floor_examples() {
        let tent = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        // Width of the tent is 2/sqrt(5) along its long side.
        assert_eq!(strip_partition_floor(&tent, 0.5).unwrap(), 1);
        assert_eq!(strip_partition_floor(&tent, 0.4).unwrap(), 2);
        let square = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!((point_set_width(&square) - 1.0).abs() < 1e-15);
        for seed in 0..20u64 {
            let traj = generate(&GenSpec::new(GenKind::RandomWalk, 200, seed, 10.0)).unwrap();
            for zeta in [2.0, 10.0, 40.0] {
                assert!(strip_partition_floor(&traj, zeta).unwrap() <= optimal_segments(&traj, zeta).unwrap());
            }
        }
    }

    #[test]
    fn arc_set_wraps() {
        let mut arcs = ArcSet::full();
        arcs.intersect(0.0, 0.1);
        assert!(arcs.contains(0.05));
        assert!(arcs.contains(PI - 0.05));
        assert!(!arcs.contains(PI / 2.0));
        arcs.intersect(PI / 2.0, 0.1);
        assert!(arcs.is_empty());
    }
}
