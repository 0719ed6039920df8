//! Benchmark harness: every (algorithm, ζ) pair over a corpus, with a JSON
//! report and a console table.
//!
//! Only the compression calls are timed. Trajectories are handed to worker
//! threads one at a time; results are reassembled in input order, so reports
//! do not depend on the thread count.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::algorithm::Algorithm;
use crate::error::{Error, Result};
use crate::fitting::{FitConfig, Optimizations};
use crate::geometry::Point;
use crate::metrics::CompressionStats;
use crate::repr::PiecewiseRepresentation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub algorithms: Vec<Algorithm>,
    pub zeta_list: Vec<f64>,
    pub gamma_m: f64,
    #[serde(serialize_with = "display")]
    pub opts: Optimizations,
    pub threads: usize,
}

fn display<S: serde::Serializer>(v: &Optimizations, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl RunConfig {
    pub fn new(algorithms: Vec<Algorithm>, zeta_list: Vec<f64>) -> Self {
        RunConfig {
            algorithms,
            zeta_list,
            gamma_m: FitConfig::DEFAULT_GAMMA_M,
            opts: Optimizations::ALL,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms selected".into()));
        }
        if self.zeta_list.is_empty() {
            return Err(Error::InvalidConfig("no zeta values given".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        for &z in &self.zeta_list {
            self.fit_config(z)?;
        }
        Ok(())
    }

    pub fn fit_config(&self, zeta: f64) -> Result<FitConfig> {
        let cfg = FitConfig::new(zeta)?.with_opts(self.opts).with_gamma_m(self.gamma_m);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBlock {
    pub algo: Algorithm,
    pub zeta: f64,
    pub stats: CompressionStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub corpus: String,
    pub config: RunConfig,
    pub results: Vec<ResultBlock>,
}

/// Compresses `trajs` with `algo` on `threads` workers; returns the
/// representations in input order and the elapsed wall time in seconds.
pub fn compress_corpus<T: AsRef<[Point]> + Sync>(
    trajs: &[T],
    algo: Algorithm,
    cfg: &FitConfig,
    threads: usize,
) -> Result<(Vec<PiecewiseRepresentation>, f64)> {
    if threads <= 1 || trajs.len() <= 1 {
        let start = Instant::now();
        let reps = trajs
            .iter()
            .map(|t| algo.run(t.as_ref(), cfg))
            .collect::<Result<Vec<_>>>()?;
        return Ok((reps, start.elapsed().as_secs_f64()));
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<PiecewiseRepresentation>>>> =
        Mutex::new((0..trajs.len()).map(|_| None).collect());
    let start = Instant::now();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(trajs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= trajs.len() {
                    break;
                }
                let rep = algo.run(trajs[i].as_ref(), cfg);
                slots.lock().expect("no worker panicked")[i] = Some(rep);
            });
        }
    });
    let elapsed = start.elapsed().as_secs_f64();
    let reps = slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every trajectory processed"))
        .collect::<Result<Vec<_>>>()?;
    Ok((reps, elapsed))
}

pub fn run_compare<T: AsRef<[Point]> + Sync>(corpus: &str, trajs: &[T], cfg: &RunConfig) -> Result<CompareReport> {
    cfg.validate()?;
    if trajs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut results = Vec::with_capacity(cfg.algorithms.len() * cfg.zeta_list.len());
    for &algo in &cfg.algorithms {
        for &zeta in &cfg.zeta_list {
            let fit = cfg.fit_config(zeta)?;
            let (reps, wall) = compress_corpus(trajs, algo, &fit, cfg.threads)?;
            let stats = CompressionStats::collect(&reps, trajs, wall)?;
            results.push(ResultBlock { algo, zeta, stats });
        }
    }
    Ok(CompareReport {
        corpus: corpus.to_string(),
        config: cfg.clone(),
        results,
    })
}

/// Aligned plain-text summary. Ratio is segments / input points.
pub fn render_table(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "corpus: {} (ratio = segments / points)", report.corpus);
    let _ = writeln!(
        out,
        "{:<8} {:>8} {:>9} {:>9} {:>9} {:>10} {:>10} {:>8} {:>10}",
        "algo", "zeta", "points", "segments", "ratio", "avg_err", "max_err", "patch", "time_s"
    );
    for r in &report.results {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{:<8} {:>8} {:>9} {:>9} {:>9.4} {:>10.4} {:>10.4} {:>8.3} {:>10.4}",
            r.algo.name(),
            r.zeta,
            s.input_points,
            s.output_segments,
            s.ratio,
            s.avg_error,
            s.max_error,
            s.patching_ratio,
            s.wall_time
        );
    }
    out
}
