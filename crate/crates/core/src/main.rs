use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use operb::compare::{render_table, run_compare, RunConfig};
use operb::datagen::{self, Figure, GenKind, GenSpec};
use operb::io::{self as csvio, Trajectory};
use operb::metrics::{verify_error_bound, CompressionStats};
use operb::{Algorithm, Error, FitConfig, Optimizations, Result};

#[derive(Parser)]
#[command(name = "operb", version, about = "Error-bounded trajectory simplification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress every trajectory in a CSV file and write the segments.
    Compress(CompressArgs),
    /// Run algorithms over a corpus for several error bounds and report statistics.
    Compare(CompareArgs),
    /// Generate a synthetic corpus.
    Gen(GenArgs),
    /// Compress and check every point against the error bound.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Radians; patch points are refused for turns closer than this to a reversal.
    #[arg(long, default_value_t = FitConfig::DEFAULT_GAMMA_M)]
    gamma_m: f64,
    /// Enabled optimizations: `all`, `none`, or a list such as `1,3,5`.
    #[arg(long, default_value = "all")]
    opts: String,
}

impl FitArgs {
    fn opts(&self) -> Result<Optimizations> {
        self.opts.parse()
    }

    fn config(&self, zeta: f64) -> Result<FitConfig> {
        let cfg = FitConfig::new(zeta)?.with_opts(self.opts()?).with_gamma_m(self.gamma_m);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    input: PathBuf,
    /// Segment CSV; stdout if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "operb-a")]
    algo: String,
    /// Error bound in meters.
    #[arg(long)]
    epsilon: f64,
    /// Input x/y are longitude/latitude degrees.
    #[arg(long)]
    geo: bool,
    #[command(flatten)]
    fit: FitArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusKind {
    RandomWalk,
    GridRoute,
}

#[derive(Args)]
struct CompareArgs {
    /// Input CSV; a synthetic corpus is generated if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// JSON report path; the table always goes to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "dp,opw,fbqs,operb,operb-a")]
    algo: String,
    /// Comma-separated error bounds in meters.
    #[arg(long, value_delimiter = ',', default_value = "5,20,40,100")]
    epsilon_list: Vec<f64>,
    #[arg(long)]
    geo: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value = "grid-route")]
    corpus: CorpusKind,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    fit: FitArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKindArg {
    RandomWalk,
    GridRoute,
    Stepwise,
    Fig1,
    Fig5,
    Fig7,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKindArg,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step length in meters.
    #[arg(long, default_value_t = 10.0)]
    step: f64,
    /// Error bound for the stepwise generator.
    #[arg(long, default_value_t = 10.0)]
    epsilon: f64,
    /// Trajectory CSV; stdout if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "dp,opw,fbqs,operb,operb-a")]
    algo: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    geo: bool,
    #[command(flatten)]
    fit: FitArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Compress(a) => compress(a),
        Command::Compare(a) => compare(a),
        Command::Gen(a) => generate(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        })?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn flush(mut w: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    })
}

fn compress(a: CompressArgs) -> Result<ExitCode> {
    let algo: Algorithm = a.algo.parse()?;
    let cfg = a.fit.config(a.epsilon)?;
    let trajs = csvio::ingest_csv(&a.input, a.geo)?;
    let reps = trajs
        .iter()
        .map(|t| algo.run(&t.points, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let named: Vec<_> = trajs.iter().map(|t| t.id.as_str()).zip(reps.iter()).collect();
    let mut w = open_output(a.output.as_deref())?;
    csvio::write_segments(&mut w, &named)?;
    flush(w, a.output.as_deref())?;
    let stats = CompressionStats::collect(&reps, &trajs, 0.0)?;
    eprintln!(
        "{algo}: {} points -> {} segments (ratio {:.4}, max error {:.4})",
        stats.input_points, stats.output_segments, stats.ratio, stats.max_error
    );
    Ok(ExitCode::SUCCESS)
}

fn compare(a: CompareArgs) -> Result<ExitCode> {
    let algorithms = Algorithm::parse_list(&a.algo)?;
    let mut cfg = RunConfig::new(algorithms, a.epsilon_list.clone());
    cfg.gamma_m = a.fit.gamma_m;
    cfg.opts = a.fit.opts()?;
    cfg.threads = a.threads;
    cfg.validate()?;
    let (label, trajs) = match &a.input {
        Some(path) => (path.display().to_string(), csvio::ingest_csv(path, a.geo)?),
        None => {
            let kind = match a.corpus {
                CorpusKind::RandomWalk => GenKind::RandomWalk,
                CorpusKind::GridRoute => GenKind::GridRoute,
            };
            GenSpec::new(kind, a.n, a.seed, a.step).validate()?;
            let trajs = datagen::corpus(kind, a.count, a.seed, a.n, a.n, a.step);
            let label = format!("{kind:?} x{} n={} step={} seed={}", a.count, a.n, a.step, a.seed);
            (label, named(trajs, "t"))
        }
    };
    let report = run_compare(&label, &trajs, &cfg)?;
    print!("{}", render_table(&report));
    if let Some(path) = &a.output {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        serde_json::to_writer_pretty(BufWriter::new(file), &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn named(trajs: Vec<Vec<operb::Point>>, prefix: &str) -> Vec<Trajectory> {
    trajs
        .into_iter()
        .enumerate()
        .map(|(i, points)| Trajectory {
            id: format!("{prefix}{i}"),
            points,
        })
        .collect()
}

fn generate(a: GenArgs) -> Result<ExitCode> {
    let (kind, prefix) = match a.kind {
        GenKindArg::RandomWalk => (GenKind::RandomWalk, "walk"),
        GenKindArg::GridRoute => (GenKind::GridRoute, "grid"),
        GenKindArg::Stepwise => (GenKind::StepwiseAdversarial, "stepwise"),
        GenKindArg::Fig1 => (GenKind::FigureFixture(Figure::Fig1), "fig1"),
        GenKindArg::Fig5 => (GenKind::FigureFixture(Figure::Fig5), "fig5"),
        GenKindArg::Fig7 => (GenKind::FigureFixture(Figure::Fig7), "fig7"),
    };
    let mut rng = datagen::SplitMix64::new(a.seed);
    let mut trajs = Vec::with_capacity(a.count);
    for _ in 0..a.count {
        let mut spec = GenSpec::new(kind, a.n, rng.next_u64(), a.step);
        spec.zeta = a.epsilon;
        trajs.push(datagen::generate(&spec)?);
    }
    let mut w = open_output(a.output.as_deref())?;
    csvio::write_trajectories(&mut w, &named(trajs, prefix))?;
    flush(w, a.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let algorithms = Algorithm::parse_list(&a.algo)?;
    let cfg = a.fit.config(a.epsilon)?;
    let trajs = csvio::ingest_csv(&a.input, a.geo)?;
    let mut failed = false;
    for algo in algorithms {
        let mut bad = 0usize;
        for t in &trajs {
            let rep = algo.run(&t.points, &cfg)?;
            let report = verify_error_bound(&rep, &t.points, a.epsilon);
            if !report.ok {
                bad += 1;
                if let Some(e) = &report.coverage_error {
                    eprintln!("{algo} {}: {e}", t.id);
                }
                for (i, d) in report.violations.iter().take(5) {
                    eprintln!("{algo} {}: point {i} at distance {d}", t.id);
                }
            }
        }
        println!(
            "{algo}: {} of {} trajectories within {}",
            trajs.len() - bad,
            trajs.len(),
            a.epsilon
        );
        failed |= bad > 0;
    }
    Ok(if failed { ExitCode::from(3) } else { ExitCode::SUCCESS })
}
