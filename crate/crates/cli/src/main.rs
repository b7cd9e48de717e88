//! `mapdist`: build Mapper graphs, compare them, and run drift checks from
//! the command line.

mod commands;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mapdist", about = "Distances between Mapper graphs, and drift detection built on them")]
struct Cli {
    /// Emit one JSON object on stdout instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Mapper construction flags shared by `build-mapper` and `drift-baseline`.
#[derive(Debug, Args)]
struct MapperArgs {
    /// `coord:K` (K-th coordinate) or `file:PATH` (one lens value per row).
    #[arg(long, default_value = "coord:0")]
    lens: String,
    #[arg(long)]
    resolution: usize,
    #[arg(long)]
    gain: f64,
    /// `single-linkage-gap`, `single-linkage-gap:RATIO:RELATIVE` or `epsilon:E`.
    #[arg(long, default_value = "single-linkage-gap")]
    cluster: String,
    /// Ambient metric: euclidean, manhattan or cosine.
    #[arg(long, default_value = "euclidean")]
    metric: String,
    /// Intrinsic edge lengths: `extrinsic` (Hausdorff between node sets) or `unit`.
    #[arg(long, default_value = "extrinsic")]
    edge_weight: String,
}

/// Distance selection shared by the comparison commands.
#[derive(Debug, Args)]
struct MethodArgs {
    /// naw, wasserstein, gw, fgw or flb.
    #[arg(long, default_value = "naw")]
    method: String,
    /// Solve transport problems with log-domain Sinkhorn instead of exactly.
    #[arg(long)]
    sinkhorn: bool,
    /// Sinkhorn regularization (default: 5% of the median cost).
    #[arg(long, requires = "sinkhorn")]
    epsilon: Option<f64>,
    /// Weight on the NAW cost (default 0.5).
    #[arg(long)]
    naw_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a Mapper graph from a numeric CSV point cloud.
    BuildMapper {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        mapper: MapperArgs,
        /// Output graph JSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between two graph JSON files.
    Compare {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Pairwise distances between every `*.json` graph in a directory, in file-name order.
    CompareMatrix {
        #[arg(long)]
        dir: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
        /// Output CSV without header (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponential kernel matrix over a TU-format attributed graph dataset.
    Kernel {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        method: MethodArgs,
        /// Kernel bandwidth in exp(-gamma d) (default: 1 / median distance).
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resample a reference cloud and store the drift baseline.
    DriftBaseline {
        #[arg(long)]
        input: PathBuf,
        /// Row indices (0-based, whitespace or comma separated) left out of the reference.
        #[arg(long)]
        exclude_rows: Option<PathBuf>,
        /// Number of resampled graphs.
        #[arg(long = "B", default_value_t = 100)]
        resamples: usize,
        /// Points per resample (default: size of the reference cloud).
        #[arg(long = "n")]
        sample_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.95)]
        quantile: f64,
        #[command(flatten)]
        mapper: MapperArgs,
        /// Distance stored with the baseline and reused when scoring.
        #[arg(long, default_value = "naw")]
        method: String,
        #[arg(long)]
        sinkhorn: bool,
        #[arg(long, requires = "sinkhorn")]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a candidate cloud against a stored baseline; prints `distance,percentile,outlier`.
    DriftScore {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        /// Write the baseline distance histogram as `lo,hi,count` CSV.
        #[arg(long)]
        emit_hist: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        sinkhorn: bool,
        #[arg(long, requires = "sinkhorn")]
        epsilon: Option<f64>,
    },
    /// Sample a synthetic point cloud as CSV.
    Synth {
        /// moons or circles.
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gaussian noise (default 0.05 for moons, 0.03 for circles).
        #[arg(long)]
        noise: Option<f64>,
        /// Inner-to-outer radius ratio for circles.
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a perturbation (or a JSON array of them, in order) to a graph.
    Perturb {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn version() -> String {
    format!("{} (schema {})", env!("CARGO_PKG_VERSION"), mapdist::SCHEMA_VERSION)
}

fn parse_args() -> Result<Cli, ExitCode> {
    // clap wants a 'static version string; this runs once per process.
    let version: &'static str = Box::leak(version().into_boxed_str());
    let matches = Cli::command().version(version).try_get_matches().and_then(|m| Cli::from_arg_matches(&m));
    matches.map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::user("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    commands::dispatch(cli.command, cli.json)
}

fn main() -> ExitCode {
    let cli = match parse_args() {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(text)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("mapdist: error: {e}");
            ExitCode::from(e.exit_code())
        }
        // The panic hook has already printed the message.
        Err(_) => ExitCode::from(2),
    }
}
