use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use anomap::clustering::KMeansConfig;
use anomap::pipeline::{
    run_ablation_k, run_ablation_strategy, run_detect, run_eval, EvalRow, PipelineConfig, Pooling,
    Strategy, DEFAULT_RANDOM_SEEDS,
};
use anomap::synth::{run_synth, PatchRect, SynthConfig};
use anomap::Result;

const EXIT_INVALID: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "anomap",
    version,
    about = "Training-free patch-feature anomaly maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every query and write anomaly maps.
    Detect(RunArgs),
    /// Pixel AUROC/AUPRC over maps written by `detect`.
    Eval(RunArgs),
    /// Detect+eval for each cluster count.
    AblateK {
        #[command(flatten)]
        run: RunArgs,
        /// Cluster counts to sweep.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        k_values: Vec<usize>,
    },
    /// Random vs embedding-matched support selection.
    AblateStrategy {
        #[command(flatten)]
        run: RunArgs,
        /// Seeds averaged for the random row.
        #[arg(long, default_value_t = DEFAULT_RANDOM_SEEDS)]
        random_seeds: usize,
    },
    /// Generate a synthetic benchmark dataset.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Esm,
    Random,
}

#[derive(Args)]
struct RunArgs {
    /// Dataset root containing manifest.json.
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    closing_radius: usize,
    /// Foreground fraction a patch needs to count as foreground.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, value_enum, default_value = "esm")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Average metrics per image instead of pooling all pixels.
    #[arg(long)]
    per_image: bool,
    /// Also write 8-bit PGM heatmaps.
    #[arg(long)]
    pgm: bool,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Recompute support centroids for every query.
    #[arg(long)]
    no_cache: bool,
}

impl RunArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            k: self.k,
            seed: self.seed,
            closing_radius: self.closing_radius,
            tau: self.tau,
            strategy: match self.strategy {
                StrategyArg::Esm => Strategy::Esm,
                StrategyArg::Random => Strategy::Random,
            },
            kmeans: KMeansConfig {
                max_iter: self.max_iter,
                tol: self.tol,
                restarts: self.restarts,
            },
            pooling: if self.per_image {
                Pooling::PerImage
            } else {
                Pooling::Pooled
            },
            workers: self.workers,
            write_pgm: self.pgm,
            cache_centroids: !self.no_cache,
            ..PipelineConfig::new(&self.dataset, &self.out)
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    normals: usize,
    #[arg(long, default_value_t = 10)]
    queries: usize,
    /// Patch grid as HPxWP.
    #[arg(long, default_value = "16x16")]
    grid: String,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Anomalous patch rectangle as row,col,height,width.
    #[arg(long, default_value = "6,6,4,4")]
    anomaly: String,
    #[arg(long, default_value_t = 8)]
    patch_size: usize,
    /// Normal appearance modes (1 or 2).
    #[arg(long, default_value_t = 1)]
    modes: usize,
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || anomap::Error::Validation(format!("grid {s:?} must look like 16x16"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn print_rows(rows: &[EvalRow]) {
    println!("dataset,k,strategy,auroc,auprc,n_queries,n_pixels");
    for r in rows {
        println!(
            "{},{},{},{:.2},{:.2},{},{}",
            r.dataset,
            r.k,
            r.strategy,
            100.0 * r.auroc,
            100.0 * r.auprc,
            r.n_queries,
            r.n_pixels
        );
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Detect(args) => {
            let report = run_detect(&args.config())?;
            for r in &report.results {
                println!(
                    "{}\t{}\t{:.6}",
                    r.query_id, r.support_id, r.support_similarity
                );
            }
            if report.is_partial() {
                error!("{} queries failed", report.failures.len());
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Eval(args) => print_rows(&[run_eval(&args.config())?]),
        Command::AblateK { run, k_values } => {
            let report = run_ablation_k(&run.config(), &k_values)?;
            print_rows(&report.rows);
            if report.failed_queries > 0 {
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::AblateStrategy { run, random_seeds } => {
            let report = run_ablation_strategy(&run.config(), random_seeds)?;
            print_rows(&report.rows);
            if report.failed_queries > 0 {
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Synth(args) => {
            let (hp, wp) = parse_grid(&args.grid)?;
            let cfg = SynthConfig {
                seed: args.seed,
                n_normals: args.normals,
                n_queries: args.queries,
                hp,
                wp,
                dim: args.dim,
                anomaly_rect: args.anomaly.parse::<PatchRect>()?,
                patch_size: args.patch_size,
                modes: args.modes,
                ..SynthConfig::standard(args.seed)
            };
            let m = run_synth(&args.out, &cfg)?;
            println!(
                "wrote {} normals and {} queries to {}",
                m.normal_entries.len(),
                m.query_entries.len(),
                args.out.display()
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
