//! `catbbm` — exact Monte Carlo for catalytic branching Brownian motion.
//!
//! Exit status: 0 on success, 1 on operational errors, 2 when `verify`
//! finds a failed criterion.

use catbbm_cli::config::{load_config_file, parse_grid, CommandKind, Config, OutputFormat};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "catbbm",
    version,
    about = "Exactly-sampled catalytic branching Brownian motion: simulation, analytic oracles, and limit-law verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble and write per-run summaries (runs.csv + meta.json).
    Simulate(Flags),
    /// Tabulate the closed-form/quadrature moment oracles (oracle.csv).
    Oracle(Flags),
    /// Run the verification suite and write report.json; nonzero exit on failure.
    Verify(Flags),
    /// Compare the centred-maximum ECDF with the plug-in Gumbel mixture.
    Theorem1(Flags),
    /// Compare empirical P(R_t ≤ βt/2 + z) with its asymptotic estimate.
    Prop6(Flags),
}

#[derive(Args)]
struct Flags {
    /// Branching rate β > 0.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Start position of the initial particle.
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Time horizon t.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Number of independent runs.
    #[arg(long = "n-runs")]
    n_runs: Option<u64>,
    /// Base seed; run i uses substream i.
    #[arg(long)]
    seed: Option<u64>,
    /// Offset grid as a:b:step (levels y, thresholds z).
    #[arg(long = "y-grid", allow_hyphen_values = true)]
    y_grid: Option<String>,
    /// Extra observation times for simulate, comma-separated.
    #[arg(long = "snapshot-times", value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    /// Intermediate martingale time (default t/5).
    #[arg(long = "s-intermediate", allow_negative_numbers = true)]
    s_intermediate: Option<f64>,
    /// Per-run cap on lifetimes; exceeding it aborts the run.
    #[arg(long = "population-cap")]
    population_cap: Option<u64>,
    /// Worker threads for the ensemble (0 = all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Load settings from a config file (bare config or a meta.json);
    /// explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scale every verification tolerance (verify only; < 1 tightens).
    #[arg(long = "tolerance-scale")]
    tolerance_scale: Option<f64>,
    /// Smoke-test ensemble sizes (verify only).
    #[arg(long)]
    quick: bool,
    /// Skip the limit-law criteria 7 and 8 (verify only).
    #[arg(long = "skip-limit-laws")]
    skip_limit_laws: bool,
    /// Also dump per-run genealogies (simulate only; intended for small runs).
    #[arg(long)]
    genealogy: bool,
}

fn build_config(kind: CommandKind, flags: &Flags) -> Result<Config, catbbm_cli::CliError> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let mut loaded = load_config_file(path).map_err(catbbm_cli::CliError::Config)?;
            loaded.command = kind;
            loaded
        }
        None => Config::defaults(kind),
    };
    if let Some(v) = flags.beta {
        cfg.beta = v;
    }
    if let Some(v) = flags.x0 {
        cfg.x0 = v;
    }
    if let Some(v) = flags.t {
        cfg.t = v;
    }
    if let Some(v) = flags.n_runs {
        cfg.n_runs = v;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(spec) = &flags.y_grid {
        cfg.y_grid = parse_grid(spec).map_err(catbbm_cli::CliError::Config)?;
    }
    if let Some(v) = &flags.snapshot_times {
        cfg.snapshot_times = v.clone();
    }
    if let Some(v) = flags.s_intermediate {
        cfg.s_intermediate = Some(v);
    }
    if let Some(v) = flags.population_cap {
        cfg.population_cap = v;
    }
    if let Some(v) = flags.parallelism {
        cfg.parallelism = v;
    }
    if let Some(v) = &flags.out {
        cfg.output_path = v.clone();
    }
    if let Some(v) = &flags.format {
        cfg.output_format = if v == "json" {
            OutputFormat::Json
        } else {
            OutputFormat::Csv
        };
    }
    if let Some(v) = flags.tolerance_scale {
        cfg.tolerance_scale = v;
    }
    if flags.quick {
        cfg.quick = true;
    }
    if flags.skip_limit_laws {
        cfg.skip_limit_laws = true;
    }
    if flags.genealogy {
        cfg.genealogy = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match &cli.command {
        Command::Simulate(f) => (CommandKind::Simulate, f),
        Command::Oracle(f) => (CommandKind::Oracle, f),
        Command::Verify(f) => (CommandKind::Verify, f),
        Command::Theorem1(f) => (CommandKind::Theorem1, f),
        Command::Prop6(f) => (CommandKind::Prop6, f),
    };
    let config = match build_config(kind, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match catbbm_cli::run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.verify_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
