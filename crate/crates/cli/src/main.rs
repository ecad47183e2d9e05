//! `revmap` — CLI workbench for reverse-map-projection embeddings and
//! the equivariant-vs-hardware-efficient classifier experiment.

use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Parser, Subcommand};

use revmap_cli::config::{load_run_config, parse_alpha};
use revmap_cli::embed_cmd::embed_csv;
use revmap_cli::fetch::{fetch_data, write_synthetic};
use revmap_cli::plot::{aggregate, render_svg};
use revmap_cli::runner::{run_all, write_outputs};
use revmap_cli::verify::{print_report, run_verify, Level};
use revmap_cli::{resolve_data_dir, CliError, ExitCode};

#[derive(Parser)]
#[command(name = "revmap", version, about = "Reverse-map-projection embedding workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download and verify the four Fashion-MNIST IDX files
    FetchData {
        /// Cache directory (default: $REVMAP_DATA_DIR or ./data)
        #[arg(long)]
        dir: Option<String>,
        /// Generate a synthetic stand-in dataset instead of downloading
        #[arg(long)]
        synthetic: bool,
        /// Seed for the synthetic generator
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the property-verification suites
    Verify {
        /// fast: core invariants; full: adds the n = 255 sweep
        #[arg(long, default_value = "fast")]
        level: String,
    },
    /// Embed CSV vectors onto the sphere (n columns in, n+1 out)
    Embed {
        /// Projection parameter: a number below 1, a projection name, or -inf
        #[arg(long)]
        alpha: String,
        /// Pre-embedding divisor M
        #[arg(long, default_value_t = 1.0)]
        scale_m: f64,
        /// Input CSV of raw vectors
        #[arg(long)]
        input: PathBuf,
        /// Output CSV of embedded unit vectors
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the experiments described by a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: out)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot loss-history CSVs as an SVG (mean line + std band)
    Plot {
        /// Loss CSVs produced by `run`
        #[arg(required = true)]
        csvs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::FetchData { dir, synthetic, seed } => {
            let dir = resolve_data_dir(dir.as_deref());
            if synthetic {
                write_synthetic(&dir, seed)?;
                println!("synthetic dataset written to {}", dir.display());
            } else {
                fetch_data(&dir)?;
            }
            Ok(ExitCode::Success)
        }
        Command::Verify { level } => {
            let level = Level::parse(&level)
                .ok_or_else(|| CliError::Config(format!("unknown level `{level}`")))?;
            let results = run_verify(level);
            if print_report(&results) {
                Ok(ExitCode::Success)
            } else {
                Ok(ExitCode::VerificationFailure)
            }
        }
        Command::Embed { alpha, scale_m, input, output } => {
            let alpha = parse_alpha(&alpha)?;
            let out = embed_csv(alpha, scale_m, &read_file(&input)?)?;
            std::fs::write(&output, out)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", output.display())))?;
            Ok(ExitCode::Success)
        }
        Command::Run { config, out } => {
            let cfg = load_run_config(&config)?;
            let data_dir = resolve_data_dir(cfg.data_dir.as_deref());
            let results = run_all(&cfg, &data_dir)?;
            let out_dir = out.unwrap_or_else(|| "out".into());
            write_outputs(&out_dir, &results)?;
            println!("wrote {}", out_dir.join("summary.csv").display());
            Ok(ExitCode::Success)
        }
        Command::Plot { csvs, out } => {
            let mut rows = Vec::new();
            for path in &csvs {
                rows.extend(revmap_cli::csvio::read_loss_csv(&read_file(path)?)?);
            }
            let svg = render_svg(&aggregate(&rows)?)?;
            std::fs::write(&out, svg)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
            println!("wrote {}", out.display());
            Ok(ExitCode::Success)
        }
    }
}

fn main() -> ProcessExit {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    match dispatch(cli) {
        Ok(code) => ProcessExit::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ProcessExit::from(e.exit_code() as u8)
        }
    }
}
