use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helmsrc_cli::export::export_all;
use helmsrc_cli::{
    load_config, run_adjoint, run_eigen_experiment, run_forward, run_nonradiating_demo,
    run_reconstruction, run_table1, ExperimentConfig, Result, RunReport,
};

#[derive(Parser)]
#[command(name = "helmsrc", version, about = "Multi-frequency radial source reconstruction experiments")]
struct Cli {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Noise seed (overrides `noise.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Allow identical data and inversion grids.
    #[arg(long, global = true)]
    allow_inverse_crime: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic boundary traces at the configured frequencies.
    Forward,
    /// Adjoint fields for unit boundary data.
    Adjoint,
    /// Minimum-norm reconstruction from all configured frequencies.
    Reconstruct,
    /// Error table for both test sources at k = 1..60.
    Table1,
    /// Reconstruction by Sturm–Liouville eigenfunction expansion.
    Eigen {
        /// Number of eigenmodes.
        #[arg(long, default_value_t = 40)]
        modes: usize,
    },
    /// Source that is non-radiating at two frequencies.
    Nonrad {
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        #[arg(long, default_value_t = 2.0)]
        k2: f64,
        #[arg(long, default_value_t = 3.0)]
        k3: f64,
    },
}

fn config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path, cli.allow_inverse_crime)?,
        None => {
            let cfg = ExperimentConfig { allow_inverse_crime: cli.allow_inverse_crime, ..Default::default() };
            cfg.validate()?;
            cfg
        }
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn summarize(report: &RunReport) {
    for e in &report.errors {
        println!("{:>10}  J = {:>3}  eps = {:.6e}", e.label, e.count, e.eps);
    }
    for d in &report.diagnostics {
        println!(
            "{:>10}  J = {:>3}  cond = {:.3e}  rank = {}  method = {}  imag ratio = {:.3e}",
            d.label, d.count, d.condition, d.effective_rank, d.method, d.imag_ratio
        );
    }
    if let Some(n) = &report.nonradiating {
        println!(
            "|u(R)| at k = {}, {}, {}: {:.3e}, {:.3e}, {:.3e}; suppression ratio {:.3e}",
            n.k1, n.k2, n.k3, n.trace_abs[0], n.trace_abs[1], n.trace_abs[2], n.suppression_ratio
        );
    }
    if report.errors.is_empty() && report.nonradiating.is_none() {
        for m in &report.measurements {
            println!("k = {:>8.4}  u(R) = {:+.10e} {:+.10e}i", m.k, m.trace_re, m.trace_im);
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = config(cli)?;
    let report = match cli.command {
        Command::Forward => run_forward(&cfg)?,
        Command::Adjoint => run_adjoint(&cfg)?,
        Command::Reconstruct => run_reconstruction(&cfg)?,
        Command::Table1 => run_table1(&cfg)?,
        Command::Eigen { modes } => run_eigen_experiment(&cfg, modes)?,
        Command::Nonrad { k1, k2, k3 } => run_nonradiating_demo(&cfg, k1, k2, k3)?,
    };
    summarize(&report);
    for path in export_all(&report, &cfg.output_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
