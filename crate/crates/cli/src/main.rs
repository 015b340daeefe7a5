//! `pvbs`: command-line front end for gap computations, certificates, sweeps and the verification bundle.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pvbs", version, about = "Spectral gaps and ground spaces of frustration-free spin chains")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// JSON configuration: a sweep config for `sweep`, a verify config for `verify`, solver settings otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output for commands that produce rows.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverArg>,
    /// Krylov convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Krylov,
}

#[derive(Args, Clone)]
pub struct PvbsArgs {
    /// Comma-separated `λ_1,…,λ_n`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    lambda: Vec<f64>,
    /// Phase `i,j=value`; may be repeated.
    #[arg(long = "theta", value_parser = parse_theta)]
    thetas: Vec<(String, f64)>,
}

fn parse_theta(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s.split_once('=').ok_or("expected i,j=value")?;
    let value = value.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((key.trim().to_string(), value))
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MartingaleModel {
    Aklt,
    AkltPath,
    Pvbs,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel dimension and gap of a product-vacuum chain.
    PvbsGap {
        #[command(flatten)]
        params: PvbsArgs,
        #[arg(long, value_delimiter = ',', default_value = "6")]
        sites: Vec<usize>,
    },
    /// Numbers of left- and right-bound edge types.
    PvbsClassify {
        #[command(flatten)]
        params: PvbsArgs,
    },
    /// One-particle gap certificate for a single type.
    PvbsOneParticle {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
    },
    /// Transfer-operator spectrum of a product-vacuum family, or of the AKLT path at `--s`.
    TransferSpectrum {
        #[arg(long, value_delimiter = ',', conflicts_with = "s", allow_hyphen_values = true)]
        lambda: Vec<f64>,
        #[arg(long = "theta", value_parser = parse_theta)]
        thetas: Vec<(String, f64)>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// Gaps along the AKLT interpolation.
    AkltPath {
        #[arg(long, value_delimiter = ',', default_value = "6")]
        sites: Vec<usize>,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
    },
    /// Martingale coefficients `g_{k,N}` and the resulting gap bound.
    Martingale {
        #[arg(long, value_enum, default_value = "aklt")]
        model: MartingaleModel,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        sites: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// SO(2J+1) chains: algebra checks, transfer certificates and gaps along the deformation.
    SoModels {
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, value_delimiter = ',', default_value = "4")]
        sites: Vec<usize>,
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, value_delimiter = ',')]
        lambda0: Option<Vec<f64>>,
    },
    /// Runs a sweep described by `--config`.
    Sweep,
    /// Runs a verification bundle and prints one verdict per check.
    Verify {
        #[arg(value_parser = ["pvbs", "aklt", "so", "all"], default_value = "all")]
        bundle: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.common) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
