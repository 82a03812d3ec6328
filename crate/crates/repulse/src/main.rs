//! `repulse`: spacing solver, lattice energies, the auxiliary function,
//! certificates and cluster simulations from the command line.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "repulse", version, about = "Optimal spacings and certificates for f(x) = 1/(1 + x^a)")]
struct Cli {
    /// Worker threads for parallel evaluations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Where to write the run manifest (default: next to the first output file).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified enclosure of the optimal spacing s_a.
    Salpha {
        #[arg(long)]
        alpha: u32,
        #[arg(long, default_value_t = repulse_core::potential::DEFAULT_TOL)]
        tol: f64,
    },
    /// Lattice energy E_a(t) = sum_n t f_a(t n).
    Energy {
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = repulse_core::potential::ENERGY_N)]
        n: u64,
    },
    /// The interpolant psi_a at one or more points.
    Psi {
        #[arg(long)]
        alpha: u32,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = repulse_core::auxfn::AUX_N)]
        n: u64,
    },
    /// The transform of psi_a at one or more frequencies.
    Psihat {
        #[arg(long)]
        alpha: u32,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        xi: Vec<f64>,
        #[arg(long, default_value_t = repulse_core::auxfn::AUX_N)]
        n: u64,
    },
    /// Branch-and-bound certificates; exit 0 iff every one is verified.
    Certify {
        /// Exponent; without it `all` runs over 4, 6, ..., 14.
        #[arg(long)]
        alpha: Option<u32>,
        #[arg(long, value_enum, default_value_t = Inequality::All)]
        inequality: Inequality,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long)]
        budget: Option<u64>,
        /// JSON array of certificates; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relax random particles on a periodic cell and report the clusters.
    Simulate {
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        length: f64,
        /// Overridden by REPULSE_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        iters: u32,
        /// Gap that separates clusters (default s_a / 2).
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inequality {
    #[value(name = "T")]
    T,
    #[value(name = "L")]
    L,
    Psi4,
    Eta0,
    Eta1,
    Eta2,
    W,
    Psihat,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let code = commands::run(cli.command, cli.manifest);
    ExitCode::from(code)
}
