//! `georoots`: roots of quadratic congruences, their orbit correspondence and
//! pair statistics from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "georoots", version, about = "Roots of μ² ≡ D (mod m), geodesic orbits and pair correlations")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "GEOROOTS_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `figure`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Total,
    #[value(name = "O1")]
    O1,
    #[value(name = "O2")]
    O2,
}

#[derive(Args, Debug, Clone)]
pub struct FilterArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    pub d: i64,
    #[arg(long = "n", default_value_t = 1)]
    pub n: u64,
    #[arg(long = "nu", default_value_t = 0, allow_negative_numbers = true)]
    pub nu: i64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the roots with m ≤ M.
    Roots {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, value_enum, default_value_t = ClassArg::Total)]
        class: ClassArg,
    },
    /// Empirical pair correlation of the first N points.
    Paircorr {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long = "N")]
        n_points: usize,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        /// `a` for [−a, a) or `lo:hi`.
        #[arg(long, default_value = "0:5", allow_hyphen_values = true)]
        range: String,
        #[arg(long, value_enum, default_value_t = ClassArg::Total)]
        class: ClassArg,
        /// Divide by the bin width.
        #[arg(long)]
        density: bool,
    },
    /// Limiting pair correlation density on a grid.
    Density {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = 50.0)]
        qmax: f64,
        #[arg(long, value_enum, default_value_t = ClassArg::Total)]
        class: ClassArg,
        #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
        vmin: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        vmax: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Empirical and theoretical data for figures 1 to 3.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long = "N", default_value_t = 1_000_000)]
        n_points: usize,
        #[arg(long, default_value_t = 400.0)]
        qmax: f64,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        #[arg(long, default_value_t = 5.0)]
        vmax: f64,
    },
    /// Correspondence and identity checks with a pass/fail report.
    Verify {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long = "M", default_value_t = 2000)]
        m: u64,
    },
    /// Fundamental units of both orders.
    Units {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
    },
    /// Narrow class group representatives of both orders.
    Classgroup {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if commands::is_config_error(&e) { 2 } else { 1 })
        }
    }
}
