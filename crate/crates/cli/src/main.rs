use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod checks;
mod compute;
mod oracle;

/// Atiyah-Hirzebruch spectral sequences on finite simplicial complexes.
///
/// Exit status: 0 on success, 1 on configuration or input errors, 2 when the
/// report contains unresolved differentials, 3 when a check suite fails.
#[derive(Parser, Debug)]
#[command(name = "ahss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a spectral sequence and write its report as JSON.
    Compute(ComputeArgs),
    /// Reduce a Steenrod algebra expression to admissible form.
    Ops {
        /// Expression such as "Sq1 Sq2", "Q 2", "theta 2" or "Sq2 Sq2 + Sq3 Sq1".
        #[arg(required = true, num_args = 1..)]
        expression: Vec<String>,
    },
    /// Run a consistency suite and print one JSON line per case.
    Check {
        suite: Suite,
        /// Restrict to one space (default: every shipped space the suite uses).
        #[arg(long)]
        space: Option<String>,
        /// Random trials per case where applicable.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Parser, Debug, Clone)]
pub struct ComputeArgs {
    /// Builtin space id (e.g. "rp2", "sphere(3)", "moore(3,2)") or a facet JSON file.
    #[arg(long)]
    pub space: String,
    /// Theory id, e.g. "HZ", "K0", "Deligne:3", "diffMoravaInt(2)".
    #[arg(long)]
    pub theory: String,
    /// JSON file with closed forms: {"degree":k,"values":["1/3",...]} or an array of them.
    #[arg(long)]
    pub forms: Option<PathBuf>,
    /// Fiber of a product bundle over the space.
    #[arg(long)]
    pub fiber: Option<String>,
    #[arg(long)]
    pub max_page: Option<usize>,
    /// Output path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the cochain-level first page and its homology.
    #[arg(long)]
    pub emit_e1: bool,
    /// Compare flat rows with the underlying integral theory through the Bockstein.
    #[arg(long)]
    pub check_bockstein: bool,
    /// Run the randomized Leibniz check (HZ and Deligne only).
    #[arg(long)]
    pub check_leibniz: bool,
    /// List zero differentials too.
    #[arg(long)]
    pub all_differentials: bool,
    /// Tolerance for forms given as floating point values.
    #[arg(long, default_value_t = ahss_core::forms::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bockstein,
    Leibniz,
    Steenrod,
    Periods,
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => compute::run(&args),
        Command::Ops { expression } => compute::ops(&expression.join(" ")),
        Command::Check { suite, space, trials, seed } => checks::run(suite, space.as_deref(), trials, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
