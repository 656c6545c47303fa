//! `semioscope`: profiles, capacities, estimates and certification reports
//! for temperature-tuned sources read through interpretation channels.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "semioscope",
    version,
    about = "Semiotic breadth, decipherability and capacity toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample interaction records from a scenario at one or more temperatures.
    Simulate(SimulateArgs),
    /// Write the analytic profile S, D, H(Int|M) and risk over a λ grid.
    Profile(ProfileArgs),
    /// Estimate entropies and mutual information from logged records.
    Estimate(EstimateArgs),
    /// Search for λ_opt and compute the Blahut–Arimoto bound.
    Capacity(CapacityArgs),
    /// Check a profile and capacity against a threshold policy.
    Certify(CertifyArgs),
    /// Tabulate the interpretive risk S/D of a profile.
    Risk(RiskArgs),
    /// Run the online λ controller against a simulated channel.
    Adapt(AdaptArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file, or `builtin:<name>`.
    #[arg(long)]
    scenario: String,
    /// Temperatures, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    /// Records per temperature.
    #[arg(long)]
    n: usize,
    /// Base seed; temperature `k` in the list uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; `.csv` writes CSV, anything else JSONL.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    scenario: String,
    /// `lo:hi:points[:log|lin]`.
    #[arg(long, default_value = "0.05:20:64:log")]
    grid: String,
    /// Output path; `.json` writes JSON, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// JSONL or CSV records (chosen by extension).
    #[arg(long)]
    records: PathBuf,
    #[arg(long, default_value = "plugin")]
    method: String,
    /// Bootstrap replicates; omit for point estimates only.
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CapacityArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.05, 20.0])]
    bounds: Vec<f64>,
    /// Points in the coarse log-spaced scan.
    #[arg(long, default_value_t = semioscope_core::capacity::DEFAULT_COARSE_POINTS)]
    coarse: usize,
    /// Width at which the golden-section refinement stops.
    #[arg(long, default_value_t = semioscope_core::capacity::DEFAULT_SEARCH_TOL)]
    tol: f64,
    /// Bound gap at which Blahut–Arimoto stops, in bits.
    #[arg(long, default_value_t = semioscope_core::capacity::DEFAULT_BA_TOL)]
    ba_tol: f64,
    #[arg(long, default_value_t = semioscope_core::capacity::DEFAULT_BA_MAX_ITER)]
    ba_max_iter: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    /// Profile as written by `profile` (CSV or JSON).
    #[arg(long)]
    curve: PathBuf,
    /// Output of `capacity`.
    #[arg(long)]
    capacity: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    /// Interpretation alphabet size, if the capacity file does not record it.
    #[arg(long)]
    interpretations: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RiskArgs {
    #[arg(long)]
    curve: PathBuf,
    /// Score reported where D is zero.
    #[arg(long, default_value_t = semioscope_core::certify::DEFAULT_RISK_CAP)]
    cap: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AdaptArgs {
    #[arg(long)]
    scenario: String,
    /// Controller settings JSON; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Profile(a) => commands::profile(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Capacity(a) => commands::capacity(a),
        Command::Certify(a) => commands::certify(a),
        Command::Risk(a) => commands::risk(a),
        Command::Adapt(a) => commands::adapt(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semioscope: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
