//! `fxvol` — simulate, estimate, forecast, evaluate and backtest the
//! intraday FX volatility model and its benchmarks.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
//! failure.

mod commands;
mod error;
mod manifest;

use clap::{Args, Parser, Subcommand};

use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fxvol",
    version,
    about = "Intraday FX volatility: Bayesian estimation, forecasting and portfolio evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate returns and the latent volatility path
    Simulate(SimulateArgs),
    /// Run the Gibbs sampler on a return series
    Estimate(EstimateArgs),
    /// Produce one-step-ahead volatility forecasts
    Forecast(ForecastArgs),
    /// Compare forecasts against realized volatility
    Evaluate(EvaluateArgs),
    /// Run the two-asset minimum-variance backtest
    Backtest(BacktestArgs),
    /// Summarize posterior draws into plot-ready tables
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of 5-minute windows to simulate
    #[arg(long, default_value_t = 1000)]
    t_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter file (truth.json layout); flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Announcement calendar; its events enter the simulated variance
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    n_lags: usize,
    #[arg(long)]
    mu_h: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    sigma_x2: Option<f64>,
    /// Amplitude of a sinusoidal (zero-sum) seasonal pattern
    #[arg(long)]
    beta_amplitude: Option<f64>,
    /// First grid timestamp (5-minute aligned, UTC)
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// 5-minute return series (timestamp,value)
    #[arg(long)]
    returns: PathBuf,
    /// Announcement calendar (required for the full variant)
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    n_lags: usize,
    /// Model variant: full, ssv (no announcements) or sv (level+SV
    /// only); defaults to full
    #[arg(long)]
    variant: Option<String>,
    /// Run configuration JSON (schedule, variant and "prior" block);
    /// flags override the file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Drop the stationary initial-state term from the state-variance
    /// update (conditional-likelihood variant)
    #[arg(long)]
    no_stationary_term: bool,
    /// Also write retained latent paths to latent_draws.csv
    #[arg(long)]
    save_latent: bool,
    /// Export the sparse design matrix (row,col,label)
    #[arg(long)]
    export_design: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ForecastArgs {
    /// Posterior draws of the model (proposal mode)
    #[arg(long)]
    draws: Option<PathBuf>,
    /// Benchmark to fit instead of the model: ar1rv, har, garch or gjr
    #[arg(long)]
    baseline: Option<String>,
    /// 5-minute return series (model mode and garch/gjr)
    #[arg(long)]
    returns: Option<PathBuf>,
    /// Realized-volatility series (ar1rv and har)
    #[arg(long)]
    rv: Option<PathBuf>,
    /// Calendar matching the draws' announcement columns
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    n_lags: usize,
    /// Estimation/out-of-sample split as a fraction of the sample
    #[arg(long, default_value_t = 0.8)]
    split_frac: f64,
    /// Split as an absolute index (overrides --split-frac)
    #[arg(long)]
    split_index: Option<usize>,
    /// Disable the lognormal mean correction (plain plug-in forecast)
    #[arg(long)]
    no_mean_correction: bool,
    /// Model tag stored in the output
    #[arg(long)]
    tag: Option<String>,
    /// Write the fitted benchmark parameters as JSON
    #[arg(long)]
    fit_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Realized-volatility target (timestamp,value)
    #[arg(long)]
    rv: Option<PathBuf>,
    /// 1-minute price series from which to build the target
    #[arg(long)]
    one_min_prices: Option<PathBuf>,
    /// Proposal forecast series
    #[arg(long)]
    proposal: PathBuf,
    /// Competitor forecast files as name=path (repeatable)
    #[arg(long = "competitor", value_name = "NAME=PATH")]
    competitors: Vec<String>,
    /// Bartlett lag for the Diebold-Mariano variance (default:
    /// horizon - 1 = 0)
    #[arg(long)]
    dm_lags: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BacktestArgs {
    /// 5-minute returns of asset 1
    #[arg(long)]
    r1: PathBuf,
    /// 5-minute returns of asset 2
    #[arg(long)]
    r2: PathBuf,
    /// Forecast pairs as name=path1,path2 (repeatable)
    #[arg(long = "model", value_name = "NAME=F1,F2")]
    models: Vec<String>,
    /// Trailing correlation series aligned to the allocation grid
    #[arg(long)]
    corr: Option<PathBuf>,
    /// 1-minute prices of asset 1 for computing trailing correlations
    #[arg(long)]
    one_min_prices_a: Option<PathBuf>,
    /// 1-minute prices of asset 2
    #[arg(long)]
    one_min_prices_b: Option<PathBuf>,
    /// Treat the correlation itself as the co-moment in the weight
    /// formula instead of the covariance
    #[arg(long)]
    literal_correlation: bool,
    /// Directory for per-step allocation CSVs
    #[arg(long)]
    alloc_dir: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    draws: PathBuf,
    /// Estimation manifest; supplies event labels for the inclusion
    /// table
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };

    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Estimate(args) => commands::estimate::run(args),
        Command::Forecast(args) => commands::forecast::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Backtest(args) => commands::backtest::run(args),
        Command::Report(args) => commands::report::run(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
