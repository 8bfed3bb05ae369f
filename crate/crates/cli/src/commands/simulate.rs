//! `fxvol simulate`

use super::ensure_dir;
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::SimulateArgs;
use chrono::Duration;
use fxvol_core::market::{
    align_events, load_calendar, parse_timestamp, write_series_csv, EventDesignMatrix,
    SEASONAL_BINS as BINS,
};
use fxvol_core::model::{self, default_sim_start, simulate_from, ModelParams};

pub fn run(args: SimulateArgs) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;

    let start = match &args.start {
        Some(s) => parse_timestamp(s).map_err(CliError::usage)?,
        None => default_sim_start(),
    };
    let grid: Vec<_> = (0..args.t_len)
        .map(|k| start + Duration::minutes(5 * k as i64))
        .collect();

    // design from the calendar, when given
    let (design, calendar_path) = match &args.calendar {
        Some(path) => {
            let calendar = load_calendar(path)?;
            let outcome = align_events(&calendar, &grid, args.n_lags)?;
            (outcome.matrix, Some(path.clone()))
        }
        None => (EventDesignMatrix::empty(args.t_len), None),
    };

    // defaults <- config file <- flags
    let mut params = match &args.config {
        Some(path) => model::read_params_json(path)?,
        None => {
            let mut p = ModelParams::with_event_columns(design.n_cols());
            p.mu_h = -6.0;
            p.phi = 0.98;
            p.sigma_x2 = 0.0225;
            p
        }
    };
    if let Some(v) = args.mu_h {
        params.mu_h = v;
    }
    if let Some(v) = args.phi {
        params.phi = v;
    }
    if let Some(v) = args.sigma_x2 {
        params.sigma_x2 = v;
    }
    if let Some(a) = args.beta_amplitude {
        let mut beta: Vec<f64> = (0..BINS)
            .map(|k| a * (2.0 * std::f64::consts::PI * k as f64 / BINS as f64).sin())
            .collect();
        let mean = beta.iter().sum::<f64>() / BINS as f64;
        beta.iter_mut().for_each(|b| *b -= mean);
        params.beta = beta;
    }
    if params.alpha.len() != design.n_cols() {
        return Err(CliError::usage(format!(
            "parameters carry {} announcement columns but the design has {}",
            params.alpha.len(),
            design.n_cols()
        )));
    }

    let (series, latent) = simulate_from(&params, &design, args.t_len, args.seed, start)?;

    write_series_csv(args.out_dir.join("returns.csv"), &series.timestamps, &series.values)?;
    write_series_csv(args.out_dir.join("latent.csv"), &series.timestamps, &latent.x)?;
    model::write_params_json(&params, args.out_dir.join("truth.json"))?;

    let config = serde_json::json!({
        "t_len": args.t_len,
        "seed": args.seed,
        "start": fxvol_core::market::format_timestamp(start),
        "n_lags": args.n_lags,
        "params": serde_json::to_value(&params).expect("params serialize"),
    });
    let mut manifest = Manifest::new("simulate", Some(args.seed), config);
    if let Some(path) = &calendar_path {
        manifest.record_input("calendar", path)?;
    }
    if let Some(path) = &args.config {
        manifest.record_input("config", path)?;
    }
    manifest.design_columns = Some(design.column_labels().to_vec());
    manifest.write(&args.out_dir.join("manifest.json"))?;

    log::info!(
        "simulated {} windows ({} announcement columns) into {}",
        args.t_len,
        design.n_cols(),
        args.out_dir.display()
    );
    Ok(())
}
