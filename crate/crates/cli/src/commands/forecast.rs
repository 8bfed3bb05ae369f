//! `fxvol forecast`

use crate::error::CliError;
use crate::manifest::{sidecar_path, Manifest};
use crate::ForecastArgs;
use fxvol_core::baselines::{
    ar1_rv_forecast_series, fit_ar1_rv, fit_garch11, fit_gjr_garch, fit_har,
    garch_forecast_series, har_forecast_series, BaselineModel,
};
use fxvol_core::market::{
    align_events, load_calendar, read_returns_csv, read_series_csv, seasonal_index,
    write_series_csv, EventDesignMatrix,
};
use fxvol_core::mcmc::read_draws_csv;
use fxvol_core::forecast::{proposal_forecasts, ProposalForecastConfig};

pub fn run(args: ForecastArgs) -> Result<(), CliError> {
    match (&args.draws, &args.baseline) {
        (Some(_), Some(_)) => Err(CliError::usage(
            "--draws and --baseline are mutually exclusive",
        )),
        (None, None) => Err(CliError::usage(
            "one of --draws (model) or --baseline is required",
        )),
        (Some(_), None) => run_proposal(args),
        (None, Some(_)) => run_baseline(args),
    }
}

fn split_point(args: &ForecastArgs, n: usize) -> Result<usize, CliError> {
    let split = match args.split_index {
        Some(idx) => idx,
        None => {
            if !(0.0..1.0).contains(&args.split_frac) {
                return Err(CliError::usage(format!(
                    "--split-frac must lie in [0, 1), got {}",
                    args.split_frac
                )));
            }
            (n as f64 * args.split_frac).floor() as usize
        }
    };
    if split == 0 || split >= n {
        return Err(CliError::data(format!(
            "split index {split} leaves no estimation or evaluation sample (n = {n})"
        )));
    }
    Ok(split)
}

fn run_proposal(args: ForecastArgs) -> Result<(), CliError> {
    let draws_path = args.draws.as_ref().expect("checked by caller");
    let returns_path = args
        .returns
        .as_ref()
        .ok_or_else(|| CliError::usage("model forecasts need --returns"))?;

    let draws = read_draws_csv(draws_path)?;
    let returns = read_returns_csv(returns_path)?;
    let split = split_point(&args, returns.len())?;

    let design = match &args.calendar {
        Some(path) => {
            let calendar = load_calendar(path)?;
            align_events(&calendar, &returns.timestamps, args.n_lags)?.matrix
        }
        None => EventDesignMatrix::empty(returns.len()),
    };
    let posterior = draws.posterior_mean();
    if posterior.alpha.len() != design.n_cols() {
        return Err(CliError::data(format!(
            "draws carry {} announcement columns but the calendar yields {}; pass the estimation calendar",
            posterior.alpha.len(),
            design.n_cols()
        )));
    }

    let bins = returns
        .timestamps
        .iter()
        .map(|&ts| seasonal_index(ts))
        .collect::<Result<Vec<_>, _>>()?;
    let config = ProposalForecastConfig {
        mean_correction: !args.no_mean_correction,
    };
    let values = proposal_forecasts(&posterior, &returns.values, &bins, &design, split, &config)?;

    write_series_csv(&args.out, &returns.timestamps[split..], &values)?;

    let tag = args.tag.clone().unwrap_or_else(|| "proposal".to_string());
    let config_json = serde_json::json!({
        "mode": "model",
        "tag": tag,
        "split_index": split,
        "mean_correction": config.mean_correction,
        "n_lags": args.n_lags,
    });
    let mut manifest = Manifest::new("forecast", None, config_json);
    manifest.record_input("draws", draws_path)?;
    manifest.record_input("returns", returns_path)?;
    if let Some(path) = &args.calendar {
        manifest.record_input("calendar", path)?;
    }
    manifest.write(&sidecar_path(&args.out))?;
    Ok(())
}

fn run_baseline(args: ForecastArgs) -> Result<(), CliError> {
    let name = args.baseline.as_ref().expect("checked by caller");
    let model: BaselineModel = name.parse().map_err(CliError::usage)?;

    let (timestamps, fit, forecasts) = match model {
        BaselineModel::Ar1Rv | BaselineModel::Har => {
            let rv_path = args
                .rv
                .as_ref()
                .ok_or_else(|| CliError::usage(format!("{name} needs --rv")))?;
            let (timestamps, rv) = read_series_csv(rv_path)?;
            let split = split_point(&args, rv.len())?;
            let fit = match model {
                BaselineModel::Ar1Rv => fit_ar1_rv(&rv[..split])?,
                _ => fit_har(&rv[..split])?,
            };
            let series = match model {
                BaselineModel::Ar1Rv => ar1_rv_forecast_series(&fit, &rv),
                _ => har_forecast_series(&fit, &rv),
            };
            let oos = series[split..].to_vec();
            (timestamps[split..].to_vec(), fit, oos)
        }
        BaselineModel::Garch11 | BaselineModel::GjrGarch => {
            let returns_path = args
                .returns
                .as_ref()
                .ok_or_else(|| CliError::usage(format!("{name} needs --returns")))?;
            let returns = read_returns_csv(returns_path)?;
            let split = split_point(&args, returns.len())?;
            let fit = match model {
                BaselineModel::Garch11 => fit_garch11(&returns.values[..split])?,
                _ => fit_gjr_garch(&returns.values[..split])?,
            };
            let series = garch_forecast_series(&fit, &returns.values);
            let oos = series[split..].to_vec();
            (returns.timestamps[split..].to_vec(), fit, oos)
        }
    };

    write_series_csv(&args.out, &timestamps, &forecasts)?;
    if let Some(path) = &args.fit_out {
        std::fs::write(path, fit.to_json())
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    }

    let tag = args.tag.clone().unwrap_or_else(|| model.as_str().to_string());
    let config_json = serde_json::json!({
        "mode": "baseline",
        "model": model.as_str(),
        "tag": tag,
        "split_frac": args.split_frac,
        "split_index": args.split_index,
        "converged": fit.converged,
    });
    let mut manifest = Manifest::new("forecast", None, config_json);
    if let Some(p) = &args.rv {
        manifest.record_input("rv", p)?;
    }
    if let Some(p) = &args.returns {
        manifest.record_input("returns", p)?;
    }
    manifest.write(&sidecar_path(&args.out))?;
    Ok(())
}
