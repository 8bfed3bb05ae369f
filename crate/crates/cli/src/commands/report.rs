//! `fxvol report` — plot-ready summaries of a draws file.

use super::ensure_dir;
use crate::commands::estimate::csv_escape;
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::ReportArgs;
use fxvol_core::market::{ColumnLabel, SEASONAL_BINS};
use fxvol_core::mcmc::{quantile, read_draws_csv};
use fxvol_core::model::annualize;
use serde::Deserialize;
use std::fmt::Write as _;

#[derive(Deserialize)]
struct ManifestLabels {
    #[serde(default)]
    design_columns: Option<Vec<ColumnLabel>>,
}

pub fn run(args: ReportArgs) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;
    let mut draws = read_draws_csv(&args.draws)?;
    if draws.is_empty() {
        return Err(CliError::data("draws file holds no retained sweeps"));
    }

    // event labels from the estimation manifest, when provided
    if let Some(path) = &args.manifest {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        let labels: ManifestLabels = serde_json::from_str(&text)
            .map_err(|e| CliError::data(format!("bad manifest {}: {e}", path.display())))?;
        if let Some(columns) = labels.design_columns {
            if columns.len() == draws.n_event_columns() {
                draws.column_labels = columns;
            } else {
                log::warn!(
                    "manifest lists {} columns but draws carry {}; keeping generic labels",
                    columns.len(),
                    draws.n_event_columns()
                );
            }
        }
    }

    // level: baseline volatility and its annualized value
    let level_draws: Vec<f64> = draws.scalar_draws(|p| (p.mu_h / 2.0).exp());
    let mut params_csv = String::from("name,mean,q05,q95\n");
    let mut row = |name: &str, values: &[f64]| {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        writeln!(
            params_csv,
            "{name},{mean},{},{}",
            quantile(values, 0.05),
            quantile(values, 0.95)
        )
        .unwrap();
    };
    row("mu_h", &draws.scalar_draws(|p| p.mu_h));
    row("phi", &draws.scalar_draws(|p| p.phi));
    row("sigma_x2", &draws.scalar_draws(|p| p.sigma_x2));
    row("level_vol_5min", &level_draws);
    let annualized: Vec<f64> = level_draws
        .iter()
        .map(|&v| annualize(v).expect("level volatility is nonnegative"))
        .collect();
    row("level_vol_annualized", &annualized);
    if draws.variant.has_events() {
        row("gamma", &draws.scalar_draws(|p| p.gamma));
        row("sigma_alpha2", &draws.scalar_draws(|p| p.sigma_alpha2));
    }
    std::fs::write(args.out_dir.join("params.csv"), params_csv)
        .map_err(|e| CliError::data(format!("cannot write params.csv: {e}")))?;

    // seasonal effect curve: posterior mean of exp(beta/2) per bin
    if draws.variant.has_seasonal() {
        let mut out = String::from("bin,minute_of_day,mean_beta,mean_effect,q05_effect,q95_effect\n");
        for k in 0..SEASONAL_BINS {
            let beta_draws: Vec<f64> = draws.scalar_draws(|p| p.beta[k]);
            let effect_draws: Vec<f64> = beta_draws.iter().map(|b| (b / 2.0).exp()).collect();
            let mean_beta = beta_draws.iter().sum::<f64>() / beta_draws.len() as f64;
            let mean_effect = effect_draws.iter().sum::<f64>() / effect_draws.len() as f64;
            writeln!(
                out,
                "{k},{},{mean_beta},{mean_effect},{},{}",
                k * 5,
                quantile(&effect_draws, 0.05),
                quantile(&effect_draws, 0.95)
            )
            .unwrap();
        }
        std::fs::write(args.out_dir.join("seasonal.csv"), out)
            .map_err(|e| CliError::data(format!("cannot write seasonal.csv: {e}")))?;
    }

    // announcement inclusion table
    if draws.variant.has_events() && draws.n_event_columns() > 0 {
        let mut out = String::from("event_id,lag,lag_minutes,mean_pi,mean_effect\n");
        for s in draws.inclusion_summary() {
            writeln!(
                out,
                "{},{},{},{},{}",
                csv_escape(&s.label.event_id),
                s.label.lag,
                s.label.lag * 5,
                s.mean_pi,
                s.mean_effect
            )
            .unwrap();
        }
        std::fs::write(args.out_dir.join("inclusion.csv"), out)
            .map_err(|e| CliError::data(format!("cannot write inclusion.csv: {e}")))?;
    }

    let config_json = serde_json::json!({
        "variant": draws.variant.as_str(),
        "n_retained": draws.len(),
    });
    let mut manifest = Manifest::new("report", None, config_json);
    manifest.record_input("draws", &args.draws)?;
    if let Some(path) = &args.manifest {
        manifest.record_input("manifest", path)?;
    }
    manifest.write(&args.out_dir.join("manifest.json"))?;
    Ok(())
}
