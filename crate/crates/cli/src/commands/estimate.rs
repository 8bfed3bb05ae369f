//! `fxvol estimate`

use super::ensure_dir;
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::EstimateArgs;
use fxvol_core::market::{
    align_events, load_calendar, read_returns_csv, write_design_csv, EventDesignMatrix,
    SEASONAL_BINS,
};
use fxvol_core::mcmc::{
    run_chain_with, write_draws_csv, ChainOptions, PosteriorDraws, Schedule, Variant,
};
use fxvol_core::model::PriorConfig;
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

/// Estimation run configuration file. Every field is optional; flags
/// override the file, and the file overrides built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfigFile {
    n_iter: Option<usize>,
    burn_in: Option<usize>,
    thin: Option<usize>,
    seed: Option<u64>,
    variant: Option<String>,
    n_lags: Option<usize>,
    prior: Option<PriorConfig>,
}

pub fn run(args: EstimateArgs) -> Result<(), CliError> {
    ensure_dir(&args.out_dir)?;

    let file_cfg: RunConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfigFile::default(),
    };

    let mut schedule = Schedule::default();
    if let Some(v) = file_cfg.n_iter {
        schedule.n_iter = v;
    }
    if let Some(v) = file_cfg.burn_in {
        schedule.burn_in = v;
    }
    if let Some(v) = file_cfg.thin {
        schedule.thin = v;
    }
    if let Some(v) = file_cfg.seed {
        schedule.seed = v;
    }
    if let Some(v) = args.iters {
        schedule.n_iter = v;
    }
    if let Some(v) = args.burn_in {
        schedule.burn_in = v;
    }
    if let Some(v) = args.thin {
        schedule.thin = v;
    }
    if let Some(v) = args.seed {
        schedule.seed = v;
    }

    let variant_name = args
        .variant
        .clone()
        .or_else(|| file_cfg.variant.clone())
        .unwrap_or_else(|| "full".to_string());
    let variant: Variant = variant_name.parse().map_err(CliError::usage)?;
    let priors = file_cfg.prior.unwrap_or_default();
    let n_lags = file_cfg.n_lags.unwrap_or(args.n_lags);

    let returns = read_returns_csv(&args.returns)?;

    let design = match (&args.calendar, variant) {
        (Some(path), Variant::Full) => {
            let calendar = load_calendar(path)?;
            align_events(&calendar, &returns.timestamps, n_lags)?.matrix
        }
        (None, Variant::Full) => {
            log::warn!("full variant without --calendar: announcement component is empty");
            EventDesignMatrix::empty(returns.len())
        }
        _ => EventDesignMatrix::empty(returns.len()),
    };

    if let Some(path) = &args.export_design {
        write_design_csv(&design, path)?;
    }

    let options = ChainOptions {
        include_stationary_term: !args.no_stationary_term,
        store_latent: args.save_latent,
        ..ChainOptions::default()
    };
    log::info!(
        "estimating variant {} over T={} with M={} columns, {} sweeps",
        variant.as_str(),
        returns.len(),
        design.n_cols(),
        schedule.n_iter
    );
    let draws = run_chain_with(&returns, &design, &priors, &schedule, variant, &options)?;

    write_draws_csv(&draws, args.out_dir.join("draws.csv"))?;
    write_summary_csv(&draws, &args.out_dir.join("summary.csv"))?;
    if let Some(latent) = &draws.latent {
        write_latent_csv(latent, &args.out_dir.join("latent_draws.csv"))?;
    }

    let config = serde_json::json!({
        "schedule": schedule,
        "variant": variant.as_str(),
        "n_lags": n_lags,
        "prior": serde_json::to_value(&priors).expect("prior serializes"),
        "include_stationary_term": options.include_stationary_term,
    });
    let mut manifest = Manifest::new("estimate", Some(schedule.seed), config);
    manifest.record_input("returns", &args.returns)?;
    if let Some(path) = &args.calendar {
        manifest.record_input("calendar", path)?;
    }
    if let Some(path) = &args.config {
        manifest.record_input("config", path)?;
    }
    manifest.design_columns = Some(design.column_labels().to_vec());
    manifest.write(&args.out_dir.join("manifest.json"))?;
    Ok(())
}

/// Posterior mean/sd per parameter, plus the per-column inclusion table
/// for the full variant (event, lag, mean inclusion, mean effect).
fn write_summary_csv(draws: &PosteriorDraws, path: &Path) -> Result<(), CliError> {
    let mean = draws.posterior_mean();
    let n = draws.len().max(1) as f64;

    let sd_of = |extract: &dyn Fn(&fxvol_core::model::ModelParams) -> f64, mu: f64| -> f64 {
        if draws.len() < 2 {
            return 0.0;
        }
        let ss: f64 = draws
            .params
            .iter()
            .map(|p| {
                let v = extract(p);
                (v - mu) * (v - mu)
            })
            .sum();
        (ss / (n - 1.0)).sqrt()
    };

    let mut out = String::new();
    let has_events = draws.variant.has_events();
    if has_events {
        out.push_str("kind,name,lag,mean,sd,mean_pi,mean_effect\n");
    } else {
        out.push_str("kind,name,lag,mean,sd\n");
    }
    let tail = if has_events { ",," } else { "" };

    let mut scalar = |name: &str, mu: f64, extract: &dyn Fn(&fxvol_core::model::ModelParams) -> f64| {
        writeln!(out, "param,{name},,{mu},{sd}{tail}", sd = sd_of(extract, mu)).unwrap();
    };
    scalar("mu_h", mean.mu_h, &|p| p.mu_h);
    scalar("phi", mean.phi, &|p| p.phi);
    scalar("sigma_x2", mean.sigma_x2, &|p| p.sigma_x2);
    if has_events {
        scalar("gamma", mean.gamma, &|p| p.gamma);
        scalar("sigma_alpha2", mean.sigma_alpha2, &|p| p.sigma_alpha2);
    }
    if draws.variant.has_seasonal() {
        for k in 0..SEASONAL_BINS {
            let mu = mean.beta[k];
            let sd = sd_of(&|p| p.beta[k], mu);
            writeln!(out, "param,beta_{k},,{mu},{sd}{tail}").unwrap();
        }
    }
    if has_events {
        for s in draws.inclusion_summary() {
            writeln!(
                out,
                "inclusion,{},{},,,{},{}",
                csv_escape(&s.label.event_id),
                s.label.lag,
                s.mean_pi,
                s.mean_effect
            )
            .unwrap();
        }
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn write_latent_csv(latent: &[Vec<f64>], path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    for row in latent {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub(crate) fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
