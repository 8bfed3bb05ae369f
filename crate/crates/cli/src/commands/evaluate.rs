//! `fxvol evaluate`

use super::split_tagged;
use crate::error::CliError;
use crate::manifest::{sidecar_path, Manifest};
use crate::EvaluateArgs;
use chrono::{DateTime, Utc};
use fxvol_core::forecast::{diebold_mariano, diebold_mariano_with_lags, horse_race};
use fxvol_core::market::{
    compute_log_returns, compute_realized_volatility, load_prices, read_series_csv,
    PriceCsvFormat,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let (rv_ts, rv_vals, rv_input): (Vec<DateTime<Utc>>, Vec<f64>, (String, PathBuf)) =
        match (&args.rv, &args.one_min_prices) {
            (Some(path), None) => {
                let (ts, vals) = read_series_csv(path)?;
                (ts, vals, ("rv".into(), path.clone()))
            }
            (None, Some(path)) => {
                let prices = load_prices(path, &PriceCsvFormat::default())?;
                let one_min = compute_log_returns(&prices)?;
                let rv = compute_realized_volatility(&one_min)?;
                (rv.timestamps, rv.values, ("one_min_prices".into(), path.clone()))
            }
            _ => {
                return Err(CliError::usage(
                    "exactly one of --rv or --one-min-prices is required",
                ))
            }
        };
    if args.competitors.is_empty() {
        return Err(CliError::usage("at least one --competitor NAME=PATH is required"));
    }

    let (prop_ts, prop_vals) = read_series_csv(&args.proposal)?;
    let mut competitors: Vec<(String, Vec<DateTime<Utc>>, Vec<f64>, PathBuf)> = Vec::new();
    for spec in &args.competitors {
        let (name, path) = split_tagged(spec, "competitor")?;
        let path = PathBuf::from(path);
        let (ts, vals) = read_series_csv(&path).map_err(|e| {
            CliError::data(format!("competitor {name}: {e}"))
        })?;
        competitors.push((name, ts, vals, path));
    }

    // intersect timestamps across target, proposal and all competitors
    let mut common: BTreeMap<DateTime<Utc>, usize> = rv_ts
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i))
        .collect();
    let index_of = |ts: &[DateTime<Utc>]| -> BTreeMap<DateTime<Utc>, usize> {
        ts.iter().enumerate().map(|(i, &t)| (t, i)).collect()
    };
    let prop_index = index_of(&prop_ts);
    common.retain(|t, _| prop_index.contains_key(t));
    let comp_indices: Vec<BTreeMap<DateTime<Utc>, usize>> = competitors
        .iter()
        .map(|(_, ts, _, _)| index_of(ts))
        .collect();
    for idx in &comp_indices {
        common.retain(|t, _| idx.contains_key(t));
    }
    let n = common.len();
    if n < 30 {
        return Err(CliError::data(format!(
            "only {n} overlapping timestamps across target and forecasts"
        )));
    }

    let rv: Vec<f64> = common.values().map(|&i| rv_vals[i]).collect();
    let prop: Vec<f64> = common
        .keys()
        .map(|t| prop_vals[prop_index[t]])
        .collect();
    let prop_errors: Vec<f64> = prop.iter().zip(&rv).map(|(f, r)| f - r).collect();

    let mut names = Vec::new();
    let mut rows_b1 = Vec::new();
    let mut rows_t = Vec::new();
    let mut rows_dm = Vec::new();
    let mut any_clamped = false;
    for ((name, _, vals, _), idx) in competitors.iter().zip(&comp_indices) {
        let comp: Vec<f64> = common.keys().map(|t| vals[idx[t]]).collect();
        let hr = horse_race(&rv, &prop, &comp)
            .map_err(|e| CliError::data(format!("horse race vs {name}: {e}")))?;
        any_clamped |= hr.clamped;
        let comp_errors: Vec<f64> = comp.iter().zip(&rv).map(|(f, r)| f - r).collect();
        let dm = match args.dm_lags {
            Some(lags) => diebold_mariano_with_lags(&prop_errors, &comp_errors, lags),
            None => diebold_mariano(&prop_errors, &comp_errors, 1),
        }
        .map_err(|e| CliError::data(format!("DM test vs {name}: {e}")))?;
        names.push(name.clone());
        rows_b1.push(format!("{:.4}", hr.b1));
        rows_t.push(format!("{:.4}", hr.t_stat));
        rows_dm.push(format!("{:.6}", dm.p_value));
    }

    let mut out = String::new();
    writeln!(out, "metric,{}", names.join(",")).unwrap();
    writeln!(out, "b1,{}", rows_b1.join(",")).unwrap();
    writeln!(out, "t_stat,{}", rows_t.join(",")).unwrap();
    writeln!(out, "dm_p_value,{}", rows_dm.join(",")).unwrap();
    writeln!(out, "n_obs,{}", vec![n.to_string(); names.len()].join(",")).unwrap();
    out.push_str(
        "# b1 from the transformed regression (RV - C) on (P - C); competitor weight is 1 - b1.\n",
    );
    out.push_str(
        "# t-stat uses HAC (Bartlett, lag floor(n^(1/3))) standard errors; b1 clamped to [0, 1].\n",
    );
    if any_clamped {
        out.push_str("# note: at least one b1 was clamped into [0, 1].\n");
    }
    std::fs::write(&args.out, out)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.out.display())))?;

    let config_json = serde_json::json!({
        "competitors": names,
        "dm_lags": args.dm_lags,
        "n_obs": n,
    });
    let mut manifest = Manifest::new("evaluate", None, config_json);
    manifest.record_input(&rv_input.0, &rv_input.1)?;
    manifest.record_input("proposal", &args.proposal)?;
    for (name, _, _, path) in &competitors {
        manifest.record_input(&format!("competitor_{name}"), path)?;
    }
    manifest.write(&sidecar_path(&args.out))?;
    Ok(())
}
