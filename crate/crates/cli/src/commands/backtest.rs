//! `fxvol backtest`

use super::{ensure_dir, split_tagged};
use crate::error::CliError;
use crate::manifest::{sidecar_path, Manifest};
use crate::BacktestArgs;
use chrono::{DateTime, Utc};
use fxvol_core::forecast::ForecastSeries;
use fxvol_core::market::{
    compute_log_returns, format_timestamp, load_prices, read_returns_csv, read_series_csv,
    realized_correlation_series, PriceCsvFormat, ReturnSeries,
};
use fxvol_core::portfolio::{backtest, CoMoment};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

struct ModelPair {
    name: String,
    f1: (Vec<DateTime<Utc>>, Vec<f64>),
    f2: (Vec<DateTime<Utc>>, Vec<f64>),
    paths: (PathBuf, PathBuf),
}

pub fn run(args: BacktestArgs) -> Result<(), CliError> {
    if args.models.is_empty() {
        return Err(CliError::usage("at least one --model NAME=F1,F2 is required"));
    }
    let r1 = read_returns_csv(&args.r1)?;
    let r2 = read_returns_csv(&args.r2)?;

    let mut models = Vec::new();
    for spec in &args.models {
        let (name, rest) = split_tagged(spec, "model")?;
        let (p1, p2) = rest.split_once(',').ok_or_else(|| {
            CliError::usage(format!("--model {name} expects two comma-separated paths"))
        })?;
        let (path1, path2) = (PathBuf::from(p1), PathBuf::from(p2));
        let f1 = read_series_csv(&path1)
            .map_err(|e| CliError::data(format!("model {name}: {e}")))?;
        let f2 = read_series_csv(&path2)
            .map_err(|e| CliError::data(format!("model {name}: {e}")))?;
        models.push(ModelPair {
            name,
            f1,
            f2,
            paths: (path1, path2),
        });
    }

    // allocation grid: timestamps common to returns and every forecast
    let mut common: BTreeMap<DateTime<Utc>, ()> =
        r1.timestamps.iter().map(|&t| (t, ())).collect();
    let index_of = |ts: &[DateTime<Utc>]| -> BTreeMap<DateTime<Utc>, usize> {
        ts.iter().enumerate().map(|(i, &t)| (t, i)).collect()
    };
    let r1_idx = index_of(&r1.timestamps);
    let r2_idx = index_of(&r2.timestamps);
    common.retain(|t, _| r2_idx.contains_key(t));
    let mut model_indices = Vec::new();
    for m in &models {
        let i1 = index_of(&m.f1.0);
        let i2 = index_of(&m.f2.0);
        common.retain(|t, _| i1.contains_key(t) && i2.contains_key(t));
        model_indices.push((i1, i2));
    }
    let grid: Vec<DateTime<Utc>> = common.keys().copied().collect();
    if grid.is_empty() {
        return Err(CliError::data(
            "no overlapping timestamps across returns and forecasts",
        ));
    }

    // trailing correlation on the allocation grid
    let (corr, corr_inputs): (Vec<f64>, Vec<(String, PathBuf)>) =
        match (&args.corr, &args.one_min_prices_a, &args.one_min_prices_b) {
            (Some(path), None, None) => {
                let (ts, vals) = read_series_csv(path)?;
                let idx = index_of(&ts);
                let corr = grid
                    .iter()
                    .map(|t| {
                        idx.get(t).map(|&i| vals[i]).ok_or_else(|| {
                            CliError::data(format!(
                                "correlation series missing {}",
                                format_timestamp(*t)
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                (corr, vec![("corr".into(), path.clone())])
            }
            (None, Some(pa), Some(pb)) => {
                let a = compute_log_returns(&load_prices(pa, &PriceCsvFormat::default())?)?;
                let b = compute_log_returns(&load_prices(pb, &PriceCsvFormat::default())?)?;
                let corr = realized_correlation_series(&a, &b, &grid, 5, 5);
                (
                    corr,
                    vec![
                        ("one_min_prices_a".into(), pa.clone()),
                        ("one_min_prices_b".into(), pb.clone()),
                    ],
                )
            }
            _ => {
                return Err(CliError::usage(
                    "provide --corr or both --one-min-prices-a and --one-min-prices-b",
                ))
            }
        };

    let mode = if args.literal_correlation {
        CoMoment::CorrelationLiteral
    } else {
        CoMoment::Covariance
    };
    let sub_r1 = subset_returns(&r1, &grid, &r1_idx);
    let sub_r2 = subset_returns(&r2, &grid, &r2_idx);

    let mut names = Vec::new();
    let mut means = Vec::new();
    let mut vols = Vec::new();
    let mut sharpes = Vec::new();
    if let Some(dir) = &args.alloc_dir {
        ensure_dir(dir)?;
    }
    for (m, (i1, i2)) in models.iter().zip(&model_indices) {
        let f1 = ForecastSeries {
            timestamps: grid.clone(),
            values: grid.iter().map(|t| m.f1.1[i1[t]]).collect(),
            model: m.name.clone(),
        };
        let f2 = ForecastSeries {
            timestamps: grid.clone(),
            values: grid.iter().map(|t| m.f2.1[i2[t]]).collect(),
            model: m.name.clone(),
        };
        let (steps, stats) = backtest(&sub_r1, &sub_r2, &f1, &f2, &corr, mode)
            .map_err(|e| CliError::from(e))?;
        if let Some(dir) = &args.alloc_dir {
            let mut out = String::from("timestamp,vol1,vol2,cov12,w1,realized_return\n");
            for s in &steps {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    format_timestamp(s.timestamp),
                    s.vol1,
                    s.vol2,
                    s.cov12,
                    s.w1,
                    s.realized_return
                )
                .unwrap();
            }
            let path = dir.join(format!("allocations_{}.csv", m.name));
            std::fs::write(&path, out)
                .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        }
        names.push(m.name.clone());
        means.push(format!("{:.4}", stats.ann_mean));
        vols.push(format!("{:.4}", stats.ann_vol));
        sharpes.push(if stats.degenerate {
            "0.0000 (degenerate)".to_string()
        } else {
            format!("{:.4}", stats.ann_sharpe)
        });
    }

    let mut out = String::new();
    writeln!(out, "metric,{}", names.join(",")).unwrap();
    writeln!(out, "ann_mean,{}", means.join(",")).unwrap();
    writeln!(out, "ann_volatility,{}", vols.join(",")).unwrap();
    writeln!(out, "ann_sharpe,{}", sharpes.join(",")).unwrap();
    writeln!(out, "n_obs,{}", vec![grid.len().to_string(); names.len()].join(",")).unwrap();
    std::fs::write(&args.out, out)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.out.display())))?;

    let config_json = serde_json::json!({
        "models": names,
        "co_moment": if args.literal_correlation { "correlation" } else { "covariance" },
        "n_obs": grid.len(),
    });
    let mut manifest = Manifest::new("backtest", None, config_json);
    manifest.record_input("r1", &args.r1)?;
    manifest.record_input("r2", &args.r2)?;
    for (name, path) in &corr_inputs {
        manifest.record_input(name, path)?;
    }
    for m in &models {
        manifest.record_input(&format!("forecast_{}_1", m.name), &m.paths.0)?;
        manifest.record_input(&format!("forecast_{}_2", m.name), &m.paths.1)?;
    }
    manifest.write(&sidecar_path(&args.out))?;
    Ok(())
}

fn subset_returns(
    r: &ReturnSeries,
    grid: &[DateTime<Utc>],
    index: &BTreeMap<DateTime<Utc>, usize>,
) -> ReturnSeries {
    ReturnSeries {
        timestamps: grid.to_vec(),
        values: grid.iter().map(|t| r.values[index[t]]).collect(),
        grid_step: r.grid_step,
    }
}
