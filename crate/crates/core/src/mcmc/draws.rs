//! Retained posterior draws: summaries and columnar CSV persistence.

use super::chain::Variant;
use super::McmcError;
use crate::market::{fmt_full, ColumnLabel, SEASONAL_BINS};
use crate::model::ModelParams;
use std::fmt::Write as _;
use std::path::Path;

/// Per-sweep diagnostics carried with each retained draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub iteration: usize,
    /// Gaussian log density of the returns given the sweep's
    /// log-variance path.
    pub log_likelihood: f64,
}

/// Retained sweeps of the sampler.
#[derive(Debug, Clone)]
pub struct PosteriorDraws {
    pub variant: Variant,
    pub column_labels: Vec<ColumnLabel>,
    pub params: Vec<ModelParams>,
    pub meta: Vec<SweepMeta>,
    /// Thinned latent paths, when retention was requested.
    pub latent: Option<Vec<Vec<f64>>>,
}

/// Posterior means of every parameter (inclusion indicators average to
/// inclusion probabilities).
#[derive(Debug, Clone)]
pub struct PosteriorMean {
    pub mu_h: f64,
    pub phi: f64,
    pub sigma_x2: f64,
    pub gamma: f64,
    pub sigma_alpha2: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub pi: Vec<f64>,
}

/// Per-column announcement summary: inclusion frequency and the mean
/// multiplicative effect `exp(alpha / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionSummary {
    pub label: ColumnLabel,
    pub mean_pi: f64,
    pub mean_effect: f64,
}

impl PosteriorDraws {
    pub fn new(variant: Variant, column_labels: Vec<ColumnLabel>) -> Self {
        Self {
            variant,
            column_labels,
            params: Vec::new(),
            meta: Vec::new(),
            latent: None,
        }
    }

    pub fn push(&mut self, params: ModelParams, meta: SweepMeta) {
        self.params.push(params);
        self.meta.push(meta);
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn n_event_columns(&self) -> usize {
        self.params.first().map_or(0, |p| p.alpha.len())
    }

    pub fn posterior_mean(&self) -> PosteriorMean {
        let n = self.params.len().max(1) as f64;
        let m = self.n_event_columns();
        let mut mean = PosteriorMean {
            mu_h: 0.0,
            phi: 0.0,
            sigma_x2: 0.0,
            gamma: 0.0,
            sigma_alpha2: 0.0,
            beta: vec![0.0; SEASONAL_BINS],
            alpha: vec![0.0; m],
            pi: vec![0.0; m],
        };
        for p in &self.params {
            mean.mu_h += p.mu_h / n;
            mean.phi += p.phi / n;
            mean.sigma_x2 += p.sigma_x2 / n;
            mean.gamma += p.gamma / n;
            mean.sigma_alpha2 += p.sigma_alpha2 / n;
            for (acc, b) in mean.beta.iter_mut().zip(&p.beta) {
                *acc += b / n;
            }
            for (acc, a) in mean.alpha.iter_mut().zip(&p.alpha) {
                *acc += a / n;
            }
            for (acc, &ind) in mean.pi.iter_mut().zip(&p.pi) {
                *acc += ind as f64 / n;
            }
        }
        mean
    }

    /// Draws of one scalar parameter, for interval summaries.
    pub fn scalar_draws(&self, extract: impl Fn(&ModelParams) -> f64) -> Vec<f64> {
        self.params.iter().map(extract).collect()
    }

    /// Per-column mean inclusion and mean `exp(alpha/2)` over sweeps.
    pub fn inclusion_summary(&self) -> Vec<InclusionSummary> {
        let n = self.params.len().max(1) as f64;
        let m = self.n_event_columns();
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            let mut mean_pi = 0.0;
            let mut mean_effect = 0.0;
            for p in &self.params {
                mean_pi += p.pi[j] as f64 / n;
                mean_effect += (p.alpha[j] / 2.0).exp() / n;
            }
            let label = self
                .column_labels
                .get(j)
                .cloned()
                .unwrap_or(ColumnLabel {
                    event_id: format!("col{j}"),
                    lag: 0,
                });
            out.push(InclusionSummary {
                label,
                mean_pi,
                mean_effect,
            });
        }
        out
    }
}

/// Empirical quantile with linear interpolation.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Writes draws as columnar CSV, one row per retained sweep.
///
/// Scalar columns come first; `beta_*` appears unless the variant is
/// `sv`, `alpha_*`/`pi_*` only for `full`.
pub fn write_draws_csv(draws: &PosteriorDraws, path: impl AsRef<Path>) -> Result<(), McmcError> {
    let path = path.as_ref();
    let m = draws.n_event_columns();
    let mut out = String::new();
    out.push_str("iteration,log_likelihood,mu_h,phi,sigma_x2");
    if draws.variant.has_events() {
        out.push_str(",gamma,sigma_alpha2");
    }
    if draws.variant.has_seasonal() {
        for k in 0..SEASONAL_BINS {
            write!(out, ",beta_{k}").unwrap();
        }
    }
    if draws.variant.has_events() {
        for j in 0..m {
            write!(out, ",alpha_{j}").unwrap();
        }
        for j in 0..m {
            write!(out, ",pi_{j}").unwrap();
        }
    }
    out.push('\n');

    for (p, meta) in draws.params.iter().zip(&draws.meta) {
        write!(
            out,
            "{},{},{},{},{}",
            meta.iteration,
            fmt_full(meta.log_likelihood),
            fmt_full(p.mu_h),
            fmt_full(p.phi),
            fmt_full(p.sigma_x2)
        )
        .unwrap();
        if draws.variant.has_events() {
            write!(out, ",{},{}", fmt_full(p.gamma), fmt_full(p.sigma_alpha2)).unwrap();
        }
        if draws.variant.has_seasonal() {
            for b in &p.beta {
                write!(out, ",{}", fmt_full(*b)).unwrap();
            }
        }
        if draws.variant.has_events() {
            for a in &p.alpha {
                write!(out, ",{}", fmt_full(*a)).unwrap();
            }
            for ind in &p.pi {
                write!(out, ",{ind}").unwrap();
            }
        }
        out.push('\n');
    }

    std::fs::write(path, out).map_err(|e| McmcError::Config {
        msg: format!("failed to write {}: {e}", path.display()),
    })
}

/// Reads draws written by [`write_draws_csv`]. The variant is inferred
/// from the columns present; event labels are not stored in the CSV and
/// come back as column indices.
pub fn read_draws_csv(path: impl AsRef<Path>) -> Result<PosteriorDraws, McmcError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| McmcError::Config {
        msg: format!("failed to read {}: {e}", path.display()),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| McmcError::Config {
            msg: format!("bad header in {}: {e}", path.display()),
        })?
        .clone();
    let index: std::collections::HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h, i))
        .collect();

    let has_beta = index.contains_key("beta_0");
    let has_alpha = index.contains_key("alpha_0");
    let variant = if has_alpha {
        Variant::Full
    } else if has_beta {
        Variant::Ssv
    } else {
        Variant::Sv
    };
    let m = (0..)
        .take_while(|j| index.contains_key(format!("alpha_{j}").as_str()))
        .count();

    let need = |name: &str| -> Result<usize, McmcError> {
        index.get(name).copied().ok_or_else(|| McmcError::Config {
            msg: format!("draws file missing column {name:?}"),
        })
    };
    let it_idx = need("iteration")?;
    let ll_idx = need("log_likelihood")?;
    let mu_idx = need("mu_h")?;
    let phi_idx = need("phi")?;
    let sx_idx = need("sigma_x2")?;

    let labels = (0..m)
        .map(|j| ColumnLabel {
            event_id: format!("col{j}"),
            lag: 0,
        })
        .collect();
    let mut draws = PosteriorDraws::new(variant, labels);

    for record in reader.records() {
        let record = record.map_err(|e| McmcError::Config {
            msg: format!("bad record in {}: {e}", path.display()),
        })?;
        let get = |i: usize| -> Result<f64, McmcError> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| McmcError::Config {
                    msg: format!("bad numeric field {i} in {}", path.display()),
                })
        };
        let mut p = ModelParams::with_event_columns(m);
        p.mu_h = get(mu_idx)?;
        p.phi = get(phi_idx)?;
        p.sigma_x2 = get(sx_idx)?;
        if variant.has_events() {
            p.gamma = get(need("gamma")?)?;
            p.sigma_alpha2 = get(need("sigma_alpha2")?)?;
        }
        if variant.has_seasonal() {
            for k in 0..SEASONAL_BINS {
                p.beta[k] = get(need(&format!("beta_{k}"))?)?;
            }
        }
        if variant.has_events() {
            for j in 0..m {
                p.alpha[j] = get(need(&format!("alpha_{j}"))?)?;
            }
            for j in 0..m {
                p.pi[j] = get(need(&format!("pi_{j}"))?)? as u8;
            }
        }
        let meta = SweepMeta {
            iteration: get(it_idx)? as usize,
            log_likelihood: get(ll_idx)?,
        };
        draws.push(p, meta);
    }
    Ok(draws)
}
