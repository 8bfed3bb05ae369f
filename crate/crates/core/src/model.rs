//! Model parameterization and a generative simulator.
//!
//! Additive form (used for estimation):
//! `h_t = log(v_t^2) = mu_h + x_t + beta[bin(t)] + sum_j alpha_j`
//! over the active design columns of window `t`, with
//! `x_t = phi * x_{t-1} + sigma_x * eta_t`.
//!
//! Multiplicative form (used for interpretation):
//! `v_t = sigma * X_t * S_t * E_t` with each factor `exp(component / 2)`.

use crate::market::{EventDesignMatrix, ReturnSeries, SEASONAL_BINS};
use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("|phi| must be below 1 for a stationary latent process, got {phi}")]
    Stationarity { phi: f64 },
    #[error("invalid parameter: {msg}")]
    Invalid { msg: String },
    #[error("domain error: {msg}")]
    Domain { msg: String },
    #[error("dimension mismatch: {msg}")]
    Dimension { msg: String },
    #[error("failed to read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Full parameter set of the volatility model.
///
/// `beta` holds the 288 seasonal coefficients and sums to zero;
/// `alpha[j]` is zero whenever the inclusion indicator `pi[j]` is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu_h: f64,
    pub phi: f64,
    pub sigma_x2: f64,
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub pi: Vec<u8>,
    pub gamma: f64,
    pub sigma_alpha2: f64,
}

impl ModelParams {
    /// Neutral parameter set with `n_event_columns` announcement columns.
    pub fn with_event_columns(n_event_columns: usize) -> Self {
        Self {
            mu_h: 0.0,
            phi: 0.95,
            sigma_x2: 0.02,
            beta: vec![0.0; SEASONAL_BINS],
            alpha: vec![0.0; n_event_columns],
            pi: vec![0; n_event_columns],
            gamma: 0.05,
            sigma_alpha2: 1.0,
        }
    }

    pub fn n_event_columns(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.phi.is_finite() && self.phi.abs() < 1.0) {
            return Err(ModelError::Stationarity { phi: self.phi });
        }
        if !(self.sigma_x2 > 0.0) {
            return Err(ModelError::Invalid {
                msg: format!("sigma_x2 must be positive, got {}", self.sigma_x2),
            });
        }
        if !(self.sigma_alpha2 > 0.0) {
            return Err(ModelError::Invalid {
                msg: format!("sigma_alpha2 must be positive, got {}", self.sigma_alpha2),
            });
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ModelError::Invalid {
                msg: format!("gamma must lie in (0,1), got {}", self.gamma),
            });
        }
        if self.beta.len() != SEASONAL_BINS {
            return Err(ModelError::Dimension {
                msg: format!("beta has {} bins, expected {SEASONAL_BINS}", self.beta.len()),
            });
        }
        if self.alpha.len() != self.pi.len() {
            return Err(ModelError::Dimension {
                msg: format!(
                    "alpha has {} entries but pi has {}",
                    self.alpha.len(),
                    self.pi.len()
                ),
            });
        }
        let beta_sum: f64 = self.beta.iter().sum();
        if beta_sum.abs() > 1e-10 {
            return Err(ModelError::Invalid {
                msg: format!("seasonal coefficients sum to {beta_sum}, expected 0"),
            });
        }
        for (j, (&a, &p)) in self.alpha.iter().zip(&self.pi).enumerate() {
            if p == 0 && a != 0.0 {
                return Err(ModelError::Invalid {
                    msg: format!("alpha[{j}] = {a} but pi[{j}] = 0"),
                });
            }
        }
        Ok(())
    }
}

/// Prior hyperparameters.
///
/// Coefficient priors (`mu_h`-plus-seasonal bin coefficients) are
/// zero-mean Gaussians with variance `coef_var`; the persistence prior
/// is `N(phi_mean, phi_var)` truncated to (-1, 1); the two variances
/// carry inverse-gamma priors and the inclusion probability a
/// `Beta(gamma_a, gamma_b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorConfig {
    pub coef_var: f64,
    pub phi_mean: f64,
    pub phi_var: f64,
    pub ig_x_shape: f64,
    pub ig_x_scale: f64,
    pub ig_a_shape: f64,
    pub ig_a_scale: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            coef_var: 100.0,
            phi_mean: 0.95,
            phi_var: 0.25,
            ig_x_shape: 2.5,
            ig_x_scale: 0.025,
            ig_a_shape: 2.5,
            ig_a_scale: 2.5,
            gamma_a: 1.0,
            gamma_b: 19.0,
        }
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positives = [
            ("coef_var", self.coef_var),
            ("phi_var", self.phi_var),
            ("ig_x_shape", self.ig_x_shape),
            ("ig_x_scale", self.ig_x_scale),
            ("ig_a_shape", self.ig_a_shape),
            ("ig_a_scale", self.ig_a_scale),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::Invalid {
                    msg: format!("prior {name} must be positive and finite, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Latent stochastic-volatility path.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPath {
    pub x: Vec<f64>,
}

/// Log variance `h_t` for one observation.
pub fn log_variance(params: &ModelParams, x_t: f64, bin: usize, event_cols: &[u32]) -> f64 {
    let event: f64 = event_cols.iter().map(|&j| params.alpha[j as usize]).sum();
    params.mu_h + x_t + params.beta[bin] + event
}

/// Multiplicative factors of the volatility `v_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolComponents {
    /// Baseline level `exp(mu_h / 2)`.
    pub level: f64,
    /// Persistent factor `exp(x_t / 2)`.
    pub sv: f64,
    /// Seasonal factor `exp(beta[bin] / 2)`.
    pub seasonal: f64,
    /// Announcement factor `exp(sum(alpha) / 2)`.
    pub event: f64,
}

impl VolComponents {
    pub fn volatility(&self) -> f64 {
        self.level * self.sv * self.seasonal * self.event
    }
}

pub fn multiplicative_components(
    params: &ModelParams,
    x_t: f64,
    bin: usize,
    event_cols: &[u32],
) -> VolComponents {
    let event: f64 = event_cols.iter().map(|&j| params.alpha[j as usize]).sum();
    VolComponents {
        level: (params.mu_h / 2.0).exp(),
        sv: (x_t / 2.0).exp(),
        seasonal: (params.beta[bin] / 2.0).exp(),
        event: (event / 2.0).exp(),
    }
}

/// Annualization factor for 5-minute volatility: `sqrt(252 * 288)`.
pub fn annualization_factor() -> f64 {
    (252.0_f64 * 288.0).sqrt()
}

/// Scales a 5-minute volatility (percent) to percent per year.
pub fn annualize(vol_5min: f64) -> Result<f64, ModelError> {
    if !(vol_5min >= 0.0) {
        return Err(ModelError::Domain {
            msg: format!("volatility must be nonnegative, got {vol_5min}"),
        });
    }
    Ok(vol_5min * annualization_factor())
}

/// Default first timestamp of simulated grids: a Monday midnight.
pub fn default_sim_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2017, 1, 2, 0, 0, 0).unwrap()
}

/// Simulates returns and the latent path on a gapless 5-minute grid
/// starting at [`default_sim_start`]. Reproducible for a given seed.
pub fn simulate(
    params: &ModelParams,
    design: &EventDesignMatrix,
    t_len: usize,
    seed: u64,
) -> Result<(ReturnSeries, LatentPath), ModelError> {
    simulate_from(params, design, t_len, seed, default_sim_start())
}

/// [`simulate`] with an explicit grid start (must be 5-minute aligned).
pub fn simulate_from(
    params: &ModelParams,
    design: &EventDesignMatrix,
    t_len: usize,
    seed: u64,
    start: DateTime<Utc>,
) -> Result<(ReturnSeries, LatentPath), ModelError> {
    if t_len == 0 {
        return Err(ModelError::Dimension {
            msg: "simulation length must be at least 1".into(),
        });
    }
    if design.n_rows() != t_len {
        return Err(ModelError::Dimension {
            msg: format!(
                "design has {} rows but T = {t_len}",
                design.n_rows()
            ),
        });
    }
    params.validate()?;
    if crate::market::seasonal_index(start).is_err() {
        return Err(ModelError::Domain {
            msg: "simulation start must be on the 5-minute grid".into(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_x = params.sigma_x2.sqrt();
    let stationary_sd = (params.sigma_x2 / (1.0 - params.phi * params.phi)).sqrt();

    let mut x = Vec::with_capacity(t_len);
    let mut values = Vec::with_capacity(t_len);
    let mut timestamps = Vec::with_capacity(t_len);
    let z0: f64 = StandardNormal.sample(&mut rng);
    let mut state = stationary_sd * z0;
    for t in 0..t_len {
        if t > 0 {
            let eta: f64 = StandardNormal.sample(&mut rng);
            state = params.phi * state + sigma_x * eta;
        }
        x.push(state);
        let ts = start + Duration::minutes(5 * t as i64);
        let bin = crate::market::seasonal_index(ts).expect("grid stays aligned");
        let h = log_variance(params, state, bin, design.cols_of_row(t));
        let eps: f64 = StandardNormal.sample(&mut rng);
        values.push((h / 2.0).exp() * eps);
        timestamps.push(ts);
    }

    let series = ReturnSeries::new(timestamps, values, 5).map_err(|e| ModelError::Invalid {
        msg: e.to_string(),
    })?;
    Ok((series, LatentPath { x }))
}

/// Writes model parameters as JSON (the `truth.json` layout).
pub fn write_params_json(params: &ModelParams, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(params).expect("params serialize");
    std::fs::write(path, json).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn read_params_json(path: impl AsRef<Path>) -> Result<ModelParams, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}
