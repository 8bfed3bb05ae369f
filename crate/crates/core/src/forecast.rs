//! One-step-ahead volatility forecasts and the evaluation battery:
//! encompassing (horse-race) regressions and Diebold-Mariano tests.

use crate::linalg::{invert_spd, ols_qr, DenseMatrix};
use crate::market::EventDesignMatrix;
use crate::mcmc::{MixtureTable, PosteriorMean, LINEARIZATION_OFFSET};
use chrono::{DateTime, Utc};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("series misaligned: {msg}")]
    Alignment { msg: String },
    #[error("need at least {required} observations, got {got}")]
    Length { required: usize, got: usize },
    #[error("degenerate inputs: {msg}")]
    Degenerate { msg: String },
}

/// Predicted 5-minute volatility (percent), tagged with its model.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries {
    pub timestamps: Vec<DateTime<Utc>>,
    pub values: Vec<f64>,
    pub model: String,
}

/// Controls of the model-based forecaster.
#[derive(Debug, Clone, Copy)]
pub struct ProposalForecastConfig {
    /// Apply the lognormal mean correction `exp(var_pred / 8)` coming
    /// from the predictive uncertainty of the latent state; off gives
    /// the plain plug-in forecast.
    pub mean_correction: bool,
}

impl Default for ProposalForecastConfig {
    fn default() -> Self {
        Self {
            mean_correction: true,
        }
    }
}

/// One-step-ahead volatility forecasts with parameters fixed at their
/// posterior means.
///
/// A collapsed Gaussian-mixture filter tracks the latent state over the
/// linearized observations. At each target index the state is
/// propagated one step (information through `t-1` only), the seasonal
/// bin and the scheduled announcement columns of `t` are added, and the
/// forecast is `exp(h_pred / 2)` times the optional mean correction.
/// Deterministic given draws and data.
pub fn proposal_forecasts(
    posterior: &PosteriorMean,
    returns: &[f64],
    bins: &[usize],
    design: &EventDesignMatrix,
    oos_start: usize,
    config: &ProposalForecastConfig,
) -> Result<Vec<f64>, EvalError> {
    let t_len = returns.len();
    if bins.len() != t_len || design.n_rows() != t_len {
        return Err(EvalError::Alignment {
            msg: format!(
                "returns {t_len}, bins {}, design rows {}",
                bins.len(),
                design.n_rows()
            ),
        });
    }
    if oos_start >= t_len {
        return Err(EvalError::Length {
            required: oos_start + 1,
            got: t_len,
        });
    }

    let table = MixtureTable::ksc();
    let comps = table.components();
    let phi = posterior.phi;
    let sigma_x2 = posterior.sigma_x2;

    let mut forecasts = Vec::with_capacity(t_len - oos_start);
    // filtered moments of x_{t-1}
    let mut mean = 0.0f64;
    let mut var = sigma_x2 / (1.0 - phi * phi);

    for t in 0..t_len {
        // predict x_t from information through t-1
        let pred_mean = if t == 0 { mean } else { phi * mean };
        let pred_var = if t == 0 {
            var
        } else {
            phi * phi * var + sigma_x2
        };

        if t >= oos_start {
            let event: f64 = design
                .cols_of_row(t)
                .iter()
                .map(|&j| posterior.alpha[j as usize])
                .sum();
            let h_pred = posterior.mu_h + pred_mean + posterior.beta[bins[t]] + event;
            let correction = if config.mean_correction {
                (pred_var / 8.0).exp()
            } else {
                1.0
            };
            forecasts.push((h_pred / 2.0).exp() * correction);
        }

        // measurement update with the realized return at t
        let y_star = (returns[t] * returns[t] + LINEARIZATION_OFFSET).ln();
        let event: f64 = design
            .cols_of_row(t)
            .iter()
            .map(|&j| posterior.alpha[j as usize])
            .sum();
        let obs = y_star - posterior.mu_h - posterior.beta[bins[t]] - event;

        // per-component Kalman updates, collapsed by moment matching
        let mut weights = [0.0f64; 7];
        let mut means = [0.0f64; 7];
        let mut vars = [0.0f64; 7];
        let mut max_log = f64::NEG_INFINITY;
        let mut logw = [0.0f64; 7];
        for (j, c) in comps.iter().enumerate() {
            let s = pred_var + c.variance;
            let innov = obs - c.mean - pred_mean;
            logw[j] = if c.weight > 0.0 {
                c.weight.ln() - 0.5 * s.ln() - innov * innov / (2.0 * s)
            } else {
                f64::NEG_INFINITY
            };
            max_log = max_log.max(logw[j]);
            let gain = pred_var / s;
            means[j] = pred_mean + gain * innov;
            vars[j] = pred_var * c.variance / s;
        }
        let mut total = 0.0;
        for j in 0..7 {
            weights[j] = (logw[j] - max_log).exp();
            total += weights[j];
        }
        let mut m_new = 0.0;
        for j in 0..7 {
            weights[j] /= total;
            m_new += weights[j] * means[j];
        }
        let mut v_new = 0.0;
        for j in 0..7 {
            let d = means[j] - m_new;
            v_new += weights[j] * (vars[j] + d * d);
        }
        mean = m_new;
        var = v_new;
    }
    Ok(forecasts)
}

/// Encompassing regression of realized volatility on a pair of
/// forecasts with weights constrained to sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorseRaceResult {
    pub b0: f64,
    /// Proposal weight, clamped to [0, 1].
    pub b1: f64,
    /// t statistic of the unclamped proposal weight, from HAC standard
    /// errors (Bartlett kernel, lag `floor(n^(1/3))`).
    pub t_stat: f64,
    pub n_obs: usize,
    /// Set when the unclamped estimate fell outside [0, 1].
    pub clamped: bool,
}

/// Fits `RV_t = b0 + b1 P_t + (1 - b1) C_t + e_t` as the transformed
/// regression `(RV - C) = b0 + b1 (P - C) + e`.
pub fn horse_race(
    rv: &[f64],
    proposal: &[f64],
    competitor: &[f64],
) -> Result<HorseRaceResult, EvalError> {
    let n = rv.len();
    if proposal.len() != n || competitor.len() != n {
        return Err(EvalError::Alignment {
            msg: format!(
                "rv {n}, proposal {}, competitor {}",
                proposal.len(),
                competitor.len()
            ),
        });
    }
    if n < 30 {
        return Err(EvalError::Length {
            required: 30,
            got: n,
        });
    }
    let spread_var: f64 = {
        let diffs: Vec<f64> = proposal
            .iter()
            .zip(competitor)
            .map(|(p, c)| p - c)
            .collect();
        let mean = diffs.iter().sum::<f64>() / n as f64;
        diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64
    };
    if spread_var < 1e-20 {
        return Err(EvalError::Degenerate {
            msg: "proposal and competitor forecasts coincide".into(),
        });
    }

    let mut x = DenseMatrix::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    for t in 0..n {
        x.set(t, 0, 1.0);
        x.set(t, 1, proposal[t] - competitor[t]);
        y.push(rv[t] - competitor[t]);
    }
    let beta = ols_qr(&x, &y).map_err(|e| EvalError::Degenerate { msg: e.to_string() })?;

    let lags = (n as f64).powf(1.0 / 3.0).floor() as usize;
    let cov = hac_coefficient_covariance(&x, &y, &beta, lags).ok_or_else(|| {
        EvalError::Degenerate {
            msg: "singular regressor cross-product".into(),
        }
    })?;
    let se_b1 = cov.at(1, 1).max(0.0).sqrt();
    let t_stat = if se_b1 > 0.0 {
        beta[1] / se_b1
    } else if beta[1] == 0.0 {
        0.0
    } else {
        f64::INFINITY * beta[1].signum()
    };

    // float-noise excursions at the boundaries do not count as clamping
    let clamped = beta[1] < -1e-10 || beta[1] > 1.0 + 1e-10;
    Ok(HorseRaceResult {
        b0: beta[0],
        b1: beta[1].clamp(0.0, 1.0),
        t_stat,
        n_obs: n,
        clamped,
    })
}

/// Newey-West (Bartlett) covariance of OLS coefficients.
fn hac_coefficient_covariance(
    x: &DenseMatrix,
    y: &[f64],
    beta: &[f64],
    lags: usize,
) -> Option<DenseMatrix> {
    let (n, p) = (x.rows, x.cols);
    // residual scores g_t = x_t * e_t
    let mut scores = vec![0.0; n * p];
    for t in 0..n {
        let mut fit = 0.0;
        for c in 0..p {
            fit += x.at(t, c) * beta[c];
        }
        let e = y[t] - fit;
        for c in 0..p {
            scores[t * p + c] = x.at(t, c) * e;
        }
    }
    // meat: Gamma_0 + sum_k w_k (Gamma_k + Gamma_k')
    let mut meat = DenseMatrix::zeros(p, p);
    for k in 0..=lags.min(n.saturating_sub(1)) {
        let w = 1.0 - k as f64 / (lags + 1) as f64;
        for t in k..n {
            for i in 0..p {
                for j in 0..p {
                    let v = scores[t * p + i] * scores[(t - k) * p + j];
                    let add = if k == 0 { v } else { w * (v) };
                    meat.set(i, j, meat.at(i, j) + add);
                    if k > 0 {
                        meat.set(j, i, meat.at(j, i) + w * v);
                    }
                }
            }
        }
    }
    // bread: (X'X)^{-1}
    let mut xtx = DenseMatrix::zeros(p, p);
    for t in 0..n {
        for i in 0..p {
            for j in 0..p {
                xtx.set(i, j, xtx.at(i, j) + x.at(t, i) * x.at(t, j));
            }
        }
    }
    let bread = invert_spd(&xtx)?;
    // bread * meat * bread
    let mut tmp = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                s += bread.at(i, k) * meat.at(k, j);
            }
            tmp.set(i, j, s);
        }
    }
    let mut cov = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                s += tmp.at(i, k) * bread.at(k, j);
            }
            cov.set(i, j, s);
        }
    }
    Some(cov)
}

/// Loss used in the Diebold-Mariano comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossType {
    /// Squared error of the volatility forecast against realized
    /// volatility.
    SquaredError,
}

/// Diebold-Mariano test result. The alternative is one-sided: the
/// competitor is less accurate than the proposal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmResult {
    pub statistic: f64,
    pub p_value: f64,
    pub loss: LossType,
    pub hac_lags: usize,
}

/// Diebold-Mariano with the default lag `horizon - 1`.
pub fn diebold_mariano(
    errors_proposal: &[f64],
    errors_competitor: &[f64],
    horizon: usize,
) -> Result<DmResult, EvalError> {
    diebold_mariano_with_lags(
        errors_proposal,
        errors_competitor,
        horizon.saturating_sub(1),
    )
}

/// Diebold-Mariano with an explicit Bartlett lag (e.g. 5 when losses at
/// the 5-minute horizon stay autocorrelated).
pub fn diebold_mariano_with_lags(
    errors_proposal: &[f64],
    errors_competitor: &[f64],
    hac_lags: usize,
) -> Result<DmResult, EvalError> {
    let n = errors_proposal.len();
    if errors_competitor.len() != n {
        return Err(EvalError::Alignment {
            msg: format!(
                "proposal errors {n}, competitor errors {}",
                errors_competitor.len()
            ),
        });
    }
    if n < 30 {
        return Err(EvalError::Length {
            required: 30,
            got: n,
        });
    }
    let d: Vec<f64> = errors_proposal
        .iter()
        .zip(errors_competitor)
        .map(|(ep, ec)| ec * ec - ep * ep)
        .collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var_of_mean = hac_variance_of_mean(&d, hac_lags);
    if var_of_mean <= 0.0 || !var_of_mean.is_finite() {
        return Err(EvalError::Degenerate {
            msg: "zero variance of the loss differential".into(),
        });
    }
    let statistic = mean / var_of_mean.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p_value = 1.0 - normal.cdf(statistic);
    Ok(DmResult {
        statistic,
        p_value,
        loss: LossType::SquaredError,
        hac_lags,
    })
}

/// Bartlett-kernel long-run variance of the sample mean:
/// `(gamma_0 + 2 sum w_k gamma_k) / n`.
pub fn hac_variance_of_mean(series: &[f64], lags: usize) -> f64 {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut total = 0.0;
    for k in 0..=lags.min(n.saturating_sub(1)) {
        let mut acc = 0.0;
        for t in k..n {
            acc += (series[t] - mean) * (series[t - k] - mean);
        }
        let gamma = acc / n as f64;
        if k == 0 {
            total += gamma;
        } else {
            let w = 1.0 - k as f64 / (lags + 1) as f64;
            total += 2.0 * w * gamma;
        }
    }
    total / n as f64
}
