//! Two-asset global-minimum-variance backtest with a leverage clamp.

use crate::forecast::ForecastSeries;
use crate::market::ReturnSeries;
use crate::model::annualization_factor;
use chrono::{DateTime, Utc};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("series misaligned: {msg}")]
    Alignment { msg: String },
    #[error("portfolio variance is flat: |denominator| = {denom:e}")]
    Singularity { denom: f64 },
    #[error("volatility forecasts must be positive, got ({vol1}, {vol2})")]
    Domain { vol1: f64, vol2: f64 },
}

/// How the co-moment entering the weight formula is built from the
/// trailing realized correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoMoment {
    /// Covariance `rho * vol1 * vol2` — makes the weight the exact
    /// variance minimizer.
    #[default]
    Covariance,
    /// The raw correlation, taken literally as the co-moment.
    CorrelationLiteral,
}

/// Allowed leverage band for the first asset's weight.
pub const WEIGHT_MIN: f64 = -1.0;
pub const WEIGHT_MAX: f64 = 2.0;

/// Minimum-variance weight of asset 1 before clamping:
/// `(vol2^2 - c) / (vol1^2 + vol2^2 - 2c)` with co-moment `c`.
pub fn gmvp_weight_unclamped(vol1: f64, vol2: f64, cov12: f64) -> Result<f64, PortfolioError> {
    if !(vol1 > 0.0 && vol2 > 0.0) {
        return Err(PortfolioError::Domain { vol1, vol2 });
    }
    let denom = vol1 * vol1 + vol2 * vol2 - 2.0 * cov12;
    if denom.abs() < 1e-12 {
        return Err(PortfolioError::Singularity { denom });
    }
    Ok((vol2 * vol2 - cov12) / denom)
}

/// [`gmvp_weight_unclamped`] clamped to the leverage band [-1, 2].
pub fn gmvp_weight(vol1: f64, vol2: f64, cov12: f64) -> Result<f64, PortfolioError> {
    Ok(gmvp_weight_unclamped(vol1, vol2, cov12)?.clamp(WEIGHT_MIN, WEIGHT_MAX))
}

/// One rebalancing step of the backtest.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationStep {
    pub timestamp: DateTime<Utc>,
    pub vol1: f64,
    pub vol2: f64,
    pub cov12: f64,
    pub w1: f64,
    pub realized_return: f64,
}

/// Annualized backtest summary. `ann_mean` scales the 5-minute mean by
/// `252 * 288`, `ann_vol` the standard deviation by `sqrt(252 * 288)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioStats {
    pub ann_mean: f64,
    pub ann_vol: f64,
    pub ann_sharpe: f64,
    /// Set when the volatility was zero and the Sharpe ratio is
    /// reported as 0 by convention.
    pub degenerate: bool,
}

/// Summary statistics of a 5-minute portfolio return sequence.
pub fn portfolio_stats(returns: &[f64]) -> PortfolioStats {
    let n = returns.len();
    if n == 0 {
        return PortfolioStats {
            ann_mean: 0.0,
            ann_vol: 0.0,
            ann_sharpe: 0.0,
            degenerate: true,
        };
    }
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let factor = annualization_factor();
    let ann_mean = mean * factor * factor; // 252 * 288
    let ann_vol = var.sqrt() * factor;
    if ann_vol > 0.0 {
        PortfolioStats {
            ann_mean,
            ann_vol,
            ann_sharpe: ann_mean / ann_vol,
            degenerate: false,
        }
    } else {
        PortfolioStats {
            ann_mean,
            ann_vol,
            ann_sharpe: 0.0,
            degenerate: true,
        }
    }
}

/// Runs the minimum-variance backtest.
///
/// All five inputs must share the forecast grid: weights at `t` come
/// from the forecasts for `t` (built on information through `t-1`) and
/// the trailing realized correlation `corr[t]`, and earn
/// `w1 r1_t + (1 - w1) r2_t`.
pub fn backtest(
    r1: &ReturnSeries,
    r2: &ReturnSeries,
    f1: &ForecastSeries,
    f2: &ForecastSeries,
    corr: &[f64],
    mode: CoMoment,
) -> Result<(Vec<AllocationStep>, PortfolioStats), PortfolioError> {
    let n = f1.values.len();
    let aligned = f2.values.len() == n
        && r1.len() == n
        && r2.len() == n
        && corr.len() == n
        && f1.timestamps == f2.timestamps
        && r1.timestamps == f1.timestamps
        && r2.timestamps == f1.timestamps;
    if !aligned {
        return Err(PortfolioError::Alignment {
            msg: format!(
                "lengths r1={}, r2={}, f1={}, f2={}, corr={} or timestamps differ",
                r1.len(),
                r2.len(),
                f1.values.len(),
                f2.values.len(),
                corr.len()
            ),
        });
    }

    let mut steps = Vec::with_capacity(n);
    let mut returns = Vec::with_capacity(n);
    for t in 0..n {
        let (vol1, vol2) = (f1.values[t], f2.values[t]);
        let cov12 = match mode {
            CoMoment::Covariance => corr[t] * vol1 * vol2,
            CoMoment::CorrelationLiteral => corr[t],
        };
        let w1 = gmvp_weight(vol1, vol2, cov12)?;
        let realized = w1 * r1.values[t] + (1.0 - w1) * r2.values[t];
        steps.push(AllocationStep {
            timestamp: f1.timestamps[t],
            vol1,
            vol2,
            cov12,
            w1,
            realized_return: realized,
        });
        returns.push(realized);
    }
    Ok((steps, portfolio_stats(&returns)))
}
