//! Benchmark volatility models: AR(1) on realized volatility, the HAR
//! regression, and Gaussian quasi-maximum-likelihood GARCH(1,1) /
//! GJR-GARCH. All of them forecast one step ahead on the 5-minute grid.

use crate::linalg::{ols_qr, DenseMatrix, LinalgError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("need at least {required} observations, got {got}")]
    Length { required: usize, got: usize },
    #[error("degenerate regressors: {msg}")]
    Rank { msg: String },
    #[error("optimizer failed to converge: {trace}")]
    Optimizer { trace: String },
}

/// Which benchmark produced a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineModel {
    Ar1Rv,
    Har,
    Garch11,
    GjrGarch,
}

impl BaselineModel {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineModel::Ar1Rv => "ar1-rv",
            BaselineModel::Har => "har",
            BaselineModel::Garch11 => "garch11",
            BaselineModel::GjrGarch => "gjr-garch",
        }
    }
}

impl std::str::FromStr for BaselineModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ar1rv" | "ar1-rv" => Ok(BaselineModel::Ar1Rv),
            "har" => Ok(BaselineModel::Har),
            "garch" | "garch11" => Ok(BaselineModel::Garch11),
            "gjr" | "gjr-garch" => Ok(BaselineModel::GjrGarch),
            other => Err(format!("unknown baseline {other:?}")),
        }
    }
}

/// Goodness-of-fit criterion stored with a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitCriterion {
    LogLikelihood(f64),
    SumSquaredResiduals(f64),
}

/// A fitted benchmark: labeled parameters plus the fit criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineFit {
    pub model: BaselineModel,
    pub labels: Vec<String>,
    pub params: Vec<f64>,
    pub criterion: FitCriterion,
    pub converged: bool,
}

impl BaselineFit {
    pub fn param(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.params[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

fn map_rank(err: LinalgError) -> BaselineError {
    BaselineError::Rank {
        msg: err.to_string(),
    }
}

/// AR(1) for realized volatility: OLS of `RV_t` on `(1, RV_{t-1})`.
pub fn fit_ar1_rv(rv: &[f64]) -> Result<BaselineFit, BaselineError> {
    if rv.len() < 3 {
        return Err(BaselineError::Length {
            required: 3,
            got: rv.len(),
        });
    }
    let n = rv.len() - 1;
    let mut x = DenseMatrix::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    for t in 1..rv.len() {
        x.set(t - 1, 0, 1.0);
        x.set(t - 1, 1, rv[t - 1]);
        y.push(rv[t]);
    }
    let beta = ols_qr(&x, &y).map_err(map_rank)?;
    let ssr = regression_ssr(&x, &y, &beta);
    Ok(BaselineFit {
        model: BaselineModel::Ar1Rv,
        labels: vec!["intercept".into(), "rho".into()],
        params: beta,
        criterion: FitCriterion::SumSquaredResiduals(ssr),
        converged: true,
    })
}

/// HAR: OLS of `RV_t` on the previous window, the mean of the last 12
/// windows (one hour) and the mean of the last 288 (one day).
pub fn fit_har(rv: &[f64]) -> Result<BaselineFit, BaselineError> {
    const DAY: usize = 288;
    const HOUR: usize = 12;
    if rv.len() < DAY + 1 {
        return Err(BaselineError::Length {
            required: DAY + 1,
            got: rv.len(),
        });
    }
    let n = rv.len() - DAY;
    let mut x = DenseMatrix::zeros(n, 4);
    let mut y = Vec::with_capacity(n);
    for t in DAY..rv.len() {
        let row = t - DAY;
        x.set(row, 0, 1.0);
        x.set(row, 1, rv[t - 1]);
        x.set(row, 2, mean_of(&rv[t - HOUR..t]));
        x.set(row, 3, mean_of(&rv[t - DAY..t]));
        y.push(rv[t]);
    }
    let beta = ols_qr(&x, &y).map_err(map_rank)?;
    let ssr = regression_ssr(&x, &y, &beta);
    Ok(BaselineFit {
        model: BaselineModel::Har,
        labels: vec![
            "intercept".into(),
            "rv_5min".into(),
            "rv_hour".into(),
            "rv_day".into(),
        ],
        params: beta,
        criterion: FitCriterion::SumSquaredResiduals(ssr),
        converged: true,
    })
}

fn mean_of(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn regression_ssr(x: &DenseMatrix, y: &[f64], beta: &[f64]) -> f64 {
    let mut ssr = 0.0;
    for (r, &yv) in y.iter().enumerate() {
        let mut fit = 0.0;
        for (c, b) in beta.iter().enumerate() {
            fit += x.at(r, c) * b;
        }
        ssr += (yv - fit) * (yv - fit);
    }
    ssr
}

/// One-step AR1-RV forecasts over the whole series, aligned with the
/// input: entry `t` predicts `rv[t]` from `rv[t-1]`. Entry 0 (no
/// history) falls back to the sample mean; negatives are floored at 0.
pub fn ar1_rv_forecast_series(fit: &BaselineFit, rv: &[f64]) -> Vec<f64> {
    let c = fit.param("intercept").unwrap_or(0.0);
    let rho = fit.param("rho").unwrap_or(0.0);
    let fallback = mean_of(rv);
    (0..rv.len())
        .map(|t| {
            if t == 0 {
                fallback
            } else {
                (c + rho * rv[t - 1]).max(0.0)
            }
        })
        .collect()
}

/// One-step HAR forecasts aligned with the input; the first 288 entries
/// (incomplete daily history) fall back to the sample mean.
pub fn har_forecast_series(fit: &BaselineFit, rv: &[f64]) -> Vec<f64> {
    const DAY: usize = 288;
    const HOUR: usize = 12;
    let b0 = fit.param("intercept").unwrap_or(0.0);
    let b1 = fit.param("rv_5min").unwrap_or(0.0);
    let b2 = fit.param("rv_hour").unwrap_or(0.0);
    let b3 = fit.param("rv_day").unwrap_or(0.0);
    let fallback = mean_of(rv);
    (0..rv.len())
        .map(|t| {
            if t < DAY {
                fallback
            } else {
                (b0 + b1 * rv[t - 1]
                    + b2 * mean_of(&rv[t - HOUR..t])
                    + b3 * mean_of(&rv[t - DAY..t]))
                .max(0.0)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// GARCH family
// ---------------------------------------------------------------------------

/// Negative of [`garch_log_likelihood`], the optimizer objective.
fn garch_nll(params: &[f64], y: &[f64], gjr: bool) -> f64 {
    match garch_log_likelihood(params, y, gjr) {
        Some(ll) => -ll,
        None => f64::INFINITY,
    }
}

/// Gaussian log likelihood of a GARCH(1,1) (`params = [omega, a, b]`)
/// or GJR (`params = [omega, a, g, b]`) recursion started at the sample
/// variance. Returns `None` outside the stationarity/positivity region.
pub fn garch_log_likelihood(params: &[f64], y: &[f64], gjr: bool) -> Option<f64> {
    let (omega, a, g, b) = if gjr {
        (params[0], params[1], params[2], params[3])
    } else {
        (params[0], params[1], 0.0, params[2])
    };
    let feasible = omega > 0.0
        && a >= 0.0
        && b >= 0.0
        && a + g >= 0.0
        && a + b + g / 2.0 < 1.0
        && (!gjr || g.is_finite());
    if !feasible {
        return None;
    }
    let n = y.len();
    let sample_var = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut sigma2 = sample_var.max(1e-12);
    let mut ll = -0.5 * (ln_2pi + sigma2.ln() + y[0] * y[0] / sigma2);
    for t in 1..n {
        let shock = y[t - 1] * y[t - 1];
        let lever = if y[t - 1] < 0.0 { g * shock } else { 0.0 };
        sigma2 = omega + a * shock + lever + b * sigma2;
        if !(sigma2 > 0.0) {
            return None;
        }
        ll -= 0.5 * (ln_2pi + sigma2.ln() + y[t] * y[t] / sigma2);
    }
    Some(ll)
}

/// GARCH(1,1) by quasi-maximum likelihood (Nelder-Mead, three starts).
pub fn fit_garch11(y: &[f64]) -> Result<BaselineFit, BaselineError> {
    fit_garch_family(y, false)
}

/// GJR-GARCH by quasi-maximum likelihood.
pub fn fit_gjr_garch(y: &[f64]) -> Result<BaselineFit, BaselineError> {
    fit_garch_family(y, true)
}

fn fit_garch_family(y: &[f64], gjr: bool) -> Result<BaselineFit, BaselineError> {
    if y.len() < 100 {
        return Err(BaselineError::Length {
            required: 100,
            got: y.len(),
        });
    }
    let sample_var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
    let starts: Vec<Vec<f64>> = if gjr {
        vec![
            vec![0.05 * sample_var, 0.03, 0.04, 0.90],
            vec![0.10 * sample_var, 0.08, 0.02, 0.80],
            vec![0.20 * sample_var, 0.02, 0.10, 0.70],
        ]
    } else {
        vec![
            vec![0.05 * sample_var, 0.05, 0.90],
            vec![0.10 * sample_var, 0.10, 0.80],
            vec![0.20 * sample_var, 0.02, 0.70],
        ]
    };

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut trace = String::new();
    for (i, start) in starts.iter().enumerate() {
        let scale: Vec<f64> = start.iter().map(|s| (s.abs() * 0.5).max(1e-4)).collect();
        let (params, nll, converged, iters) =
            nelder_mead(|p| garch_nll(p, y, gjr), start, &scale, 4000, 1e-10);
        trace.push_str(&format!(
            "start {i}: nll={nll:.6} converged={converged} iters={iters}; "
        ));
        let better = match &best {
            Some((_, best_nll, _)) => nll < *best_nll,
            None => true,
        };
        if better && nll.is_finite() {
            best = Some((params, nll, converged));
        }
    }

    let (params, nll, converged) = best.ok_or_else(|| BaselineError::Optimizer {
        trace: trace.clone(),
    })?;
    if !converged {
        return Err(BaselineError::Optimizer { trace });
    }
    let labels = if gjr {
        vec!["omega".into(), "alpha".into(), "gamma".into(), "beta".into()]
    } else {
        vec!["omega".into(), "alpha".into(), "beta".into()]
    };
    Ok(BaselineFit {
        model: if gjr {
            BaselineModel::GjrGarch
        } else {
            BaselineModel::Garch11
        },
        labels,
        params,
        criterion: FitCriterion::LogLikelihood(-nll),
        converged,
    })
}

/// One-step conditional variance path under fitted parameters.
/// Entry `t` is the variance forecast for `y[t]` given `y[..t]`.
pub fn garch_variance_series(fit: &BaselineFit, y: &[f64]) -> Vec<f64> {
    let gjr = fit.model == BaselineModel::GjrGarch;
    let omega = fit.param("omega").unwrap_or(0.0);
    let a = fit.param("alpha").unwrap_or(0.0);
    let g = if gjr { fit.param("gamma").unwrap_or(0.0) } else { 0.0 };
    let b = fit.param("beta").unwrap_or(0.0);
    let sample_var = y.iter().map(|v| v * v).sum::<f64>() / y.len().max(1) as f64;
    let mut sigma2 = sample_var.max(1e-12);
    let mut out = Vec::with_capacity(y.len());
    for t in 0..y.len() {
        if t > 0 {
            let shock = y[t - 1] * y[t - 1];
            let lever = if y[t - 1] < 0.0 { g * shock } else { 0.0 };
            sigma2 = omega + a * shock + lever + b * sigma2;
        }
        out.push(sigma2);
    }
    out
}

/// Volatility forecasts (square root of the variance path).
pub fn garch_forecast_series(fit: &BaselineFit, y: &[f64]) -> Vec<f64> {
    garch_variance_series(fit, y)
        .into_iter()
        .map(f64::sqrt)
        .collect()
}

/// Simulates a GARCH/GJR path for calibration tests.
pub fn simulate_garch(
    params: &[f64],
    gjr: bool,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let (omega, a, g, b) = if gjr {
        (params[0], params[1], params[2], params[3])
    } else {
        (params[0], params[1], 0.0, params[2])
    };
    let uncond = omega / (1.0 - a - b - g / 2.0);
    let mut sigma2 = uncond;
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0f64;
    for t in 0..n {
        if t > 0 {
            let shock = prev * prev;
            let lever = if prev < 0.0 { g * shock } else { 0.0 };
            sigma2 = omega + a * shock + lever + b * sigma2;
        }
        let z: f64 = StandardNormal.sample(rng);
        prev = sigma2.sqrt() * z;
        out.push(prev);
    }
    out
}

/// Nelder-Mead simplex minimizer with infeasible points mapped to
/// `+inf`. Returns (best point, best value, converged, iterations).
fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    scale: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64, bool, usize) {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for k in 0..dim {
        let mut v = start.to_vec();
        v[k] += scale[k];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iters = 0;
    while iters < max_iter {
        iters += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = (values[worst] - values[best]).abs();
        let scale_ref = values[best].abs().max(1.0);
        if spread <= tol * scale_ref && values[best].is_finite() {
            let point = simplex[best].clone();
            let value = values[best];
            return (point, value, true, iters);
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for (i, p) in simplex.iter().enumerate() {
            if i != worst {
                for k in 0..dim {
                    centroid[k] += p[k] / dim as f64;
                }
            }
        }

        let reflect: Vec<f64> = (0..dim)
            .map(|k| centroid[k] + alpha * (centroid[k] - simplex[worst][k]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[best] {
            let expand: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + gamma * (reflect[k] - centroid[k]))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + rho * (simplex[worst][k] - centroid[k]))
                .collect();
            let f_contract = f(&contract);
            if f_contract < values[worst] {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // shrink toward the best point
                let best_point = simplex[best].clone();
                for (i, p) in simplex.iter_mut().enumerate() {
                    if i != best {
                        for k in 0..dim {
                            p[k] = best_point[k] + sigma * (p[k] - best_point[k]);
                        }
                    }
                }
                values = simplex.iter().map(|p| f(p)).collect();
            }
        }
    }
    let mut order: Vec<usize> = (0..=dim).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    (simplex[order[0]].clone(), values[order[0]], false, iters)
}
