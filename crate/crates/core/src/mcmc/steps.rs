//! Conjugate full conditionals of the Gibbs sweep.
//!
//! Every step exposes its posterior parameters alongside the sampling
//! function so the densities can be checked against quadrature oracles.

use super::mixture::MixtureTable;
use super::McmcError;
use crate::market::SEASONAL_BINS;
use crate::model::PriorConfig;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

/// Offset keeping `ln(y^2 + c)` finite on exact-zero returns
/// (percent-squared scale).
pub const LINEARIZATION_OFFSET: f64 = 1e-8;

/// `y*_t = ln(y_t^2 + c)`.
pub fn linearize(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|y| (y * y + LINEARIZATION_OFFSET).ln())
        .collect()
}

/// Gaussian full conditional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPosterior {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianPosterior {
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + self.variance.max(0.0).sqrt() * z
    }
}

/// Inverse-gamma full conditional (shape / scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGammaPosterior {
    pub shape: f64,
    pub scale: f64,
}

impl InvGammaPosterior {
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        // 1 / Gamma(shape, rate = scale) == scale / Gamma(shape, 1)
        let g = Gamma::new(self.shape, 1.0)
            .expect("positive shape")
            .sample(rng);
        self.scale / g.max(1e-300)
    }
}

/// Posterior probabilities of the seven mixture components for one
/// linearized residual `y*_t - h_t`.
pub fn mixture_posterior(residual: f64, table: &MixtureTable) -> [f64; 7] {
    let comps = table.components();
    let mut logw = [0.0f64; 7];
    for (j, c) in comps.iter().enumerate() {
        let d = residual - c.mean;
        logw[j] = if c.weight > 0.0 {
            c.weight.ln() - 0.5 * c.variance.ln() - d * d / (2.0 * c.variance)
        } else {
            f64::NEG_INFINITY
        };
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs = [0.0f64; 7];
    let mut total = 0.0;
    for j in 0..7 {
        probs[j] = (logw[j] - max).exp();
        total += probs[j];
    }
    for p in &mut probs {
        *p /= total;
    }
    probs
}

/// Draws mixture indicators `s_t` given the current log-variance path.
pub fn step_mixture_indicators(
    y_star: &[f64],
    h: &[f64],
    table: &MixtureTable,
    rng: &mut impl Rng,
) -> Vec<usize> {
    y_star
        .iter()
        .zip(h)
        .map(|(ys, ht)| {
            let probs = mixture_posterior(ys - ht, table);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (j, p) in probs.iter().enumerate() {
                acc += p;
                if u <= acc {
                    return j;
                }
            }
            6
        })
        .collect()
}

/// Full conditional of `phi` from the AR(1) regression of `x_t` on
/// `x_{t-1}` (conditional likelihood, `t = 2..T`).
pub fn phi_full_conditional(x: &[f64], sigma_x2: f64, prior: &PriorConfig) -> GaussianPosterior {
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for w in x.windows(2) {
        sxx += w[0] * w[0];
        sxy += w[0] * w[1];
    }
    let precision = 1.0 / prior.phi_var + sxx / sigma_x2;
    let variance = 1.0 / precision;
    let mean = variance * (prior.phi_mean / prior.phi_var + sxy / sigma_x2);
    GaussianPosterior { mean, variance }
}

const PHI_MAX_REJECTIONS: usize = 10_000;

/// Draws `phi`, rejecting outside the stationary region (-1, 1).
pub fn step_phi(
    x: &[f64],
    sigma_x2: f64,
    prior: &PriorConfig,
    rng: &mut impl Rng,
) -> Result<f64, McmcError> {
    let posterior = phi_full_conditional(x, sigma_x2, prior);
    for _ in 0..PHI_MAX_REJECTIONS {
        let draw = posterior.draw(rng);
        if draw.abs() < 1.0 {
            return Ok(draw);
        }
    }
    Err(McmcError::Divergence {
        tries: PHI_MAX_REJECTIONS,
    })
}

/// Full conditional of `sigma_x^2`. With `include_stationary` the
/// density of `x_1` under the stationary law contributes `1/2` to the
/// shape and `(1 - phi^2) x_1^2 / 2` to the scale; without it the update
/// uses the conditional likelihood of `x_2..x_T` only.
pub fn sigma_x2_full_conditional(
    x: &[f64],
    phi: f64,
    prior: &PriorConfig,
    include_stationary: bool,
) -> InvGammaPosterior {
    let t_len = x.len();
    let mut ssr = 0.0;
    for w in x.windows(2) {
        let resid = w[1] - phi * w[0];
        ssr += resid * resid;
    }
    let mut shape = prior.ig_x_shape + (t_len.saturating_sub(1)) as f64 / 2.0;
    let mut scale = prior.ig_x_scale + 0.5 * ssr;
    if include_stationary && t_len > 0 {
        shape += 0.5;
        scale += 0.5 * (1.0 - phi * phi) * x[0] * x[0];
    }
    InvGammaPosterior { shape, scale }
}

pub fn step_sigma_x2(
    x: &[f64],
    phi: f64,
    prior: &PriorConfig,
    include_stationary: bool,
    rng: &mut impl Rng,
) -> f64 {
    sigma_x2_full_conditional(x, phi, prior, include_stationary).draw(rng)
}

/// Per-bin full conditionals of the unconstrained bin coefficients
/// `c_k = mu_h + beta_k`.
///
/// `resid` must be net of the latent state, announcement terms and
/// mixture means; `obs_var` holds mixture variances. Bins partition the
/// sample, so the joint conditional factorizes across bins.
pub fn mu_beta_full_conditionals(
    resid: &[f64],
    obs_var: &[f64],
    bins: &[usize],
    n_bins: usize,
    prior: &PriorConfig,
) -> Result<Vec<GaussianPosterior>, McmcError> {
    let mut precision = vec![1.0 / prior.coef_var; n_bins];
    let mut weighted = vec![0.0f64; n_bins];
    let mut seen = vec![false; n_bins];
    for ((r, v), &bin) in resid.iter().zip(obs_var).zip(bins) {
        precision[bin] += 1.0 / v;
        weighted[bin] += r / v;
        seen[bin] = true;
    }
    if let Some(bin) = seen.iter().position(|s| !s) {
        return Err(McmcError::Coverage { bin });
    }
    Ok((0..n_bins)
        .map(|k| {
            let variance = 1.0 / precision[k];
            GaussianPosterior {
                mean: variance * weighted[k],
                variance,
            }
        })
        .collect())
}

/// Draws the level and the zero-sum seasonal vector.
///
/// The 288 bin coefficients are sampled without the zero-sum
/// restriction; their mean becomes `mu_h` and the demeaned remainder
/// the seasonal, so the constraint holds by construction.
pub fn step_mu_beta(
    resid: &[f64],
    obs_var: &[f64],
    bins: &[usize],
    prior: &PriorConfig,
    rng: &mut impl Rng,
) -> Result<(f64, Vec<f64>), McmcError> {
    let posteriors = mu_beta_full_conditionals(resid, obs_var, bins, SEASONAL_BINS, prior)?;
    let coeffs: Vec<f64> = posteriors.iter().map(|p| p.draw(rng)).collect();
    let mu_h = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
    let beta: Vec<f64> = coeffs.iter().map(|c| c - mu_h).collect();
    Ok((mu_h, beta))
}

/// Pooled-intercept variant used when the seasonal component is off:
/// one coefficient over all observations, `beta = 0`.
pub fn step_mu_only(
    resid: &[f64],
    obs_var: &[f64],
    prior: &PriorConfig,
    rng: &mut impl Rng,
) -> f64 {
    let mut precision = 1.0 / prior.coef_var;
    let mut weighted = 0.0;
    for (r, v) in resid.iter().zip(obs_var) {
        precision += 1.0 / v;
        weighted += r / v;
    }
    let variance = 1.0 / precision;
    GaussianPosterior {
        mean: variance * weighted,
        variance,
    }
    .draw(rng)
}

/// Beta draw for the inclusion probability:
/// `Beta(a + sum(pi), b + M - sum(pi))`.
pub fn step_gamma(pi: &[u8], prior: &PriorConfig, rng: &mut impl Rng) -> f64 {
    let active: usize = pi.iter().map(|&p| p as usize).sum();
    let a = prior.gamma_a + active as f64;
    let b = prior.gamma_b + (pi.len() - active) as f64;
    Beta::new(a, b).expect("positive beta parameters").sample(rng)
}

/// `IG(shape + k/2, scale + sum(alpha^2)/2)` over the `k` active
/// coefficients; with none active this is the prior.
pub fn sigma_alpha2_full_conditional(
    alpha: &[f64],
    pi: &[u8],
    prior: &PriorConfig,
) -> InvGammaPosterior {
    let mut k = 0usize;
    let mut ss = 0.0;
    for (a, &p) in alpha.iter().zip(pi) {
        if p == 1 {
            k += 1;
            ss += a * a;
        }
    }
    InvGammaPosterior {
        shape: prior.ig_a_shape + k as f64 / 2.0,
        scale: prior.ig_a_scale + 0.5 * ss,
    }
}

pub fn step_sigma_alpha2(
    alpha: &[f64],
    pi: &[u8],
    prior: &PriorConfig,
    rng: &mut impl Rng,
) -> f64 {
    sigma_alpha2_full_conditional(alpha, pi, prior).draw(rng)
}

/// Full conditional of one announcement coefficient given the residuals
/// at its active rows (already net of every other component).
pub fn alpha_full_conditional(
    col_resid: &[f64],
    col_obs_var: &[f64],
    sigma_alpha2: f64,
) -> GaussianPosterior {
    let mut precision = 1.0 / sigma_alpha2;
    let mut weighted = 0.0;
    for (r, v) in col_resid.iter().zip(col_obs_var) {
        precision += 1.0 / v;
        weighted += r / v;
    }
    let variance = 1.0 / precision;
    GaussianPosterior {
        mean: variance * weighted,
        variance,
    }
}

/// Inclusion probability of the spike-and-slab draw.
///
/// With the coefficient integrated out, the odds of inclusion against
/// exclusion are `gamma N(0; 0, sigma_alpha^2) / N(0; m, v)` to
/// `1 - gamma`, where `(m, v)` is the coefficient's full conditional.
/// Computed in log space; a column with no observations reduces to
/// `gamma` exactly.
pub fn inclusion_probability(
    conditional: &GaussianPosterior,
    gamma: f64,
    sigma_alpha2: f64,
) -> Result<f64, McmcError> {
    let (m, v) = (conditional.mean, conditional.variance);
    if !(v > 0.0) {
        return Err(McmcError::Numeric {
            sweep: None,
            msg: format!("non-positive conditional variance {v}"),
        });
    }
    if gamma <= 0.0 {
        return Ok(0.0);
    }
    if gamma >= 1.0 {
        return Ok(1.0);
    }
    // ln[gamma phi(0;0,s2) / phi(0;m,v)] - ln(1 - gamma)
    let log_odds =
        gamma.ln() + 0.5 * (v.ln() - sigma_alpha2.ln()) + m * m / (2.0 * v) - (1.0 - gamma).ln();
    Ok(1.0 / (1.0 + (-log_odds).exp()))
}

/// Joint draw of `(alpha_j, pi_j)` for one column.
pub fn step_alpha_pi(
    conditional: &GaussianPosterior,
    gamma: f64,
    sigma_alpha2: f64,
    rng: &mut impl Rng,
) -> Result<(f64, u8), McmcError> {
    let p = inclusion_probability(conditional, gamma, sigma_alpha2)?;
    let include = rng.gen::<f64>() < p;
    if include {
        Ok((conditional.draw(rng), 1))
    } else {
        Ok((0.0, 0))
    }
}
