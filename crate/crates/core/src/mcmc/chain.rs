//! Sweep orchestration for the Gibbs sampler.

use super::draws::{PosteriorDraws, SweepMeta};
use super::mixture::MixtureTable;
use super::steps;
use super::McmcError;
use crate::market::{seasonal_index, EventDesignMatrix, ReturnSeries, SEASONAL_BINS};
use crate::model::{ModelParams, PriorConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Which components the sampler estimates.
///
/// `Full` carries level, SV, seasonal and announcements; `Ssv` drops the
/// announcement component (`e_t = 0`); `Sv` additionally drops the
/// seasonal (`beta = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Full,
    Ssv,
    Sv,
}

impl Variant {
    pub fn has_events(self) -> bool {
        matches!(self, Variant::Full)
    }

    pub fn has_seasonal(self) -> bool {
        !matches!(self, Variant::Sv)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Ssv => "ssv",
            Variant::Sv => "sv",
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "ssv" => Ok(Variant::Ssv),
            "sv" => Ok(Variant::Sv),
            other => Err(format!("unknown variant {other:?} (full, ssv or sv)")),
        }
    }
}

/// Sweep schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            n_iter: 20_000,
            burn_in: 10_000,
            thin: 10,
            seed: 0,
        }
    }
}

impl Schedule {
    pub fn n_retained(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }
}

/// Sampler knobs beyond the schedule.
#[derive(Debug, Clone, Copy)]
pub struct ChainOptions {
    /// Keep the stationary density of `x_1` in the `sigma_x^2` update
    /// (exact full conditional); off matches the conditional-likelihood
    /// variant.
    pub include_stationary_term: bool,
    /// Retain latent-path draws alongside the parameters.
    pub store_latent: bool,
    /// Info-log cadence in sweeps (0 disables).
    pub log_every: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            include_stationary_term: true,
            store_latent: false,
            log_every: 500,
        }
    }
}

/// Mutable sampler state across sweeps.
pub struct SamplerState {
    pub params: ModelParams,
    pub x: Vec<f64>,
    pub indicators: Vec<usize>,
    rng: ChaCha8Rng,
}

/// Runs the Gibbs sampler with default options.
pub fn run_chain(
    data: &ReturnSeries,
    design: &EventDesignMatrix,
    priors: &PriorConfig,
    schedule: &Schedule,
    variant: Variant,
) -> Result<PosteriorDraws, McmcError> {
    run_chain_with(data, design, priors, schedule, variant, &ChainOptions::default())
}

/// Runs the Gibbs sampler.
///
/// Each sweep updates, in order: persistence, state variance, mixture
/// indicators plus latent path, level and seasonal, inclusion
/// probability, slab variance, and the announcement columns in a fresh
/// random permutation. `Ssv` skips the announcement steps, `Sv` also
/// fixes the seasonal at zero.
pub fn run_chain_with(
    data: &ReturnSeries,
    design: &EventDesignMatrix,
    priors: &PriorConfig,
    schedule: &Schedule,
    variant: Variant,
    options: &ChainOptions,
) -> Result<PosteriorDraws, McmcError> {
    let t_len = data.len();
    if schedule.n_iter <= schedule.burn_in {
        return Err(McmcError::Config {
            msg: format!(
                "n_iter {} must exceed burn_in {}",
                schedule.n_iter, schedule.burn_in
            ),
        });
    }
    if schedule.thin == 0 {
        return Err(McmcError::Config {
            msg: "thin must be at least 1".into(),
        });
    }
    if data.grid_step != 5 {
        return Err(McmcError::Config {
            msg: format!("estimation expects 5-minute returns, got {}-minute", data.grid_step),
        });
    }
    if design.n_rows() != t_len {
        return Err(McmcError::Config {
            msg: format!("design has {} rows but data has {t_len}", design.n_rows()),
        });
    }
    priors.validate().map_err(|e| McmcError::Config { msg: e.to_string() })?;
    if data.values.iter().any(|v| !v.is_finite()) {
        return Err(McmcError::Numeric {
            sweep: None,
            msg: "non-finite return in input".into(),
        });
    }

    let bins: Vec<usize> = data
        .timestamps
        .iter()
        .map(|&ts| seasonal_index(ts).map_err(|e| McmcError::Config { msg: e.to_string() }))
        .collect::<Result<_, _>>()?;
    if variant.has_seasonal() {
        let mut seen = vec![false; SEASONAL_BINS];
        for &b in &bins {
            seen[b] = true;
        }
        if let Some(bin) = seen.iter().position(|s| !s) {
            return Err(McmcError::Coverage { bin });
        }
    }

    let table = MixtureTable::ksc();
    let y_star = steps::linearize(&data.values);
    let n_cols = design.n_cols();

    let mut state = init_state(&y_star, priors, n_cols, schedule.seed, t_len);
    let mut event_sum = vec![0.0f64; t_len]; // e_t, kept incrementally
    let mut perm: Vec<usize> = (0..n_cols).collect();

    let mut draws = PosteriorDraws::new(variant, design.column_labels().to_vec());
    let mut retained_latent: Vec<Vec<f64>> = Vec::new();

    // scratch buffers reused across sweeps
    let mut h = vec![0.0f64; t_len];
    let mut obs = vec![0.0f64; t_len];
    let mut obs_var = vec![0.0f64; t_len];

    for sweep in 1..=schedule.n_iter {
        // 1. persistence
        state.params.phi = steps::step_phi(&state.x, state.params.sigma_x2, priors, &mut state.rng)?;

        // 2. state innovation variance
        state.params.sigma_x2 = steps::step_sigma_x2(
            &state.x,
            state.params.phi,
            priors,
            options.include_stationary_term,
            &mut state.rng,
        );

        // 3. mixture indicators, then the latent path
        for t in 0..t_len {
            h[t] = state.params.mu_h + state.x[t] + state.params.beta[bins[t]] + event_sum[t];
        }
        state.indicators = steps::step_mixture_indicators(&y_star, &h, &table, &mut state.rng);
        let comps = table.components();
        for t in 0..t_len {
            let c = &comps[state.indicators[t]];
            obs[t] = y_star[t]
                - state.params.mu_h
                - state.params.beta[bins[t]]
                - event_sum[t]
                - c.mean;
            obs_var[t] = c.variance;
        }
        state.x = super::ffbs::step_latent_x(
            &obs,
            &obs_var,
            state.params.phi,
            state.params.sigma_x2,
            &mut state.rng,
        )
        .map_err(|e| numeric_at(e, sweep))?;

        // 4. level and seasonal
        for t in 0..t_len {
            let c = &comps[state.indicators[t]];
            obs[t] = y_star[t] - state.x[t] - event_sum[t] - c.mean;
        }
        if variant.has_seasonal() {
            let (mu_h, beta) =
                steps::step_mu_beta(&obs, &obs_var, &bins, priors, &mut state.rng)?;
            state.params.mu_h = mu_h;
            state.params.beta = beta;
        } else {
            state.params.mu_h = steps::step_mu_only(&obs, &obs_var, priors, &mut state.rng);
        }

        if variant.has_events() && n_cols > 0 {
            // 5. inclusion probability
            state.params.gamma = steps::step_gamma(&state.params.pi, priors, &mut state.rng);

            // 6. slab variance
            state.params.sigma_alpha2 =
                steps::step_sigma_alpha2(&state.params.alpha, &state.params.pi, priors, &mut state.rng);

            // 7. announcement columns, random order each sweep
            perm.shuffle(&mut state.rng);
            let mut col_resid: Vec<f64> = Vec::new();
            let mut col_var: Vec<f64> = Vec::new();
            for &j in &perm {
                let rows = design.rows_of_col(j);
                col_resid.clear();
                col_var.clear();
                let alpha_old = state.params.alpha[j];
                for &row in rows {
                    let t = row as usize;
                    let c = &comps[state.indicators[t]];
                    // net of everything except column j's own contribution
                    col_resid.push(
                        y_star[t]
                            - state.params.mu_h
                            - state.x[t]
                            - state.params.beta[bins[t]]
                            - (event_sum[t] - alpha_old)
                            - c.mean,
                    );
                    col_var.push(c.variance);
                }
                let cond = steps::alpha_full_conditional(
                    &col_resid,
                    &col_var,
                    state.params.sigma_alpha2,
                );
                let (alpha_new, pi_new) = steps::step_alpha_pi(
                    &cond,
                    state.params.gamma,
                    state.params.sigma_alpha2,
                    &mut state.rng,
                )
                .map_err(|e| numeric_at(e, sweep))?;
                if alpha_new != alpha_old {
                    for &row in rows {
                        event_sum[row as usize] += alpha_new - alpha_old;
                    }
                }
                state.params.alpha[j] = alpha_new;
                state.params.pi[j] = pi_new;
            }
        }

        check_finite(&state.params, sweep)?;

        if options.log_every > 0 && sweep % options.log_every == 0 {
            log::info!(
                "sweep {sweep}: mu_h={:.4} phi={:.4} sigma_x2={:.5} active={}",
                state.params.mu_h,
                state.params.phi,
                state.params.sigma_x2,
                state.params.pi.iter().filter(|&&p| p == 1).count()
            );
        }

        if sweep > schedule.burn_in && (sweep - schedule.burn_in) % schedule.thin == 0 {
            let ll = gaussian_log_likelihood(&data.values, &state.params, &state.x, &bins, &event_sum);
            draws.push(state.params.clone(), SweepMeta {
                iteration: sweep,
                log_likelihood: ll,
            });
            if options.store_latent {
                retained_latent.push(state.x.clone());
            }
        }
    }

    if options.store_latent {
        draws.latent = Some(retained_latent);
    }
    Ok(draws)
}

fn init_state(
    y_star: &[f64],
    priors: &PriorConfig,
    n_cols: usize,
    seed: u64,
    t_len: usize,
) -> SamplerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::with_event_columns(n_cols);
    let y_mean = y_star.iter().sum::<f64>() / t_len.max(1) as f64;
    params.mu_h = y_mean - super::mixture::LOG_CHI2_MEAN;
    params.phi = priors.phi_mean.clamp(-0.999, 0.999);
    params.sigma_x2 = if priors.ig_x_shape > 1.0 {
        priors.ig_x_scale / (priors.ig_x_shape - 1.0)
    } else {
        0.02
    };
    params.gamma = priors.gamma_a / (priors.gamma_a + priors.gamma_b);
    params.sigma_alpha2 = if priors.ig_a_shape > 1.0 {
        priors.ig_a_scale / (priors.ig_a_shape - 1.0)
    } else {
        1.0
    };

    // start the path on a prior draw so the variance updates see a
    // non-degenerate regression from the first sweep
    let sigma_x = params.sigma_x2.sqrt();
    let stationary_sd = (params.sigma_x2 / (1.0 - params.phi * params.phi)).sqrt();
    let mut x = Vec::with_capacity(t_len);
    let mut state = stationary_sd * rng.sample::<f64, _>(StandardNormal);
    for t in 0..t_len {
        if t > 0 {
            let eta: f64 = StandardNormal.sample(&mut rng);
            state = params.phi * state + sigma_x * eta;
        }
        x.push(state);
    }

    SamplerState {
        params,
        x,
        indicators: vec![0; t_len],
        rng,
    }
}

fn numeric_at(e: McmcError, sweep: usize) -> McmcError {
    match e {
        McmcError::Numeric { msg, .. } => McmcError::Numeric {
            sweep: Some(sweep),
            msg,
        },
        other => other,
    }
}

fn check_finite(params: &ModelParams, sweep: usize) -> Result<(), McmcError> {
    let scalars = [
        params.mu_h,
        params.phi,
        params.sigma_x2,
        params.gamma,
        params.sigma_alpha2,
    ];
    if scalars.iter().any(|v| !v.is_finite()) {
        return Err(McmcError::Numeric {
            sweep: Some(sweep),
            msg: format!(
                "non-finite scalar state (mu_h={}, phi={}, sigma_x2={})",
                params.mu_h, params.phi, params.sigma_x2
            ),
        });
    }
    Ok(())
}

/// Exact Gaussian log density of the returns given the current
/// log-variance path (sweep diagnostic).
fn gaussian_log_likelihood(
    y: &[f64],
    params: &ModelParams,
    x: &[f64],
    bins: &[usize],
    event_sum: &[f64],
) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    y.iter()
        .enumerate()
        .map(|(t, &yt)| {
            let h = params.mu_h + x[t] + params.beta[bins[t]] + event_sum[t];
            -0.5 * (ln_2pi + h + yt * yt * (-h).exp())
        })
        .sum()
}
