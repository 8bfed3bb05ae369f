//! Gibbs sampler for the decomposed log-variance model.
//!
//! Squaring and logging the return equation gives
//! `ln(y_t^2) = h_t + ln(eps_t^2)`, a linear state-space model with
//! log-chi-squared noise. The noise is replaced by the seven-component
//! Gaussian mixture of Kim, Shephard and Chib (1998), turning every
//! update into a conjugate draw:
//!
//! 1. `phi`            — Gaussian, truncated to (-1, 1) by rejection
//! 2. `sigma_x^2`      — inverse gamma
//! 3. `x_{1..T}`       — mixture indicators, then forward filtering
//!                       backward sampling
//! 4. `(mu_h, beta)`   — unconstrained bin coefficients; their mean
//!                       becomes the level, the demeaned rest the
//!                       seasonal (so the zero-sum holds by construction)
//! 5. `gamma`          — beta
//! 6. `sigma_alpha^2`  — inverse gamma over the active coefficients
//! 7. `(alpha_j, pi_j)` per column — spike-and-slab draw that integrates
//!                       the coefficient out of the inclusion odds

mod chain;
mod draws;
mod ffbs;
mod mixture;
mod steps;

pub use chain::{run_chain, run_chain_with, ChainOptions, SamplerState, Schedule, Variant};
pub use draws::{
    quantile, read_draws_csv, write_draws_csv, InclusionSummary, PosteriorDraws, PosteriorMean,
    SweepMeta,
};
pub use ffbs::step_latent_x;
pub use mixture::{MixtureComponent, MixtureTable, LOG_CHI2_MEAN};
pub use steps::{
    alpha_full_conditional, inclusion_probability, linearize, mixture_posterior,
    mu_beta_full_conditionals, phi_full_conditional, sigma_alpha2_full_conditional,
    sigma_x2_full_conditional, step_alpha_pi, step_gamma, step_mixture_indicators, step_mu_beta,
    step_phi, step_sigma_alpha2, step_sigma_x2, GaussianPosterior, InvGammaPosterior,
    LINEARIZATION_OFFSET,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum McmcError {
    #[error("invalid sampler configuration: {msg}")]
    Config { msg: String },
    #[error("numeric failure{}: {msg}", sweep.map(|s| format!(" at sweep {s}")).unwrap_or_default())]
    Numeric { sweep: Option<usize>, msg: String },
    #[error("seasonal bin {bin} has no observations")]
    Coverage { bin: usize },
    #[error("persistence draw rejected {tries} times; posterior mass sits outside (-1, 1)")]
    Divergence { tries: usize },
}
