//! Bayesian modeling of intraday FX volatility.
//!
//! The return model is `y_t = v_t eps_t` with `eps_t ~ N(0,1)` and a
//! log-variance decomposed into four parts:
//!
//! ```text
//! log(v_t^2) = mu_h + x_t + s_t + e_t
//! ```
//!
//! * `mu_h` — overall level,
//! * `x_t`  — persistent AR(1) stochastic-volatility state,
//! * `s_t`  — time-of-day seasonal effect over 288 five-minute bins,
//!            constrained to sum to zero,
//! * `e_t`  — macroeconomic announcement effects with six five-minute
//!            lags per event, selected by a spike-and-slab prior.
//!
//! Estimation is a Gibbs sampler built on the Kim–Shephard–Chib
//! seven-component mixture and forward-filtering backward-sampling
//! ([`mcmc`]). The crate also carries the data layer ([`market`]),
//! non-Bayesian benchmark models ([`baselines`]), one-step-ahead
//! forecast evaluation ([`forecast`]) and a two-asset minimum-variance
//! backtest ([`portfolio`]).

pub mod baselines;
pub mod forecast;
mod linalg;
pub mod market;
pub mod mcmc;
pub mod model;
pub mod portfolio;

pub use market::{
    EventCalendar, EventDesignMatrix, MarketError, PriceBar, RVSeries, ReturnSeries,
};
pub use mcmc::{MixtureTable, PosteriorDraws, Schedule, Variant};
pub use model::{LatentPath, ModelError, ModelParams, PriorConfig};

pub use baselines::BaselineFit;
pub use forecast::{DmResult, ForecastSeries, HorseRaceResult};
pub use portfolio::{AllocationStep, PortfolioStats};
