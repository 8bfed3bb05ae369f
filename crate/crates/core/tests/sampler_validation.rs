//! Distributional validation of the sampler against independent oracles:
//! quadrature of each full conditional, the exact joint Gaussian
//! smoother for the latent path, and recovery/coverage studies.

use fxvol_core::market::EventDesignMatrix;
use fxvol_core::mcmc::{
    self, alpha_full_conditional, mu_beta_full_conditionals, phi_full_conditional, quantile,
    sigma_alpha2_full_conditional, sigma_x2_full_conditional, step_latent_x, Schedule, Variant,
};
use fxvol_core::model::{simulate, ModelParams, PriorConfig};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

const DENSITY_TOL: f64 = 1e-6;
const GRID_POINTS: usize = 2001;

/// Composite Simpson integration over uniformly spaced samples
/// (GRID_POINTS is odd, so the interval count is even).
fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1);
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

/// Normalizes log-density evaluations over the grid into a density.
fn normalize_log_density(log_values: &[f64], step: f64) -> Vec<f64> {
    let max = log_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = log_values.iter().map(|l| (l - max).exp()).collect();
    let mass = simpson(&unnorm, step);
    unnorm.into_iter().map(|v| v / mass).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn normal_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mean) * (x - mean) / var)
}

fn inv_gamma_log_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
}

fn ar1_path(t_len: usize, phi: f64, sigma_x2: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(t_len);
    let mut state = (sigma_x2 / (1.0 - phi * phi)).sqrt() * rng.sample::<f64, _>(StandardNormal);
    for t in 0..t_len {
        if t > 0 {
            state = phi * state + sigma_x2.sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        x.push(state);
    }
    x
}

#[test]
fn phi_posterior_matches_grid_quadrature() {
    let x = ar1_path(50, 0.6, 0.8, 1);
    let sigma_x2 = 0.8;
    let prior = PriorConfig::default();
    let posterior = phi_full_conditional(&x, sigma_x2, &prior);

    // oracle: prior x conditional likelihood on a grid over (-1, 1)
    let step = 2.0 / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| -1.0 + i as f64 * step).collect();
    let log_density: Vec<f64> = grid
        .iter()
        .map(|&phi| {
            let mut ll = normal_log_pdf(phi, prior.phi_mean, prior.phi_var);
            for w in x.windows(2) {
                ll += normal_log_pdf(w[1], phi * w[0], sigma_x2);
            }
            ll
        })
        .collect();
    let oracle = normalize_log_density(&log_density, step);

    // implementation: Gaussian(mean, var) truncated to (-1, 1)
    let trunc_values: Vec<f64> = grid
        .iter()
        .map(|&phi| normal_log_pdf(phi, posterior.mean, posterior.variance))
        .collect();
    let implementation = normalize_log_density(&trunc_values, step);

    let err = max_abs_diff(&oracle, &implementation);
    println!("phi density max abs error: {err:.2e}");
    assert!(err < DENSITY_TOL, "max density error {err}");
}

fn check_inv_gamma_against_grid(
    posterior: mcmc::InvGammaPosterior,
    log_like: impl Fn(f64) -> f64,
    label: &str,
) {
    // grid spanning the posterior mass; both densities are normalized on
    // the same window so the comparison pins the shape/scale exactly
    let mode = posterior.scale / (posterior.shape + 1.0);
    let lo = mode / 20.0;
    let hi = mode * 40.0;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();

    let log_density: Vec<f64> = grid.iter().map(|&v| log_like(v)).collect();
    let oracle = normalize_log_density(&log_density, step);
    let analytic_log: Vec<f64> = grid
        .iter()
        .map(|&v| inv_gamma_log_pdf(v, posterior.shape, posterior.scale))
        .collect();
    let analytic = normalize_log_density(&analytic_log, step);

    let err = max_abs_diff(&oracle, &analytic);
    // densities here can reach O(100); compare on a unit-height scale
    let peak = analytic.iter().cloned().fold(0.0, f64::max);
    println!("{label} density max abs error: {err:.2e} (peak {peak:.1})");
    assert!(
        err / peak.max(1.0) < DENSITY_TOL,
        "{label}: max density error {err} at peak {peak}"
    );
}

#[test]
fn sigma_x2_posterior_matches_grid_quadrature() {
    let x = ar1_path(50, 0.6, 0.05, 2);
    let phi = 0.6;
    let prior = PriorConfig::default();

    for include_stationary in [false, true] {
        let posterior = sigma_x2_full_conditional(&x, phi, &prior, include_stationary);
        let x_cl = x.clone();
        check_inv_gamma_against_grid(
            posterior,
            move |v| {
                let mut ll = inv_gamma_log_pdf(v, prior.ig_x_shape, prior.ig_x_scale);
                if include_stationary {
                    ll += normal_log_pdf(x_cl[0], 0.0, v / (1.0 - phi * phi));
                }
                for w in x_cl.windows(2) {
                    ll += normal_log_pdf(w[1], phi * w[0], v);
                }
                ll
            },
            if include_stationary {
                "sigma_x2 (stationary term)"
            } else {
                "sigma_x2 (conditional)"
            },
        );
    }
}

#[test]
fn sigma_alpha2_posterior_matches_grid_quadrature() {
    let alpha = vec![1.5, -0.7, 2.2, 0.0, 0.0];
    let pi = vec![1u8, 1, 1, 0, 0];
    let prior = PriorConfig::default();
    let posterior = sigma_alpha2_full_conditional(&alpha, &pi, &prior);
    check_inv_gamma_against_grid(
        posterior,
        move |v| {
            let mut ll = inv_gamma_log_pdf(v, prior.ig_a_shape, prior.ig_a_scale);
            for (a, &p) in alpha.iter().zip(&pi) {
                if p == 1 {
                    ll += normal_log_pdf(*a, 0.0, v);
                }
            }
            ll
        },
        "sigma_alpha2",
    );
}

#[test]
fn gamma_posterior_matches_grid_quadrature() {
    let pi = vec![1u8, 0, 1, 0, 0]; // M = 5, two active
    let prior = PriorConfig::default();
    let (a, b) = (prior.gamma_a, prior.gamma_b);
    let (s, m) = (2.0, 5.0);

    // avoid the open endpoints
    let lo = 1e-9;
    let hi = 1.0 - 1e-9;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();

    let log_density: Vec<f64> = grid
        .iter()
        .map(|&g| {
            // Beta prior x Bernoulli likelihood
            (a - 1.0) * g.ln()
                + (b - 1.0) * (1.0 - g).ln()
                + s * g.ln()
                + (m - s) * (1.0 - g).ln()
        })
        .collect();
    let oracle = normalize_log_density(&log_density, step);

    // conjugate: Beta(a + s, b + M - s)
    let (pa, pb) = (a + s, b + m - s);
    let ln_beta = ln_gamma(pa) + ln_gamma(pb) - ln_gamma(pa + pb);
    let analytic: Vec<f64> = grid
        .iter()
        .map(|&g| ((pa - 1.0) * g.ln() + (pb - 1.0) * (1.0 - g).ln() - ln_beta).exp())
        .collect();

    let err = max_abs_diff(&oracle, &analytic);
    let peak = analytic.iter().cloned().fold(0.0, f64::max);
    println!("gamma density max abs error: {err:.2e} (peak {peak:.1})");
    assert!(err / peak.max(1.0) < DENSITY_TOL);

    // the sampler draws from exactly this conjugate form
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60_000;
    let mean: f64 = (0..n)
        .map(|_| mcmc::step_gamma(&pi, &prior, &mut rng))
        .sum::<f64>()
        / n as f64;
    let expect = pa / (pa + pb);
    let sd = (expect * (1.0 - expect) / (pa + pb + 1.0)).sqrt();
    assert!((mean - expect).abs() < 4.0 * sd / (n as f64).sqrt());
}

#[test]
fn mu_beta_conditionals_match_grid_quadrature() {
    // three-bin toy problem
    let resid = vec![-5.8, -6.3, -6.1, -5.6, -6.4, -5.9, -6.05];
    let obs_var = vec![2.6, 1.2, 0.7, 5.1, 0.3, 1.4, 2.0];
    let bins = vec![0usize, 1, 2, 0, 1, 2, 0];
    let prior = PriorConfig::default();
    let posts = mu_beta_full_conditionals(&resid, &obs_var, &bins, 3, &prior).unwrap();

    for (bin, post) in posts.iter().enumerate() {
        let sd = post.variance.sqrt();
        let lo = post.mean - 9.0 * sd;
        let step = 18.0 * sd / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
        let log_density: Vec<f64> = grid
            .iter()
            .map(|&c| {
                let mut ll = normal_log_pdf(c, 0.0, prior.coef_var);
                for ((r, v), &b) in resid.iter().zip(&obs_var).zip(&bins) {
                    if b == bin {
                        ll += normal_log_pdf(*r, c, *v);
                    }
                }
                ll
            })
            .collect();
        let oracle = normalize_log_density(&log_density, step);
        let analytic: Vec<f64> = grid
            .iter()
            .map(|&c| normal_log_pdf(c, post.mean, post.variance).exp())
            .collect();
        let err = max_abs_diff(&oracle, &analytic);
        let peak = analytic.iter().cloned().fold(0.0, f64::max);
        println!("bin {bin} density max abs error: {err:.2e}");
        assert!(err / peak.max(1.0) < DENSITY_TOL);
    }
}

#[test]
fn alpha_conditional_matches_grid_quadrature() {
    let resid = vec![2.2, 1.7, 2.6, 1.9, 2.4, 2.0, 2.3, 1.8];
    let obs_var = vec![0.7, 1.3, 0.5, 2.2, 0.9, 1.1, 0.6, 1.8];
    let sigma_alpha2 = 2.0;
    let post = alpha_full_conditional(&resid, &obs_var, sigma_alpha2);

    let sd = post.variance.sqrt();
    let lo = post.mean - 9.0 * sd;
    let step = 18.0 * sd / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
    let log_density: Vec<f64> = grid
        .iter()
        .map(|&a| {
            let mut ll = normal_log_pdf(a, 0.0, sigma_alpha2);
            for (r, v) in resid.iter().zip(&obs_var) {
                ll += normal_log_pdf(*r, a, *v);
            }
            ll
        })
        .collect();
    let oracle = normalize_log_density(&log_density, step);
    let analytic: Vec<f64> = grid
        .iter()
        .map(|&a| normal_log_pdf(a, post.mean, post.variance).exp())
        .collect();
    let err = max_abs_diff(&oracle, &analytic);
    let peak = analytic.iter().cloned().fold(0.0, f64::max);
    println!("alpha density max abs error: {err:.2e}");
    assert!(err / peak.max(1.0) < DENSITY_TOL);
}

#[test]
fn ffbs_moments_match_exact_smoother() {
    // T = 5 with heterogeneous observation variances
    let obs = vec![0.8, -0.4, 1.2, 0.1, -0.9];
    let obs_var = vec![0.5, 1.0, 2.0, 0.3, 1.5];
    let (phi, sigma_x2): (f64, f64) = (0.8, 0.4);
    let t_len = obs.len();

    // exact joint posterior: prior x ~ N(0, Q), y = x + e
    let stationary = sigma_x2 / (1.0 - phi * phi);
    let prior_cov = DMatrix::from_fn(t_len, t_len, |i, j| {
        stationary * phi.powi((i as i32 - j as i32).abs())
    });
    let v_inv = DMatrix::from_fn(t_len, t_len, |i, j| {
        if i == j {
            1.0 / obs_var[i]
        } else {
            0.0
        }
    });
    let precision = prior_cov.clone().try_inverse().unwrap() + v_inv.clone();
    let post_cov = precision.try_inverse().unwrap();
    let post_mean = &post_cov * (&v_inv * DVector::from_vec(obs.clone()));

    let n_draws = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sums = vec![0.0; t_len];
    let mut cross = vec![0.0; t_len * t_len];
    for _ in 0..n_draws {
        let x = step_latent_x(&obs, &obs_var, phi, sigma_x2, &mut rng).unwrap();
        for i in 0..t_len {
            sums[i] += x[i];
            for j in 0..t_len {
                cross[i * t_len + j] += x[i] * x[j];
            }
        }
    }
    let n = n_draws as f64;
    for i in 0..t_len {
        let mean_emp = sums[i] / n;
        let se = (post_cov[(i, i)] / n).sqrt();
        assert!(
            (mean_emp - post_mean[i]).abs() < 3.0 * se,
            "mean[{i}]: {mean_emp} vs {} (se {se})",
            post_mean[i]
        );
    }
    for i in 0..t_len {
        for j in 0..t_len {
            let mean_i = sums[i] / n;
            let mean_j = sums[j] / n;
            let cov_emp = cross[i * t_len + j] / n - mean_i * mean_j;
            let exact = post_cov[(i, j)];
            // var of a sample covariance of a bivariate Gaussian
            let se = ((post_cov[(i, i)] * post_cov[(j, j)] + exact * exact) / n).sqrt();
            assert!(
                (cov_emp - exact).abs() < 3.0 * se,
                "cov[{i},{j}]: {cov_emp} vs {exact} (se {se})"
            );
        }
    }
}

#[test]
fn never_active_column_inclusion_tracks_gamma() {
    // column 2 never appears in the design; its long-run inclusion
    // frequency must match the long-run mean of gamma
    let t_len = 288 * 2;
    let labels: Vec<fxvol_core::market::ColumnLabel> = (0..3)
        .map(|i| fxvol_core::market::ColumnLabel {
            event_id: format!("E{i}"),
            lag: 1,
        })
        .collect();
    let entries: Vec<(u32, u32)> = (0..t_len as u32)
        .step_by(24)
        .flat_map(|r| [(r, 0u32), ((r + 7).min(t_len as u32 - 1), 1u32)])
        .collect();
    let design = EventDesignMatrix::new(t_len, labels, entries).unwrap();

    let mut truth = ModelParams::with_event_columns(3);
    truth.mu_h = -6.0;
    truth.phi = 0.9;
    truth.sigma_x2 = 0.02;
    truth.alpha[0] = 2.0;
    truth.pi[0] = 1;
    let (series, _) = simulate(&truth, &design, t_len, 7).unwrap();

    let schedule = Schedule {
        n_iter: 3_000,
        burn_in: 500,
        thin: 1,
        seed: 11,
    };
    let draws = mcmc::run_chain(
        &series,
        &design,
        &PriorConfig::default(),
        &schedule,
        Variant::Full,
    )
    .unwrap();

    let freq = draws
        .params
        .iter()
        .map(|p| p.pi[2] as f64)
        .sum::<f64>()
        / draws.len() as f64;
    let gamma_mean = draws.params.iter().map(|p| p.gamma).sum::<f64>() / draws.len() as f64;
    println!("never-active inclusion {freq:.4} vs mean gamma {gamma_mean:.4}");
    assert!(
        (freq - gamma_mean).abs() < 0.02,
        "inclusion {freq} vs gamma {gamma_mean}"
    );
}

#[test]
fn sv_variant_coverage_study() {
    // 20 replications; each parameter must fall inside its 90% interval
    // in at least 16
    let mut truth = ModelParams::with_event_columns(0);
    truth.mu_h = -6.0;
    truth.phi = 0.95;
    truth.sigma_x2 = 0.04;

    let t_len = 3_000;
    let design = EventDesignMatrix::empty(t_len);
    let schedule_base = Schedule {
        n_iter: 2_000,
        burn_in: 500,
        thin: 1,
        seed: 0,
    };

    let mut hits = [0usize; 3];
    let reps = 20;
    for rep in 0..reps {
        let (series, _) = simulate(&truth, &design, t_len, 100 + rep).unwrap();
        let schedule = Schedule {
            seed: 500 + rep,
            ..schedule_base
        };
        let draws = mcmc::run_chain(
            &series,
            &design,
            &PriorConfig::default(),
            &schedule,
            Variant::Sv,
        )
        .unwrap();
        let checks = [
            (draws.scalar_draws(|p| p.mu_h), truth.mu_h),
            (draws.scalar_draws(|p| p.phi), truth.phi),
            (
                draws.scalar_draws(|p| p.sigma_x2.sqrt()),
                truth.sigma_x2.sqrt(),
            ),
        ];
        for (k, (values, target)) in checks.iter().enumerate() {
            let lo = quantile(values, 0.05);
            let hi = quantile(values, 0.95);
            if (lo..=hi).contains(target) {
                hits[k] += 1;
            }
        }
    }
    println!("coverage over {reps} replications: mu_h {} phi {} sigma_x {}", hits[0], hits[1], hits[2]);
    for (k, name) in ["mu_h", "phi", "sigma_x"].iter().enumerate() {
        assert!(
            hits[k] >= 16,
            "{name} covered in only {}/{reps} replications",
            hits[k]
        );
    }
}
