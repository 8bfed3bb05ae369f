//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantities. Run with
//! `cargo test -p fxvol-cli --test acceptance -- --nocapture`.

use fxvol_core::baselines::{fit_ar1_rv, fit_garch11, fit_gjr_garch, fit_har, simulate_garch};
use fxvol_core::forecast::{diebold_mariano, horse_race};
use fxvol_core::market::{align_events, CalendarEntry, EventCalendar, EventDesignMatrix};
use fxvol_core::mcmc::{
    self, alpha_full_conditional, inclusion_probability, mu_beta_full_conditionals,
    phi_full_conditional, quantile, sigma_alpha2_full_conditional, sigma_x2_full_conditional,
    step_latent_x, MixtureTable, Schedule, Variant, LOG_CHI2_MEAN,
};
use fxvol_core::model::{annualize, simulate, ModelParams, PriorConfig};
use fxvol_core::portfolio::{gmvp_weight, gmvp_weight_unclamped};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn sinusoidal_beta(amplitude: f64) -> Vec<f64> {
    let mut beta: Vec<f64> = (0..288)
        .map(|k| amplitude * (2.0 * std::f64::consts::PI * k as f64 / 288.0).sin())
        .collect();
    let mean = beta.iter().sum::<f64>() / beta.len() as f64;
    beta.iter_mut().for_each(|b| *b -= mean);
    beta
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (x, y) in a.iter().zip(b) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

/// Gauss-Jordan inverse for the small exact-smoother matrices.
fn invert(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        assert!(d.abs() > 1e-14, "singular matrix");
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

// ---------------------------------------------------------------------------
// criterion 1
// ---------------------------------------------------------------------------

/// 20 events x 6 lags = 120 columns over T windows, strided releases.
fn acceptance_design(grid: &[chrono::DateTime<chrono::Utc>]) -> EventDesignMatrix {
    let mut entries = Vec::new();
    for event in 0..20usize {
        let offset = 50 + 37 * event;
        let stride = 619 + 7 * event;
        let mut at = offset;
        while at < grid.len() {
            entries.push(CalendarEntry {
                event_id: format!("EVT{event:02}"),
                name: format!("synthetic event {event}"),
                country: if event % 2 == 0 { "US" } else { "AU" }.into(),
                release: grid[at],
            });
            at += stride;
        }
    }
    // keep label order by event index
    entries.sort_by_key(|e| e.event_id.clone());
    let calendar = EventCalendar { entries };
    let outcome = align_events(&calendar, grid, 6).unwrap();
    assert_eq!(outcome.matrix.n_cols(), 120);
    outcome.matrix
}

#[test]
fn criterion_01_posterior_recovery_end_to_end() {
    let started = Instant::now();
    let t_len = 50_000;

    let mut truth = ModelParams::with_event_columns(0);
    truth.mu_h = -6.0;
    truth.phi = 0.98;
    truth.sigma_x2 = 0.15 * 0.15;
    truth.beta = sinusoidal_beta(0.5);

    // build the grid once to align the synthetic calendar
    let probe = simulate(&truth, &EventDesignMatrix::empty(t_len), t_len, 0).unwrap();
    let design = acceptance_design(&probe.0.timestamps);

    let active: Vec<usize> = (0..10).map(|event| event * 6).collect(); // lag 1 of events 0..10
    truth.alpha = vec![0.0; 120];
    truth.pi = vec![0; 120];
    for (i, &col) in active.iter().enumerate() {
        truth.alpha[col] = 1.5 + 1.5 * i as f64 / 9.0; // spread over [1.5, 3]
        truth.pi[col] = 1;
    }

    let (series, _) = simulate(&truth, &design, t_len, 7).unwrap();
    let schedule = Schedule {
        n_iter: 2_000,
        burn_in: 1_000,
        thin: 1,
        seed: 8,
    };
    let draws = mcmc::run_chain(
        &series,
        &design,
        &PriorConfig::default(),
        &schedule,
        Variant::Full,
    )
    .unwrap();

    let summary = draws.inclusion_summary();
    let mut min_active: f64 = 1.0;
    let mut inactive_sum = 0.0;
    let mut inactive_count = 0usize;
    for (j, s) in summary.iter().enumerate() {
        if active.contains(&j) {
            min_active = min_active.min(s.mean_pi);
        } else {
            inactive_sum += s.mean_pi;
            inactive_count += 1;
        }
    }
    let inactive_mean = inactive_sum / inactive_count as f64;

    // evaluate every sub-check before asserting so the printout always
    // carries the full picture
    let mut failures: Vec<String> = Vec::new();
    let mut sub = |name: &str, pass: bool, detail: String| {
        println!(
            "  criterion 01 / {name}: {} — {detail}",
            if pass { "pass" } else { "FAIL" }
        );
        if !pass {
            failures.push(format!("{name} ({detail})"));
        }
    };

    sub(
        "active inclusion > 0.9",
        min_active > 0.9,
        format!("min active mean pi {min_active:.4}"),
    );
    sub(
        "inactive inclusion < 0.15",
        inactive_mean < 0.15,
        format!("inactive mean pi {inactive_mean:.4}"),
    );

    let mut interval = |name: &str, values: Vec<f64>, target: f64| {
        let lo = quantile(&values, 0.025);
        let hi = quantile(&values, 0.975);
        sub(
            &format!("{name} in 95% interval"),
            (lo..=hi).contains(&target),
            format!("truth {target} vs [{lo:.5}, {hi:.5}]"),
        );
    };
    interval("mu_h", draws.scalar_draws(|p| p.mu_h), truth.mu_h);
    interval("phi", draws.scalar_draws(|p| p.phi), truth.phi);
    interval(
        "sigma_x",
        draws.scalar_draws(|p| p.sigma_x2.sqrt()),
        truth.sigma_x2.sqrt(),
    );

    let mean = draws.posterior_mean();
    let beta_corr = pearson(&mean.beta, &truth.beta);
    sub(
        "seasonal correlation > 0.95",
        beta_corr > 0.95,
        format!("corr {beta_corr:.4}"),
    );

    let elapsed = started.elapsed();
    sub(
        "runtime within 15 minutes",
        elapsed.as_secs() < 900,
        format!("{elapsed:?}"),
    );

    assert!(
        failures.is_empty(),
        "criterion 01 sub-checks failed: {}",
        failures.join("; ")
    );
    println!(
        "criterion 01 (posterior recovery): PASS — min active pi {min_active:.3}, inactive mean {inactive_mean:.3}, beta corr {beta_corr:.3}, {elapsed:?}"
    );
}

// ---------------------------------------------------------------------------
// criterion 2
// ---------------------------------------------------------------------------

const GRID_POINTS: usize = 2001;
const DENSITY_TOL: f64 = 1e-6;

fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * step / 3.0
}

fn normalize_logs(logs: &[f64], step: f64) -> Vec<f64> {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let un: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let mass = simpson(&un, step);
    un.into_iter().map(|v| v / mass).collect()
}

fn normal_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (x - mean) * (x - mean) / var)
}

fn max_rel_peak_error(oracle: &[f64], analytic: &[f64]) -> f64 {
    let peak = analytic.iter().cloned().fold(0.0, f64::max).max(1.0);
    oracle
        .iter()
        .zip(analytic)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / peak
}

#[test]
fn criterion_02_gibbs_step_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let prior = PriorConfig::default();

    // a T = 50 latent path
    let (phi_true, sx2): (f64, f64) = (0.7, 0.06);
    let mut x = Vec::with_capacity(50);
    let mut state = (sx2 / (1.0 - phi_true * phi_true)).sqrt()
        * rng.sample::<f64, _>(StandardNormal);
    for t in 0..50 {
        if t > 0 {
            state = phi_true * state + sx2.sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        x.push(state);
    }
    let mut worst: f64 = 0.0;

    // step 1: persistence
    {
        let post = phi_full_conditional(&x, sx2, &prior);
        let step = 2.0 / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| -1.0 + i as f64 * step).collect();
        let oracle = normalize_logs(
            &grid
                .iter()
                .map(|&p| {
                    let mut ll = normal_log_pdf(p, prior.phi_mean, prior.phi_var);
                    for w in x.windows(2) {
                        ll += normal_log_pdf(w[1], p * w[0], sx2);
                    }
                    ll
                })
                .collect::<Vec<_>>(),
            step,
        );
        let analytic = normalize_logs(
            &grid
                .iter()
                .map(|&p| normal_log_pdf(p, post.mean, post.variance))
                .collect::<Vec<_>>(),
            step,
        );
        worst = worst.max(max_rel_peak_error(&oracle, &analytic));
    }

    // steps 2 and 6: the two inverse-gamma variances
    let ig_cases: Vec<(mcmc::InvGammaPosterior, Box<dyn Fn(f64) -> f64>)> = {
        let x2 = x.clone();
        let post_x = sigma_x2_full_conditional(&x, phi_true, &prior, true);
        let like_x: Box<dyn Fn(f64) -> f64> = Box::new(move |v| {
            let mut ll = (prior.ig_x_shape) * prior.ig_x_scale.ln()
                - statrs::function::gamma::ln_gamma(prior.ig_x_shape)
                - (prior.ig_x_shape + 1.0) * v.ln()
                - prior.ig_x_scale / v;
            ll += normal_log_pdf(x2[0], 0.0, v / (1.0 - phi_true * phi_true));
            for w in x2.windows(2) {
                ll += normal_log_pdf(w[1], phi_true * w[0], v);
            }
            ll
        });
        let alpha = vec![1.8, -0.9, 2.4, 0.0, 0.0];
        let pi = vec![1u8, 1, 1, 0, 0];
        let post_a = sigma_alpha2_full_conditional(&alpha, &pi, &prior);
        let like_a: Box<dyn Fn(f64) -> f64> = Box::new(move |v| {
            let mut ll = (prior.ig_a_shape) * prior.ig_a_scale.ln()
                - statrs::function::gamma::ln_gamma(prior.ig_a_shape)
                - (prior.ig_a_shape + 1.0) * v.ln()
                - prior.ig_a_scale / v;
            for (a, &p) in alpha.iter().zip(&pi) {
                if p == 1 {
                    ll += normal_log_pdf(*a, 0.0, v);
                }
            }
            ll
        });
        vec![(post_x, like_x), (post_a, like_a)]
    };
    for (post, log_like) in ig_cases {
        let mode = post.scale / (post.shape + 1.0);
        let lo = mode / 20.0;
        let step = (mode * 40.0 - lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
        let oracle = normalize_logs(&grid.iter().map(|&v| log_like(v)).collect::<Vec<_>>(), step);
        let analytic = normalize_logs(
            &grid
                .iter()
                .map(|&v| {
                    post.shape * post.scale.ln()
                        - statrs::function::gamma::ln_gamma(post.shape)
                        - (post.shape + 1.0) * v.ln()
                        - post.scale / v
                })
                .collect::<Vec<_>>(),
            step,
        );
        worst = worst.max(max_rel_peak_error(&oracle, &analytic));
    }

    // step 4: level/seasonal bin coefficients on a 3-bin instance
    {
        let resid = vec![-6.2, -5.7, -6.0, -5.9, -6.4, -5.8];
        let var = vec![1.1, 0.6, 2.4, 0.8, 1.7, 0.9];
        let bins = vec![0usize, 1, 2, 0, 1, 2];
        let posts = mu_beta_full_conditionals(&resid, &var, &bins, 3, &prior).unwrap();
        for (bin, post) in posts.iter().enumerate() {
            let sd = post.variance.sqrt();
            let lo = post.mean - 9.0 * sd;
            let step = 18.0 * sd / (GRID_POINTS - 1) as f64;
            let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
            let oracle = normalize_logs(
                &grid
                    .iter()
                    .map(|&c| {
                        let mut ll = normal_log_pdf(c, 0.0, prior.coef_var);
                        for ((r, v), &b) in resid.iter().zip(&var).zip(&bins) {
                            if b == bin {
                                ll += normal_log_pdf(*r, c, *v);
                            }
                        }
                        ll
                    })
                    .collect::<Vec<_>>(),
                step,
            );
            let analytic = normalize_logs(
                &grid
                    .iter()
                    .map(|&c| normal_log_pdf(c, post.mean, post.variance))
                    .collect::<Vec<_>>(),
                step,
            );
            worst = worst.max(max_rel_peak_error(&oracle, &analytic));
        }
    }

    // step 5: inclusion probability (closed-form beta)
    {
        let (a, b) = (prior.gamma_a, prior.gamma_b);
        let (s, m) = (2.0f64, 5.0f64);
        let lo = 1e-9;
        let step = (1.0 - 2e-9) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
        let oracle = normalize_logs(
            &grid
                .iter()
                .map(|&g| (a + s - 1.0) * g.ln() + (b + m - s - 1.0) * (1.0 - g).ln())
                .collect::<Vec<_>>(),
            step,
        );
        let (pa, pb) = (a + s, b + m - s);
        let analytic = normalize_logs(
            &grid
                .iter()
                .map(|&g| (pa - 1.0) * g.ln() + (pb - 1.0) * (1.0 - g).ln())
                .collect::<Vec<_>>(),
            step,
        );
        worst = worst.max(max_rel_peak_error(&oracle, &analytic));
    }

    // step 7: coefficient conditional plus the never-observed column
    {
        let resid = vec![2.1, 1.6, 2.4, 2.0];
        let var = vec![0.8, 1.4, 0.6, 1.0];
        let s_a2 = 2.5;
        let post = alpha_full_conditional(&resid, &var, s_a2);
        let sd = post.variance.sqrt();
        let lo = post.mean - 9.0 * sd;
        let step = 18.0 * sd / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
        let oracle = normalize_logs(
            &grid
                .iter()
                .map(|&av| {
                    let mut ll = normal_log_pdf(av, 0.0, s_a2);
                    for (r, v) in resid.iter().zip(&var) {
                        ll += normal_log_pdf(*r, av, *v);
                    }
                    ll
                })
                .collect::<Vec<_>>(),
            step,
        );
        let analytic = normalize_logs(
            &grid
                .iter()
                .map(|&av| normal_log_pdf(av, post.mean, post.variance))
                .collect::<Vec<_>>(),
            step,
        );
        worst = worst.max(max_rel_peak_error(&oracle, &analytic));

        let empty = alpha_full_conditional(&[], &[], s_a2);
        let mut worst_gamma: f64 = 0.0;
        for gamma in [0.03, 0.2, 0.5, 0.9] {
            let p = inclusion_probability(&empty, gamma, s_a2).unwrap();
            worst_gamma = worst_gamma.max((p - gamma).abs());
        }
        assert!(
            worst_gamma < 1e-10,
            "never-observed inclusion deviates from gamma by {worst_gamma}"
        );
    }

    assert!(worst < DENSITY_TOL, "max density error {worst:.2e}");
    println!("criterion 02 (Gibbs-step oracles): PASS — max density error {worst:.2e}");
}

// ---------------------------------------------------------------------------
// criterion 3
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_ffbs_exactness() {
    let obs = vec![0.9, -0.6, 1.4, 0.2, -1.1];
    let obs_var = vec![0.6, 1.2, 1.8, 0.4, 0.9];
    let (phi, sigma_x2): (f64, f64) = (0.85, 0.5);
    let t_len = obs.len();

    let stationary = sigma_x2 / (1.0 - phi * phi);
    let prior_cov: Vec<Vec<f64>> = (0..t_len)
        .map(|i| {
            (0..t_len)
                .map(|j| stationary * phi.powi((i as i32 - j as i32).abs()))
                .collect()
        })
        .collect();
    let prior_prec = invert(&prior_cov);
    let mut post_prec = prior_prec.clone();
    for t in 0..t_len {
        post_prec[t][t] += 1.0 / obs_var[t];
    }
    let post_cov = invert(&post_prec);
    let weighted: Vec<f64> = (0..t_len).map(|t| obs[t] / obs_var[t]).collect();
    let post_mean = mat_vec(&post_cov, &weighted);

    let n = 100_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sums = vec![0.0; t_len];
    let mut cross = vec![vec![0.0; t_len]; t_len];
    for _ in 0..n {
        let x = step_latent_x(&obs, &obs_var, phi, sigma_x2, &mut rng).unwrap();
        for i in 0..t_len {
            sums[i] += x[i];
            for j in 0..t_len {
                cross[i][j] += x[i] * x[j];
            }
        }
    }
    let nf = n as f64;
    let mut max_sigma = 0.0f64;
    for i in 0..t_len {
        let mean = sums[i] / nf;
        let se = (post_cov[i][i] / nf).sqrt();
        let pull = (mean - post_mean[i]).abs() / se;
        max_sigma = max_sigma.max(pull);
        assert!(pull < 3.0, "mean[{i}] off by {pull:.2} se");
    }
    for i in 0..t_len {
        for j in 0..t_len {
            let cov = cross[i][j] / nf - (sums[i] / nf) * (sums[j] / nf);
            let exact = post_cov[i][j];
            let se = ((post_cov[i][i] * post_cov[j][j] + exact * exact) / nf).sqrt();
            let pull = (cov - exact).abs() / se;
            max_sigma = max_sigma.max(pull);
            assert!(pull < 3.0, "cov[{i},{j}] off by {pull:.2} se");
        }
    }
    println!("criterion 03 (FFBS exactness): PASS — worst moment at {max_sigma:.2} MC se");
}

// ---------------------------------------------------------------------------
// criteria 4 and 5
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_mixture_sanity() {
    let table = MixtureTable::ksc();
    let weight_sum: f64 = table.components().iter().map(|c| c.weight).sum();
    assert!((weight_sum - 1.0).abs() < 1e-10, "weights sum to {weight_sum}");
    let mean_err = (table.mean() - LOG_CHI2_MEAN).abs();
    assert!(mean_err < 1e-2, "mixture mean off by {mean_err}");
    let var_target = std::f64::consts::PI * std::f64::consts::PI / 2.0;
    let var_err = (table.variance() - var_target).abs();
    assert!(var_err < 1e-2, "mixture variance off by {var_err}");
    println!(
        "criterion 04 (mixture sanity): PASS — mean {:.4}, variance {:.4}",
        table.mean(),
        table.variance()
    );
}

#[test]
fn criterion_05_annualization_anchor() {
    let v = annualize(0.046).unwrap();
    assert!(
        (12.0..=12.6).contains(&v),
        "annualize(0.046) = {v} outside [12.0, 12.6]"
    );
    println!("criterion 05 (annualization anchor): PASS — annualize(0.046) = {v:.3}");
}

// ---------------------------------------------------------------------------
// criterion 6
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_horse_race_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 20_000;
    let proposal: Vec<f64> = (0..n)
        .map(|_| 1.0 + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let competitor: Vec<f64> = (0..n)
        .map(|_| 1.0 + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let noise_sd = 0.05;
    let rv: Vec<f64> = (0..n)
        .map(|t| {
            0.3 * proposal[t] + 0.7 * competitor[t] + noise_sd * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let r = horse_race(&rv, &proposal, &competitor).unwrap();
    // spread P - C has variance 2 * 0.3^2; se(b1) = noise_sd / (sd_spread sqrt(n))
    let se = noise_sd / ((2.0f64.sqrt() * 0.3) * (n as f64).sqrt());
    assert!(
        (r.b1 - 0.3).abs() < 2.0 * se,
        "b1 {} outside 0.3 +- {}",
        r.b1,
        2.0 * se
    );

    // exact fit pins the weight at one
    let rv_exact: Vec<f64> = proposal.iter().map(|p| 0.1 + p).collect();
    let exact = horse_race(&rv_exact, &proposal, &competitor).unwrap();
    assert!(
        (exact.b1 - 1.0).abs() < 1e-10,
        "exact-fit b1 {}",
        exact.b1
    );

    // random battery stays inside the unit interval
    let mut max_b1: f64 = 0.0;
    let mut min_b1: f64 = 1.0;
    for _ in 0..200 {
        let p: Vec<f64> = (0..60).map(|_| 1.0 + rng.sample::<f64, _>(StandardNormal)).collect();
        let c: Vec<f64> = (0..60).map(|_| 1.0 + rng.sample::<f64, _>(StandardNormal)).collect();
        let y: Vec<f64> = (0..60).map(|_| 1.0 + rng.sample::<f64, _>(StandardNormal)).collect();
        if let Ok(res) = horse_race(&y, &p, &c) {
            max_b1 = max_b1.max(res.b1);
            min_b1 = min_b1.min(res.b1);
        }
    }
    assert!((0.0..=1.0).contains(&max_b1) && (0.0..=1.0).contains(&min_b1));
    println!(
        "criterion 06 (horse race): PASS — mixture b1 {:.4}, exact-fit b1 {:.4}, battery in [{min_b1:.3}, {max_b1:.3}]",
        r.b1, exact.b1
    );
}

// ---------------------------------------------------------------------------
// criterion 7
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_dm_size_and_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let reps = 1_000;
    let n = 10_000;

    let mut rejections = 0usize;
    for _ in 0..reps {
        let e_prop: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let e_comp: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = diebold_mariano(&e_prop, &e_comp, 1).unwrap();
        if r.p_value < 0.05 {
            rejections += 1;
        }
    }
    let size = rejections as f64 / reps as f64;
    assert!(
        (0.03..=0.07).contains(&size),
        "null rejection rate {size} outside [0.03, 0.07]"
    );

    // competitor variance lifted so the mean loss gap is 0.1 sd of the
    // differential: sd(d) = sqrt(2 s^4 + 2) and gap = s^2 - 1
    let s2: f64 = 1.2225;
    let s = s2.sqrt();
    let mut power_hits = 0usize;
    for _ in 0..reps {
        let e_prop: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let e_comp: Vec<f64> = (0..n)
            .map(|_| s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let r = diebold_mariano(&e_prop, &e_comp, 1).unwrap();
        if r.p_value < 0.05 {
            power_hits += 1;
        }
    }
    let power = power_hits as f64 / reps as f64;
    assert!(power > 0.99, "power {power} at a 0.1 sd loss gap");
    println!("criterion 07 (DM size & power): PASS — size {size:.3}, power {power:.3}");
}

// ---------------------------------------------------------------------------
// criterion 8
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_gmvp_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    while checked < 10_000 {
        let vol1 = 0.2 + 2.0 * rng.gen::<f64>();
        let vol2 = 0.2 + 2.0 * rng.gen::<f64>();
        let rho: f64 = -0.95 + 1.9 * rng.gen::<f64>();
        let cov = rho * vol1 * vol2;
        let w = match gmvp_weight_unclamped(vol1, vol2, cov) {
            Ok(w) if (-9.0..=9.0).contains(&w) => w,
            _ => continue,
        };
        // two-stage grid: 1e-3 sweep over [-10, 10], then 1e-6 around
        // the coarse minimum
        let variance = |wt: f64| {
            wt * wt * vol1 * vol1
                + (1.0 - wt) * (1.0 - wt) * vol2 * vol2
                + 2.0 * wt * (1.0 - wt) * cov
        };
        let mut coarse = (-10.0, variance(-10.0));
        let mut wt = -10.0;
        while wt <= 10.0 {
            let v = variance(wt);
            if v < coarse.1 {
                coarse = (wt, v);
            }
            wt += 1e-3;
        }
        let mut fine = coarse;
        let mut wt = coarse.0 - 2e-3;
        while wt <= coarse.0 + 2e-3 {
            let v = variance(wt);
            if v < fine.1 {
                fine = (wt, v);
            }
            wt += 1e-6;
        }
        let diff = (w - fine.0).abs();
        worst = worst.max(diff);
        assert!(
            diff < 1e-5,
            "weight {w} vs grid {at} (inputs {vol1}, {vol2}, {rho})",
            at = fine.0
        );
        checked += 1;
    }

    // symmetry is exact, not approximate
    for vol in [0.037, 0.5, 1.0, 7.3] {
        assert_eq!(gmvp_weight(vol, vol, 0.0).unwrap(), 0.5);
    }

    // annualized summary arithmetic: 8.47 / 10.50 rounds to 0.81
    let sharpe: f64 = 8.47 / 10.50;
    assert!(
        (sharpe - 0.81).abs() < 0.005,
        "sharpe arithmetic {sharpe}"
    );
    println!(
        "criterion 08 (GMVP): PASS — 10^4 grid checks, worst gap {worst:.2e}, sharpe {sharpe:.4} ~ 0.81"
    );
}

// ---------------------------------------------------------------------------
// criterion 9
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_baseline_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);

    // GARCH(1,1) and GJR recover their generating parameters
    let truth = [0.05, 0.05, 0.90];
    let y = simulate_garch(&truth, false, 100_000, &mut rng);
    let fit = fit_garch11(&y).unwrap();
    let mut worst: f64 = 0.0;
    for (label, want) in ["omega", "alpha", "beta"].iter().zip(truth) {
        let got = fit.param(label).unwrap();
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() < 0.02, "{label}: {got} vs {want}");
    }
    let truth_gjr = [0.05, 0.03, 0.06, 0.88];
    let y = simulate_garch(&truth_gjr, true, 100_000, &mut rng);
    let fit = fit_gjr_garch(&y).unwrap();
    for (label, want) in ["omega", "alpha", "gamma", "beta"].iter().zip(truth_gjr) {
        let got = fit.param(label).unwrap();
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() < 0.02, "GJR {label}: {got} vs {want}");
    }

    // AR1-RV and HAR match a normal-equations least-squares oracle
    let n = 4_000;
    let mut rv = Vec::with_capacity(n);
    let mut state: f64 = 1.0;
    for _ in 0..n {
        state = 0.3 + 0.6 * state + 0.1 * rng.sample::<f64, _>(StandardNormal);
        rv.push(state.max(0.01));
    }
    let ar1 = fit_ar1_rv(&rv).unwrap();
    let oracle = ols_normal_equations(
        &rv[1..],
        &(0..n - 1).map(|t| vec![1.0, rv[t]]).collect::<Vec<_>>(),
    );
    let mut ols_gap: f64 = 0.0;
    for (got, want) in ar1.params.iter().zip(&oracle) {
        let rel = (got - want).abs() / want.abs().max(1e-12);
        ols_gap = ols_gap.max(rel);
        assert!(rel < 1e-8, "AR1 coefficient {got} vs oracle {want}");
    }

    let har = fit_har(&rv).unwrap();
    let rows: Vec<Vec<f64>> = (288..n)
        .map(|t| {
            let hour = rv[t - 12..t].iter().sum::<f64>() / 12.0;
            let day = rv[t - 288..t].iter().sum::<f64>() / 288.0;
            vec![1.0, rv[t - 1], hour, day]
        })
        .collect();
    let oracle = ols_normal_equations(&rv[288..], &rows);
    for (got, want) in har.params.iter().zip(&oracle) {
        let rel = (got - want).abs() / want.abs().max(1e-12);
        ols_gap = ols_gap.max(rel);
        assert!(rel < 1e-8, "HAR coefficient {got} vs oracle {want}");
    }
    println!(
        "criterion 09 (baselines): PASS — worst QMLE gap {worst:.4}, worst OLS gap {ols_gap:.2e}"
    );
}

/// Independent least-squares oracle: normal equations by Gauss-Jordan.
fn ols_normal_equations(y: &[f64], rows: &[Vec<f64>]) -> Vec<f64> {
    let p = rows[0].len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yv) in rows.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * yv;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    mat_vec(&invert(&xtx), &xty)
}

// ---------------------------------------------------------------------------
// criterion 10
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_fxvol");
    let root = tempfile::tempdir().unwrap();
    let root = root.path();

    // small calendar spanning the simulated sample
    let mut calendar = String::from("event_id,name,country,release\n");
    for k in 0..12 {
        calendar.push_str(&format!(
            "EVT,Rate Decision,US,2017-01-02T{:02}:3{}:00Z\n",
            2 * k,
            k % 6
        ));
    }
    let cal_path = root.join("calendar.csv");
    std::fs::write(&cal_path, calendar).unwrap();

    let run = |dir: &std::path::Path| {
        let sim = dir.join("sim");
        let est = dir.join("est");
        let status = std::process::Command::new(bin)
            .args([
                "simulate",
                "--t-len",
                "576",
                "--seed",
                "99",
                "--calendar",
                cal_path.to_str().unwrap(),
                "--beta-amplitude",
                "0.4",
                "--out-dir",
                sim.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        let status = std::process::Command::new(bin)
            .args([
                "estimate",
                "--returns",
                sim.join("returns.csv").to_str().unwrap(),
                "--calendar",
                cal_path.to_str().unwrap(),
                "--variant",
                "full",
                "--iters",
                "60",
                "--burn-in",
                "20",
                "--thin",
                "2",
                "--seed",
                "7",
                "--out-dir",
                est.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());

        // forecasts for both "assets" (same series twice is fine for a
        // determinism check) and a constant-correlation series
        let fc = dir.join("fc.csv");
        let status = std::process::Command::new(bin)
            .args([
                "forecast",
                "--draws",
                est.join("draws.csv").to_str().unwrap(),
                "--returns",
                sim.join("returns.csv").to_str().unwrap(),
                "--calendar",
                cal_path.to_str().unwrap(),
                "--split-frac",
                "0.8",
                "--out",
                fc.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());

        let (ts, _) = fxvol_core::market::read_series_csv(&fc).unwrap();
        let corr_path = dir.join("corr.csv");
        let mut corr = String::from("timestamp,value\n");
        for t in &ts {
            corr.push_str(&format!("{},0.25\n", fxvol_core::market::format_timestamp(*t)));
        }
        std::fs::write(&corr_path, corr).unwrap();

        let table2 = dir.join("table2.csv");
        let status = std::process::Command::new(bin)
            .args([
                "backtest",
                "--r1",
                sim.join("returns.csv").to_str().unwrap(),
                "--r2",
                sim.join("returns.csv").to_str().unwrap(),
                "--model",
                &format!("proposal={},{}", fc.display(), fc.display()),
                "--corr",
                corr_path.to_str().unwrap(),
                "--out",
                table2.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        (
            std::fs::read(est.join("draws.csv")).unwrap(),
            std::fs::read(table2).unwrap(),
        )
    };

    let dir_a = root.join("a");
    let dir_b = root.join("b");
    std::fs::create_dir_all(&dir_a).unwrap();
    std::fs::create_dir_all(&dir_b).unwrap();
    let (draws_a, table_a) = run(&dir_a);
    let (draws_b, table_b) = run(&dir_b);
    assert_eq!(draws_a, draws_b, "draws.csv differs across identical runs");
    assert_eq!(table_a, table_b, "table2.csv differs across identical runs");
    println!(
        "criterion 10 (determinism): PASS — draws.csv ({} bytes) and table2.csv ({} bytes) bit-identical",
        draws_a.len(),
        table_a.len()
    );
}
