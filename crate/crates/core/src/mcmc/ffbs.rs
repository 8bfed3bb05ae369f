//! Forward filtering backward sampling for the scalar AR(1) state.
//!
//! Observation model after linearization and mixture adjustment:
//! `obs_t = x_t + N(0, obs_var_t)` with `x_t = phi x_{t-1} + sigma_x eta_t`
//! and `x_1` drawn from the stationary distribution.

use super::McmcError;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Joint draw of `x_{1..T}` from its full conditional.
///
/// `obs` must already be net of the level, seasonal, announcement and
/// mixture-mean terms; `obs_var` holds the mixture variance of each
/// observation.
pub fn step_latent_x(
    obs: &[f64],
    obs_var: &[f64],
    phi: f64,
    sigma_x2: f64,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, McmcError> {
    let t_len = obs.len();
    if obs_var.len() != t_len {
        return Err(McmcError::Config {
            msg: format!(
                "{} observations but {} variances",
                t_len,
                obs_var.len()
            ),
        });
    }
    if t_len == 0 {
        return Ok(Vec::new());
    }
    if !(phi.abs() < 1.0) || !(sigma_x2 >= 0.0) || !phi.is_finite() || !sigma_x2.is_finite() {
        return Err(McmcError::Numeric {
            sweep: None,
            msg: format!("invalid state parameters phi={phi}, sigma_x2={sigma_x2}"),
        });
    }
    for (t, (&o, &v)) in obs.iter().zip(obs_var).enumerate() {
        if !o.is_finite() || !(v > 0.0) {
            return Err(McmcError::Numeric {
                sweep: None,
                msg: format!("non-finite observation or variance at index {t}"),
            });
        }
    }

    // forward pass: predicted (a, r) and filtered (m, c) moments
    let mut filt_mean = vec![0.0; t_len];
    let mut filt_var = vec![0.0; t_len];
    let mut pred_mean = vec![0.0; t_len];
    let mut pred_var = vec![0.0; t_len];

    let mut a = 0.0;
    let mut r = sigma_x2 / (1.0 - phi * phi);
    for t in 0..t_len {
        pred_mean[t] = a;
        pred_var[t] = r;
        let s = r + obs_var[t];
        let gain = r / s;
        let m = a + gain * (obs[t] - a);
        let c = r * obs_var[t] / s; // = (1 - gain) r, nonnegative by construction
        filt_mean[t] = m;
        filt_var[t] = c;
        a = phi * m;
        r = phi * phi * c + sigma_x2;
    }

    // backward pass
    let mut x = vec![0.0; t_len];
    x[t_len - 1] = draw_normal(filt_mean[t_len - 1], filt_var[t_len - 1], rng);
    for t in (0..t_len - 1).rev() {
        let r_next = pred_var[t + 1];
        let (mean, var) = if r_next > 0.0 {
            let gain = filt_var[t] * phi / r_next;
            (
                filt_mean[t] + gain * (x[t + 1] - pred_mean[t + 1]),
                // c - gain^2 r = c * sigma_x2 / r, which cannot go negative
                filt_var[t] * sigma_x2 / r_next,
            )
        } else {
            (filt_mean[t], 0.0)
        };
        x[t] = draw_normal(mean, var, rng);
    }
    Ok(x)
}

#[inline]
fn draw_normal(mean: f64, var: f64, rng: &mut impl Rng) -> f64 {
    if var <= 0.0 {
        return mean;
    }
    let z: f64 = StandardNormal.sample(rng);
    mean + var.sqrt() * z
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_state_noise_pins_path_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obs = vec![1.0, -2.0, 0.5, 3.0];
        let var = vec![1.0; 4];
        let x = step_latent_x(&obs, &var, 0.9, 1e-30, &mut rng).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-8), "{x:?}");
    }

    #[test]
    fn uninformative_observations_reduce_to_prior() {
        // with obs variance ~ infinity the draws follow the AR(1) prior
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t_len = 4;
        let obs = vec![5.0; t_len];
        let var = vec![1e14; t_len];
        let (phi, sigma_x2) = (0.8, 0.5);
        let n = 40_000;
        let mut sum = vec![0.0; t_len];
        let mut sumsq = vec![0.0; t_len];
        for _ in 0..n {
            let x = step_latent_x(&obs, &var, phi, sigma_x2, &mut rng).unwrap();
            for t in 0..t_len {
                sum[t] += x[t];
                sumsq[t] += x[t] * x[t];
            }
        }
        let stationary = sigma_x2 / (1.0 - phi * phi);
        for t in 0..t_len {
            let mean = sum[t] / n as f64;
            let var_emp = sumsq[t] / n as f64 - mean * mean;
            let se_mean = (stationary / n as f64).sqrt();
            assert!(mean.abs() < 4.0 * se_mean, "mean[{t}] = {mean}");
            let se_var = stationary * (2.0 / n as f64).sqrt();
            assert!(
                (var_emp - stationary).abs() < 4.0 * se_var,
                "var[{t}] = {var_emp} vs {stationary}"
            );
        }
    }

    #[test]
    fn rejects_nonfinite_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = step_latent_x(&[f64::NAN], &[1.0], 0.5, 0.1, &mut rng).unwrap_err();
        assert!(matches!(err, McmcError::Numeric { .. }));
    }
}
