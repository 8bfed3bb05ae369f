//! Seven-component Gaussian mixture approximating the log chi-squared
//! distribution with one degree of freedom.

use super::McmcError;
use std::f64::consts::PI;

/// Mean of `ln(chi^2_1)`: `-(Euler-Mascheroni + ln 2)`.
pub const LOG_CHI2_MEAN: f64 = -1.2704;

/// Variance of `ln(chi^2_1)`: `pi^2 / 2`.
pub fn log_chi2_variance() -> f64 {
    PI * PI / 2.0
}

/// Kim-Shephard-Chib (1998) mixture constants. The tabulated means are
/// centered; the mixture for `ln(eps^2)` itself shifts them by
/// [`LOG_CHI2_MEAN`].
const KSC_TABLE: [(f64, f64, f64); 7] = [
    (0.00730, -10.12999, 5.79596),
    (0.10556, -3.97281, 2.61369),
    (0.00002, -8.56686, 5.17950),
    (0.04395, 2.77786, 0.16735),
    (0.34001, 0.61942, 0.64009),
    (0.24566, 1.79518, 0.34023),
    (0.25750, -1.08819, 1.26261),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// A seven-component Gaussian mixture used as observation noise in the
/// linearized state-space model.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTable {
    components: [MixtureComponent; 7],
}

impl MixtureTable {
    /// Builds a table, checking that weights sum to one and variances
    /// are positive. Moment checks against `ln(chi^2_1)` are separate
    /// ([`Self::check_log_chi2_moments`]) so tests can build toy tables.
    pub fn new(components: [MixtureComponent; 7]) -> Result<Self, McmcError> {
        let weight_sum: f64 = components.iter().map(|c| c.weight).sum();
        if (weight_sum - 1.0).abs() > 1e-10 {
            return Err(McmcError::Config {
                msg: format!("mixture weights sum to {weight_sum}, expected 1"),
            });
        }
        for (j, c) in components.iter().enumerate() {
            if !(c.weight >= 0.0) || !(c.variance > 0.0) || !c.mean.is_finite() {
                return Err(McmcError::Config {
                    msg: format!("invalid mixture component {j}: {c:?}"),
                });
            }
        }
        Ok(Self { components })
    }

    /// The Kim-Shephard-Chib table, moment-checked at construction
    /// rather than trusted blindly.
    pub fn ksc() -> Self {
        let components = KSC_TABLE.map(|(weight, mean, variance)| MixtureComponent {
            weight,
            mean: mean + LOG_CHI2_MEAN,
            variance,
        });
        let table = Self::new(components).expect("KSC constants are a valid mixture");
        table
            .check_log_chi2_moments(1e-2)
            .expect("KSC constants reproduce the log chi-squared moments");
        table
    }

    pub fn components(&self) -> &[MixtureComponent; 7] {
        &self.components
    }

    /// Mixture mean `sum q_j m_j`.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Mixture variance `sum q_j (v_j + m_j^2) - mean^2`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (c.variance + c.mean * c.mean))
            .sum();
        second - mean * mean
    }

    /// Verifies the mixture matches the first two moments of
    /// `ln(chi^2_1)` within `tol`.
    pub fn check_log_chi2_moments(&self, tol: f64) -> Result<(), McmcError> {
        let mean_err = (self.mean() - LOG_CHI2_MEAN).abs();
        if mean_err > tol {
            return Err(McmcError::Config {
                msg: format!("mixture mean off by {mean_err}"),
            });
        }
        let var_err = (self.variance() - log_chi2_variance()).abs();
        if var_err > tol {
            return Err(McmcError::Config {
                msg: format!("mixture variance off by {var_err}"),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ksc_table_reproduces_log_chi2_moments() {
        let t = MixtureTable::ksc();
        let weight_sum: f64 = t.components().iter().map(|c| c.weight).sum();
        assert!((weight_sum - 1.0).abs() < 1e-10);
        assert!((t.mean() - LOG_CHI2_MEAN).abs() < 1e-2, "mean {}", t.mean());
        assert!(
            (t.variance() - log_chi2_variance()).abs() < 1e-2,
            "variance {}",
            t.variance()
        );
    }

    #[test]
    fn bad_weights_are_rejected() {
        let mut comps = MixtureTable::ksc().components().clone();
        comps[0].weight += 0.1;
        assert!(MixtureTable::new(comps).is_err());
    }
}
