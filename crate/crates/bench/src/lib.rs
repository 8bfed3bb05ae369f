//! Shared fixtures for the sampler benchmarks.

use fxvol_core::market::{ColumnLabel, EventDesignMatrix, ReturnSeries};
use fxvol_core::model::{simulate, ModelParams};

/// Simulated series plus a strided design with the given column count.
pub fn synthetic_problem(t_len: usize, n_cols: usize) -> (ReturnSeries, EventDesignMatrix) {
    let labels: Vec<ColumnLabel> = (0..n_cols)
        .map(|j| ColumnLabel {
            event_id: format!("E{:03}", j / 6),
            lag: j % 6 + 1,
        })
        .collect();
    let mut entries = Vec::new();
    for j in 0..n_cols {
        let mut at = 17 + 13 * j;
        while at < t_len {
            entries.push((at as u32, j as u32));
            at += 557;
        }
    }
    let design = EventDesignMatrix::new(t_len, labels, entries).unwrap();

    let mut params = ModelParams::with_event_columns(n_cols);
    params.mu_h = -6.0;
    params.phi = 0.97;
    params.sigma_x2 = 0.02;
    for j in (0..n_cols).step_by(7) {
        params.alpha[j] = 1.5;
        params.pi[j] = 1;
    }
    let (series, _) = simulate(&params, &design, t_len, 99).unwrap();
    (series, design)
}
