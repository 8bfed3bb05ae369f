//! Small dense least-squares helpers for the regression-based models.
//!
//! The solver runs a Householder QR on the (tall, thin) design matrix,
//! which keeps it independent of the normal-equations oracle the tests
//! compare against.

#[derive(Debug, thiserror::Error)]
pub(crate) enum LinalgError {
    #[error("rank-deficient design matrix (pivot {pivot} of {cols})")]
    RankDeficient { pivot: usize, cols: usize },
    #[error("shape mismatch: {msg}")]
    Shape { msg: String },
}

/// Row-major dense matrix.
pub(crate) struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Least squares `min ||X b - y||` via Householder QR.
///
/// Fails when a diagonal of `R` collapses relative to the largest one,
/// which signals collinear regressors.
pub(crate) fn ols_qr(x: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (n, p) = (x.rows, x.cols);
    if y.len() != n {
        return Err(LinalgError::Shape {
            msg: format!("{n} rows but {} responses", y.len()),
        });
    }
    if n < p {
        return Err(LinalgError::Shape {
            msg: format!("{n} rows < {p} columns"),
        });
    }

    let mut a = x.data.clone(); // working copy, row-major n x p
    let mut rhs = y.to_vec();

    for k in 0..p {
        // Householder vector for column k below row k
        let mut norm2 = 0.0;
        for i in k..n {
            let v = a[i * p + k];
            norm2 += v * v;
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            return Err(LinalgError::RankDeficient { pivot: k, cols: p });
        }
        let akk = a[k * p + k];
        let alpha = if akk >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        v[0] = akk - alpha;
        for i in (k + 1)..n {
            v[i - k] = a[i * p + k];
        }
        let vtv: f64 = v.iter().map(|w| w * w).sum();
        if vtv > 0.0 {
            // apply H = I - 2 v v^T / (v^T v) to remaining columns and rhs
            for c in k..p {
                let mut dot = 0.0;
                for i in k..n {
                    dot += v[i - k] * a[i * p + c];
                }
                let f = 2.0 * dot / vtv;
                for i in k..n {
                    a[i * p + c] -= f * v[i - k];
                }
            }
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * rhs[i];
            }
            let f = 2.0 * dot / vtv;
            for i in k..n {
                rhs[i] -= f * v[i - k];
            }
        }
        a[k * p + k] = alpha;
    }

    // rank check against the largest diagonal
    let max_diag = (0..p).map(|k| a[k * p + k].abs()).fold(0.0f64, f64::max);
    for k in 0..p {
        if a[k * p + k].abs() <= 1e-10 * max_diag.max(1e-300) {
            return Err(LinalgError::RankDeficient { pivot: k, cols: p });
        }
    }

    // back substitution on R b = Q^T y
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = rhs[k];
        for c in (k + 1)..p {
            s -= a[k * p + c] * beta[c];
        }
        beta[k] = s / a[k * p + k];
    }
    Ok(beta)
}

/// Inverts a symmetric positive-definite matrix via Cholesky.
pub(crate) fn invert_spd(m: &DenseMatrix) -> Option<DenseMatrix> {
    let p = m.rows;
    if m.cols != p {
        return None;
    }
    // lower Cholesky factor
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = m.at(i, j);
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * p + i] = s.sqrt();
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    // solve L L^T X = I column by column
    let mut inv = DenseMatrix::zeros(p, p);
    for col in 0..p {
        let mut z = vec![0.0; p];
        for i in 0..p {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * p + k] * z[k];
            }
            z[i] = s / l[i * p + i];
        }
        for i in (0..p).rev() {
            let mut s = z[i];
            for k in (i + 1)..p {
                s -= l[k * p + i] * z[k];
            }
            z[i] = s / l[i * p + i];
            inv.set(i, col, z[i]);
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn qr_matches_hand_solved_regression() {
        // y = 1 + 2 x fitted through three exact points
        let mut x = DenseMatrix::zeros(3, 2);
        for (i, xv) in [0.0, 1.0, 2.0].iter().enumerate() {
            x.set(i, 0, 1.0);
            x.set(i, 1, *xv);
        }
        let y = [1.0, 3.0, 5.0];
        let b = ols_qr(&x, &y).unwrap();
        assert_relative_eq!(b[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(b[1], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn qr_flags_collinear_columns() {
        let mut x = DenseMatrix::zeros(4, 2);
        for i in 0..4 {
            x.set(i, 0, 1.0);
            x.set(i, 1, 2.0); // constant, collinear with intercept
        }
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            ols_qr(&x, &y),
            Err(LinalgError::RankDeficient { .. })
        ));
    }

    #[test]
    fn spd_inverse_round_trips() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, 4.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 3.0);
        let inv = invert_spd(&m).unwrap();
        // m * inv = I
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += m.at(i, k) * inv.at(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(s, expect, epsilon = 1e-12);
            }
        }
    }
}
