//! Dense square matrices just large enough for the built-in presets, with
//! spectral norm and symmetric largest-eigenvalue via power iteration.

use crate::error::{CoreError, CoreResult};

const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 10_000;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn from_rows(rows: &[&[f64]]) -> CoreResult<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(CoreError::Invalid {
                what: "matrix",
                why: "rows must form a nonempty square".into(),
            });
        }
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if !data.iter().all(|x| x.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "matrix entries",
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_nested(rows: &[Vec<f64>]) -> CoreResult<Self> {
        let slices: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&slices)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self {
            n,
            data: vec![0.0; n * n],
        };
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, a: f64) -> Self {
        let mut m = Self::identity(n);
        for i in 0..n {
            m.data[i * n + i] = a;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        Mat { n, data: out }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.n, other.n);
        Mat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Mat { n, data: out }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..n).map(|j| self.data[i * n + j] * x[j]).sum();
        }
    }

    /// Max absolute row sum; an upper bound on the spectral radius.
    fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .map(|x| x.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.data[i * n + j] - self.data[j * n + i]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Dominant eigenvalue of a positive-semidefinite matrix via power iteration
/// with a Rayleigh-quotient estimate.
fn psd_lambda_max(m: &Mat) -> f64 {
    let n = m.n;
    // deterministic start, slightly tilted to avoid orthogonal stalls
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut w = vec![0.0; n];
    let mut lambda_prev = 0.0;
    for _ in 0..POWER_CAP {
        m.apply(&v, &mut w);
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if (lambda - lambda_prev).abs() <= POWER_TOL * lambda.abs().max(1.0) {
            return lambda;
        }
        lambda_prev = lambda;
    }
    lambda_prev
}

/// Spectral norm (largest singular value): square root of the dominant
/// eigenvalue of `M^T M`.
pub fn spectral_norm(m: &Mat) -> f64 {
    let gram = m.transpose().matmul(m);
    psd_lambda_max(&gram).max(0.0).sqrt()
}

/// Largest eigenvalue of a symmetric matrix (shifted power iteration).
pub fn sym_lambda_max(m: &Mat) -> CoreResult<f64> {
    let scale = m.inf_norm().max(1.0);
    if !m.is_symmetric(1e-12 * scale) {
        return Err(CoreError::Invalid {
            what: "matrix",
            why: "symmetric input required".into(),
        });
    }
    // shift so the target eigenvalue dominates in magnitude and is nonnegative
    let shift = m.inf_norm();
    let shifted = m.add(&Mat::scaled_identity(m.n, shift));
    Ok(psd_lambda_max(&shifted) - shift)
}
