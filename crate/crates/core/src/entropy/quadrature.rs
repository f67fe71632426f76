//! Gauss-Radau quadrature on `[0, 1]` with the endpoint `t = 1` fixed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussRadauRule {
    /// Strictly increasing, with `nodes[m-1] == 1`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRadauRule {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    /// `c_k = w_k / (t_k ln 2)` for the free nodes `k < m`.
    pub fn coefficients(&self) -> Vec<f64> {
        let m = self.m();
        (0..m - 1)
            .map(|k| self.weights[k] / (self.nodes[k] * std::f64::consts::LN_2))
            .collect()
    }

    /// `c_m = Σ_{k<m} c_k`.
    pub fn constant(&self) -> f64 {
        self.coefficients().iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// `m`-point rule via Golub-Welsch on the shifted-Legendre Jacobi matrix,
/// with the last diagonal entry modified so that 1 is an eigenvalue.
pub fn gauss_radau(m: usize) -> Result<GaussRadauRule> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("Gauss-Radau needs m >= 2, got {m}")));
    }
    let alpha = vec![0.5; m];
    // beta[k] couples rows k and k+1
    let beta: Vec<f64> = (1..m)
        .map(|k| {
            let k = k as f64;
            k / (2.0 * (4.0 * k * k - 1.0).sqrt())
        })
        .collect();

    // Solve (J_{m-1} - τ I) δ = β_{m-1}² e_{m-1} by the tridiagonal algorithm.
    let tau = 1.0;
    let n = m - 1;
    let diag: Vec<f64> = alpha[..n].iter().map(|a| a - tau).collect();
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = beta[n - 1] * beta[n - 1];
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 0..n {
        let lower = if i > 0 { beta[i - 1] } else { 0.0 };
        let denom = diag[i] - lower * if i > 0 { c_prime[i - 1] } else { 0.0 };
        c_prime[i] = if i + 1 < n { beta[i] / denom } else { 0.0 };
        d_prime[i] = (rhs[i] - lower * if i > 0 { d_prime[i - 1] } else { 0.0 }) / denom;
    }
    let mut delta = vec![0.0; n];
    for i in (0..n).rev() {
        delta[i] = d_prime[i] - if i + 1 < n { c_prime[i] * delta[i + 1] } else { 0.0 };
    }
    let mut alpha_mod = alpha.clone();
    alpha_mod[m - 1] = tau + delta[n - 1];

    let j = ComplexMatrix::from_fn(m, m, |r, c| {
        let v = if r == c {
            alpha_mod[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        };
        C64::new(v, 0.0)
    });
    let (values, vectors) = hermitian_eig(&j)?;
    let mut nodes = values;
    let weights: Vec<f64> = (0..m).map(|k| vectors.get(0, k).norm_sqr()).collect();
    nodes[m - 1] = 1.0;
    Ok(GaussRadauRule { nodes, weights })
}
