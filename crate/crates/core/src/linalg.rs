//! Dense complex matrices and the quantum-state primitives built on them.
//!
//! Dimensions here are small (at most 16 for states), so everything is
//! stored densely in row-major order. Subsystem index 0 is the most
//! significant factor of a tensor product.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for objects the library constructs itself.
pub const BUILD_TOL: f64 = 1e-12;
/// Tolerance for caller-supplied inputs.
pub const INPUT_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: other.cols,
            data: out,
        })
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    fn zip_with(&self, other: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] to handle it.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes agree")
    }
}

/// Kronecker product: `(a⊗b)[(i·rb+k),(j·cb+l)] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * rb, a.cols * cb, |r, c| {
        a.get(r / rb, c / cb) * b.get(r % rb, c % cb)
    })
}

/// Kronecker product of a list of matrices (identity `1×1` for an empty list).
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Kronecker product of column vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in ascending order; column `k` of the returned
/// matrix is the eigenvector for eigenvalue `k`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let dev = m.hermiticity_error();
    let scale = m.frobenius_norm().max(1.0);
    if dev > INPUT_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows;
    // Work on the Hermitian part so tiny input asymmetries cannot accumulate.
    let mut a: Vec<C64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (m.get(i, j) + m.get(j, i).conj()) * 0.5
        })
        .collect();
    let mut v = ComplexMatrix::identity(n).data;
    let idx = |i: usize, j: usize| i * n + j;

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[idx(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q)
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = akp * upp + akq * uqp;
                    a[idx(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[idx(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[idx(p, q)] = ZERO;
                a[idx(q, p)] = ZERO;
                a[idx(p, p)] = C64::new(a[idx(p, p)].re, 0.0);
                a[idx(q, q)] = C64::new(a[idx(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = vkp * upp + vkq * uqp;
                    v[idx(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(i, i)].re.total_cmp(&a[idx(j, j)].re));
    let values = order.iter().map(|&i| a[idx(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[idx(r, order[c])]);
    Ok((values, vectors))
}

/// Density matrix together with the dimensions of its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl QuantumState {
    /// Validates trace, Hermiticity and positivity at input tolerance.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows != total || dims.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with subsystem dims {dims:?}",
                matrix.rows, matrix.cols
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > INPUT_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let (ev, _) = hermitian_eig(&matrix)?;
        if ev[0] < -INPUT_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {:e}", ev[0])));
        }
        Ok(QuantumState { matrix, dims })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the ket is normalized first.
    pub fn pure(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = ket.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let normalized: Vec<C64> = ket.iter().map(|v| v / norm).collect();
        Self::new(ComplexMatrix::outer(&normalized), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        QuantumState {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims,
        }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ket = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        QuantumState {
            matrix: ComplexMatrix::outer(&ket),
            dims: vec![2, 2],
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn tensor(&self, other: &QuantumState) -> QuantumState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        QuantumState {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// Convex combination `p·self + (1-p)·other`.
    pub fn mix(&self, p: f64, other: &QuantumState) -> Result<QuantumState> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(QuantumState {
            matrix: &self.matrix.scale_real(p) + &other.matrix.scale_real(1.0 - p),
            dims: self.dims.clone(),
        })
    }

    /// `tr(ρ·op)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        if (op.rows, op.cols) != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {}-dimensional state",
                op.rows,
                op.cols,
                self.dim()
            )));
        }
        let n = self.dim();
        let mut s = ZERO;
        for i in 0..n {
            for k in 0..n {
                s += self.matrix.get(i, k) * op.get(k, i);
            }
        }
        Ok(s)
    }

    /// Reorders tensor factors: factor `i` of the result is factor `perm[i]` of `self`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<QuantumState> {
        let k = self.dims.len();
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSubsystem { index: p, count: k });
            }
        }
        if perm.len() != k {
            return Err(Error::DimensionMismatch(format!("permutation of length {} for {k} factors", perm.len())));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let n = self.dim();
        // Map a multi-index in the new order to a flat index in the old order.
        let old_index = |flat: usize| -> usize {
            let mut digits = vec![0; k];
            let mut rem = flat;
            for pos in (0..k).rev() {
                digits[perm[pos]] = rem % new_dims[pos];
                rem /= new_dims[pos];
            }
            digits.iter().zip(&self.dims).fold(0, |acc, (&d, &dim)| acc * dim + d)
        };
        let map: Vec<usize> = (0..n).map(old_index).collect();
        Ok(QuantumState {
            matrix: ComplexMatrix::from_fn(n, n, |i, j| self.matrix.get(map[i], map[j])),
            dims: new_dims,
        })
    }

    /// Traces out every subsystem not listed in `keep`. Kept factors stay
    /// in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState> {
        let k = self.dims.len();
        if keep.is_empty() {
            return Err(Error::InvalidSubsystem { index: 0, count: k });
        }
        if let Some(&bad) = keep.iter().find(|&&i| i >= k) {
            return Err(Error::InvalidSubsystem { index: bad, count: k });
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() == k {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..k).filter(|i| !kept.contains(i)).collect();
        // Move kept factors to the front, then sum over the trailing block.
        let perm: Vec<usize> = kept.iter().chain(&traced).copied().collect();
        let permuted = self.permute_subsystems(&perm)?;
        let dk: usize = kept.iter().map(|&i| self.dims[i]).product();
        let dt: usize = traced.iter().map(|&i| self.dims[i]).product();
        let m = &permuted.matrix;
        let reduced = ComplexMatrix::from_fn(dk, dk, |i, j| (0..dt).map(|t| m.get(i * dt + t, j * dt + t)).sum());
        Ok(QuantumState {
            matrix: reduced,
            dims: kept.iter().map(|&i| self.dims[i]).collect(),
        })
    }

    /// `-Σ λ log₂ λ` over the spectrum, with `0·log 0 = 0`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let (ev, _) = hermitian_eig(&self.matrix)?;
        if ev[0] < -INPUT_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {:e}", ev[0])));
        }
        let h: f64 = ev.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum();
        Ok(h.clamp(0.0, (self.dim() as f64).log2()))
    }
}

/// One measurement setting: a complete set of orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    pub label: String,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(label: impl Into<String>, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let label = label.into();
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidMeasurement(format!("{label}: no outcomes")))?;
        let n = first.rows();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (i, p) in projectors.iter().enumerate() {
            if (p.rows(), p.cols()) != (n, n) {
                return Err(Error::InvalidMeasurement(format!("{label}: outcome {i} has wrong shape")));
            }
            if !p.is_hermitian(INPUT_TOL) || p.matmul(p)?.max_abs_diff(p) > INPUT_TOL {
                return Err(Error::InvalidMeasurement(format!("{label}: outcome {i} is not a projector")));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                if p.matmul(q)?.max_abs_diff(&ComplexMatrix::zeros(n, n)) > INPUT_TOL {
                    return Err(Error::InvalidMeasurement(format!("{label}: outcomes {i} and {j} overlap")));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(n)) > INPUT_TOL {
            return Err(Error::InvalidMeasurement(format!("{label}: projectors do not sum to identity")));
        }
        Ok(ProjectiveMeasurement { label, projectors })
    }

    /// Projectors onto rank-1 kets, which must form an orthonormal basis.
    pub fn from_kets(label: impl Into<String>, kets: &[Vec<C64>]) -> Result<Self> {
        Self::new(label, kets.iter().map(|k| ComplexMatrix::outer(k)).collect())
    }

    /// Two-outcome measurement of a ±1 observable; outcome 0 is the +1 eigenspace.
    pub fn from_observable(label: impl Into<String>, obs: &ComplexMatrix) -> Result<Self> {
        let n = obs.rows();
        let id = ComplexMatrix::identity(n);
        let plus = (&id + obs).scale_real(0.5);
        let minus = (&id - obs).scale_real(0.5);
        Self::new(label, vec![plus, minus])
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }
}
