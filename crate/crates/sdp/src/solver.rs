//! Primal-dual path-following interior-point method.
//!
//! Internally the problem is held in standard form
//!
//! ```text
//! min ⟨C, X⟩  s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0      max bᵀy  s.t. Σ y_i A_i + Z = C, Z ⪰ 0
//! ```
//!
//! with `X = Y`, `C = -F_0`, `A_i = F_i`, `b = c`, `y = -x` and `Z = S` relative
//! to the SDPA convention of [`crate::problem`]. Search directions use
//! Nesterov-Todd scaling with a Mehrotra predictor-corrector step; the
//! Schur complement is dense and factored by Cholesky. Iterates may be
//! infeasible; residuals are driven to zero along with the gap.

use faer::{Mat, Side};

use crate::error::SdpError;
use crate::problem::{BlockKind, SdpProblem};

/// Termination state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Gap and both residuals below tolerance.
    Optimal,
    /// Progress stalled with a small but not certified gap.
    NearOptimal,
    /// A Farkas-type certificate was found; see [`SdpSolution::certificate`].
    Infeasible,
    /// Iteration limit or numerical breakdown.
    Failed,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NearOptimal => "near-optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Failed => "failed",
        }
    }
}

/// Proof that one side of the program has no feasible point.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// No `x` makes `Σ x_i F_i - F_0` PSD: `Y ⪰ 0`, `F_i • Y ≈ 0`, `F_0 • Y = 1`.
    PrimalInfeasible { y: Vec<BlockValue> },
    /// No dual-feasible `Y` exists: `Σ x_i F_i ⪰ 0` with `c·x = -1`.
    DualInfeasible { x: Vec<f64> },
}

/// Dense value of one block (row-major `n × n` for PSD blocks, length `n`
/// for diagonal blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockValue {
    pub kind: BlockKind,
    pub data: Vec<f64>,
}

impl BlockValue {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        match self.kind {
            BlockKind::Psd(n) => self.data[row * n + col],
            BlockKind::Diagonal(_) => {
                if row == col {
                    self.data[row]
                } else {
                    0.0
                }
            }
        }
    }

    /// Smallest eigenvalue of the block.
    pub fn min_eigenvalue(&self) -> f64 {
        match self.kind {
            BlockKind::Diagonal(_) => self.data.iter().copied().fold(f64::INFINITY, f64::min),
            BlockKind::Psd(n) => {
                let m = Mat::from_fn(n, n, |i, j| self.data[i * n + j]);
                min_eig(&m)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative duality gap `|p - d| / (1 + |p| + |d|)` required for `Optimal`.
    pub gap_tol: f64,
    /// Relative primal and dual residual required for `Optimal`.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Multiplier on the default starting point magnitude.
    pub initial_scale: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            max_iter: 200,
            initial_scale: 1.0,
            step_fraction: 0.98,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        SolverOptions {
            gap_tol: tol,
            feas_tol: (tol * 0.1).max(1e-12),
            ..Default::default()
        }
    }

    fn check(&self) -> Result<(), SdpError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.gap_tol) || !positive(self.feas_tol) {
            return Err(SdpError::InvalidOption("tolerances must be positive".into()));
        }
        if !positive(self.initial_scale) {
            return Err(SdpError::InvalidOption("initial scale must be positive".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(SdpError::InvalidOption("step fraction must lie in (0, 1)".into()));
        }
        if self.max_iter == 0 {
            return Err(SdpError::InvalidOption("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// `c·x` (SDPA primal objective, minimized).
    pub primal_value: f64,
    /// `F_0 • Y` (SDPA dual objective, maximized); a lower bound on the
    /// primal optimum whenever `Y` is dual feasible.
    pub dual_value: f64,
    pub x: Vec<f64>,
    /// `Σ x_i F_i - F_0` per block.
    pub slack: Vec<BlockValue>,
    /// `Y` per block.
    pub dual_matrix: Vec<BlockValue>,
    /// Relative duality gap at termination.
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
}

// ---------------------------------------------------------------------------
// block-diagonal symmetric matrices

#[derive(Clone)]
enum Blk {
    Dense(Mat<f64>),
    Diag(Vec<f64>),
}

type BlockMat = Vec<Blk>;

fn zeros_like(kinds: &[BlockKind]) -> BlockMat {
    kinds
        .iter()
        .map(|k| match *k {
            BlockKind::Psd(n) => Blk::Dense(Mat::zeros(n, n)),
            BlockKind::Diagonal(n) => Blk::Diag(vec![0.0; n]),
        })
        .collect()
}

fn identity_like(kinds: &[BlockKind], scales: &[f64]) -> BlockMat {
    kinds
        .iter()
        .zip(scales)
        .map(|(k, &s)| match *k {
            BlockKind::Psd(n) => Blk::Dense(Mat::from_fn(n, n, |i, j| if i == j { s } else { 0.0 })),
            BlockKind::Diagonal(n) => Blk::Diag(vec![s; n]),
        })
        .collect()
}

fn inner(a: &BlockMat, b: &BlockMat) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Blk::Dense(x), Blk::Dense(y)) => {
                let mut s = 0.0;
                for j in 0..x.ncols() {
                    for i in 0..x.nrows() {
                        s += x[(i, j)] * y[(i, j)];
                    }
                }
                s
            }
            (Blk::Diag(x), Blk::Diag(y)) => x.iter().zip(y).map(|(p, q)| p * q).sum(),
            _ => unreachable!("block kinds match"),
        })
        .sum()
}

fn norm(a: &BlockMat) -> f64 {
    inner(a, a).sqrt()
}

/// `a += alpha * b`
fn axpy(a: &mut BlockMat, alpha: f64, b: &BlockMat) {
    for (x, y) in a.iter_mut().zip(b) {
        match (x, y) {
            (Blk::Dense(x), Blk::Dense(y)) => {
                for j in 0..x.ncols() {
                    for i in 0..x.nrows() {
                        x[(i, j)] += alpha * y[(i, j)];
                    }
                }
            }
            (Blk::Diag(x), Blk::Diag(y)) => {
                for (p, q) in x.iter_mut().zip(y) {
                    *p += alpha * q;
                }
            }
            _ => unreachable!("block kinds match"),
        }
    }
}

fn sub(a: &BlockMat, b: &BlockMat) -> BlockMat {
    let mut out = a.clone();
    axpy(&mut out, -1.0, b);
    out
}

fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn min_eig(m: &Mat<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    match m.self_adjoint_eigenvalues(Side::Lower) {
        Ok(ev) => ev.first().copied().unwrap_or(f64::INFINITY),
        Err(_) => f64::NAN,
    }
}

fn to_values(kinds: &[BlockKind], m: &BlockMat) -> Vec<BlockValue> {
    kinds
        .iter()
        .zip(m)
        .map(|(k, b)| match b {
            Blk::Dense(d) => {
                let n = d.nrows();
                let mut data = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        data.push(d[(i, j)]);
                    }
                }
                BlockValue { kind: *k, data }
            }
            Blk::Diag(v) => BlockValue {
                kind: *k,
                data: v.clone(),
            },
        })
        .collect()
}

// ---------------------------------------------------------------------------
// constraint operator

/// Constraint matrix with off-diagonal entries expanded to both triangles.
struct SparseBlocks {
    /// Per block: (row, col, value), full symmetric expansion.
    per_block: Vec<Vec<(usize, usize, f64)>>,
}

impl SparseBlocks {
    fn from_sym(sym: &crate::problem::SymSparse, nblocks: usize, negate: bool) -> Self {
        let sign = if negate { -1.0 } else { 1.0 };
        let mut per_block = vec![Vec::new(); nblocks];
        for e in sym.normalized().entries() {
            per_block[e.block].push((e.row, e.col, sign * e.value));
            if e.row != e.col {
                per_block[e.block].push((e.col, e.row, sign * e.value));
            }
        }
        SparseBlocks { per_block }
    }

    fn dot(&self, m: &BlockMat) -> f64 {
        let mut s = 0.0;
        for (entries, blk) in self.per_block.iter().zip(m) {
            match blk {
                Blk::Dense(d) => {
                    for &(r, c, v) in entries {
                        s += v * d[(r, c)];
                    }
                }
                Blk::Diag(d) => {
                    for &(r, _, v) in entries {
                        s += v * d[r];
                    }
                }
            }
        }
        s
    }

    fn add_to(&self, alpha: f64, m: &mut BlockMat) {
        for (entries, blk) in self.per_block.iter().zip(m.iter_mut()) {
            match blk {
                Blk::Dense(d) => {
                    for &(r, c, v) in entries {
                        d[(r, c)] += alpha * v;
                    }
                }
                Blk::Diag(d) => {
                    for &(r, _, v) in entries {
                        d[r] += alpha * v;
                    }
                }
            }
        }
    }

    fn to_dense(&self, kinds: &[BlockKind]) -> BlockMat {
        let mut m = zeros_like(kinds);
        self.add_to(1.0, &mut m);
        m
    }
}

struct StandardForm {
    kinds: Vec<BlockKind>,
    c: BlockMat,
    a: Vec<SparseBlocks>,
    b: Vec<f64>,
}

impl StandardForm {
    fn new(p: &SdpProblem) -> Self {
        let nb = p.blocks.len();
        let c_sparse = SparseBlocks::from_sym(&p.constant, nb, true);
        StandardForm {
            kinds: p.blocks.clone(),
            c: c_sparse.to_dense(&p.blocks),
            a: p.coefficients
                .iter()
                .map(|f| SparseBlocks::from_sym(f, nb, false))
                .collect(),
            b: p.objective.clone(),
        }
    }

    fn apply(&self, x: &BlockMat) -> Vec<f64> {
        self.a.iter().map(|a| a.dot(x)).collect()
    }

    fn adjoint(&self, y: &[f64]) -> BlockMat {
        let mut m = zeros_like(&self.kinds);
        for (a, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                a.add_to(yi, &mut m);
            }
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling

enum Scale {
    /// `G` with `G^T Z G = G^{-1} X G^{-T} = diag(lambda)`; `W = G G^T`.
    Dense {
        g: Mat<f64>,
        g_inv: Mat<f64>,
        w: Mat<f64>,
        lambda: Vec<f64>,
    },
    /// Diagonal block: `g_k^2 = w_k = sqrt(x_k / z_k)`, `lambda_k = sqrt(x_k z_k)`.
    Diag { w: Vec<f64>, lambda: Vec<f64> },
}

fn nt_scaling(x: &BlockMat, z: &BlockMat) -> Option<Vec<Scale>> {
    let mut out = Vec::with_capacity(x.len());
    for (xb, zb) in x.iter().zip(z) {
        match (xb, zb) {
            (Blk::Dense(xm), Blk::Dense(zm)) => {
                let n = xm.nrows();
                let llt = xm.llt(Side::Lower).ok()?;
                let l = llt.L().to_owned();
                let ltzl = {
                    let mut t = l.transpose() * zm * &l;
                    symmetrize(&mut t);
                    t
                };
                let eig = ltzl.self_adjoint_eigen(Side::Lower).ok()?;
                let q = eig.U().to_owned();
                let s = eig.S().column_vector();
                let mut lambda = Vec::with_capacity(n);
                for i in 0..n {
                    let d = s[i];
                    if !(d > 0.0) || !d.is_finite() {
                        return None;
                    }
                    lambda.push(d.sqrt());
                }
                let lq = &l * &q;
                let g = Mat::from_fn(n, n, |i, j| lq[(i, j)] / lambda[j].sqrt());
                let mut l_inv = Mat::zeros(n, n);
                faer::linalg::triangular_inverse::invert_lower_triangular(
                    l_inv.as_mut(),
                    l.as_ref(),
                    faer::Par::Seq,
                );
                let qt_linv = q.transpose() * &l_inv;
                let g_inv = Mat::from_fn(n, n, |i, j| lambda[i].sqrt() * qt_linv[(i, j)]);
                let mut w = &g * g.transpose();
                symmetrize(&mut w);
                out.push(Scale::Dense { g, g_inv, w, lambda });
            }
            (Blk::Diag(xv), Blk::Diag(zv)) => {
                let mut w = Vec::with_capacity(xv.len());
                let mut lambda = Vec::with_capacity(xv.len());
                for (&xi, &zi) in xv.iter().zip(zv) {
                    if !(xi > 0.0 && zi > 0.0) {
                        return None;
                    }
                    w.push((xi / zi).sqrt());
                    lambda.push((xi * zi).sqrt());
                }
                out.push(Scale::Diag { w, lambda });
            }
            _ => unreachable!("block kinds match"),
        }
    }
    Some(out)
}

/// `W M W` blockwise.
fn w_sandwich(scales: &[Scale], m: &BlockMat) -> BlockMat {
    scales
        .iter()
        .zip(m)
        .map(|(s, b)| match (s, b) {
            (Scale::Dense { w, .. }, Blk::Dense(d)) => {
                let mut r = w * d * w;
                symmetrize(&mut r);
                Blk::Dense(r)
            }
            (Scale::Diag { w, .. }, Blk::Diag(d)) => {
                Blk::Diag(d.iter().zip(w).map(|(v, wi)| v * wi * wi).collect())
            }
            _ => unreachable!("block kinds match"),
        })
        .collect()
}

/// Maps a scaled-space matrix `V` back: `G V G^T`.
fn unscale_primal(scales: &[Scale], v: &BlockMat) -> BlockMat {
    scales
        .iter()
        .zip(v)
        .map(|(s, b)| match (s, b) {
            (Scale::Dense { g, .. }, Blk::Dense(d)) => {
                let mut r = g * d * g.transpose();
                symmetrize(&mut r);
                Blk::Dense(r)
            }
            (Scale::Diag { w, .. }, Blk::Diag(d)) => {
                Blk::Diag(d.iter().zip(w).map(|(v, wi)| v * wi).collect())
            }
            _ => unreachable!("block kinds match"),
        })
        .collect()
}

/// `G^{-1} dX G^{-T}` and `G^T dZ G`.
fn scale_pair(scales: &[Scale], dx: &BlockMat, dz: &BlockMat) -> (BlockMat, BlockMat) {
    let mut sx = Vec::with_capacity(dx.len());
    let mut sz = Vec::with_capacity(dz.len());
    for ((s, bx), bz) in scales.iter().zip(dx).zip(dz) {
        match (s, bx, bz) {
            (Scale::Dense { g, g_inv, .. }, Blk::Dense(x), Blk::Dense(z)) => {
                let mut a = g_inv * x * g_inv.transpose();
                symmetrize(&mut a);
                let mut b = g.transpose() * z * g;
                symmetrize(&mut b);
                sx.push(Blk::Dense(a));
                sz.push(Blk::Dense(b));
            }
            (Scale::Diag { w, .. }, Blk::Diag(x), Blk::Diag(z)) => {
                sx.push(Blk::Diag(x.iter().zip(w).map(|(v, wi)| v / wi).collect()));
                sz.push(Blk::Diag(z.iter().zip(w).map(|(v, wi)| v * wi).collect()));
            }
            _ => unreachable!("block kinds match"),
        }
    }
    (sx, sz)
}

/// Largest `alpha` keeping `diag(lambda) + alpha * d` PSD (scaled space).
fn max_step(scales: &[Scale], d: &BlockMat) -> f64 {
    let mut alpha = f64::INFINITY;
    for (s, b) in scales.iter().zip(d) {
        let lam_min = match (s, b) {
            (Scale::Dense { lambda, .. }, Blk::Dense(m)) => {
                let n = m.nrows();
                let t = Mat::from_fn(n, n, |i, j| m[(i, j)] / (lambda[i] * lambda[j]).sqrt());
                min_eig(&t)
            }
            (Scale::Diag { lambda, .. }, Blk::Diag(v)) => v
                .iter()
                .zip(lambda)
                .map(|(x, l)| x / l)
                .fold(f64::INFINITY, f64::min),
            _ => unreachable!("block kinds match"),
        };
        if lam_min.is_nan() {
            return 0.0;
        }
        if lam_min < 0.0 {
            alpha = alpha.min(-1.0 / lam_min);
        }
    }
    alpha
}

/// Scaled complementarity target `V` solving `Λ V + V Λ = 2σμ I - 2Λ² - H`,
/// where `H = dX̃ dZ̃ + dZ̃ dX̃` (omitted when `corr` is `None`).
fn complementarity_rhs(scales: &[Scale], sigma_mu: f64, corr: Option<(&BlockMat, &BlockMat)>) -> BlockMat {
    scales
        .iter()
        .enumerate()
        .map(|(k, s)| match s {
            Scale::Dense { lambda, .. } => {
                let n = lambda.len();
                let mut v = Mat::zeros(n, n);
                for i in 0..n {
                    v[(i, i)] = sigma_mu / lambda[i] - lambda[i];
                }
                if let Some((Blk::Dense(dx), Blk::Dense(dz))) = corr.map(|(a, b)| (&a[k], &b[k])) {
                    let h = dx * dz;
                    for j in 0..n {
                        for i in 0..n {
                            let hij = h[(i, j)] + h[(j, i)];
                            v[(i, j)] -= hij / (lambda[i] + lambda[j]);
                        }
                    }
                }
                Blk::Dense(v)
            }
            Scale::Diag { lambda, .. } => {
                let mut v: Vec<f64> = lambda.iter().map(|&l| sigma_mu / l - l).collect();
                if let Some((Blk::Diag(dx), Blk::Diag(dz))) = corr.map(|(a, b)| (&a[k], &b[k])) {
                    for i in 0..v.len() {
                        v[i] -= dx[i] * dz[i] / lambda[i];
                    }
                }
                Blk::Diag(v)
            }
        })
        .collect()
}

/// Schur complement `M_ij = Σ_blocks tr(A_i W A_j W)`, lower triangle filled.
fn schur_complement(sf: &StandardForm, scales: &[Scale]) -> Mat<f64> {
    let m = sf.a.len();
    let mut out = Mat::<f64>::zeros(m, m);
    for (bi, scale) in scales.iter().enumerate() {
        match scale {
            Scale::Dense { w, .. } => {
                let n = w.nrows();
                let active: Vec<usize> = (0..m).filter(|&i| !sf.a[i].per_block[bi].is_empty()).collect();
                let nnz: f64 = active.iter().map(|&i| sf.a[i].per_block[bi].len() as f64).sum();
                // Entry-pair loops cost about nnz² random reads; the dense
                // route costs one n³ product per active variable.
                let pair_cost = 2.0 * nnz * nnz;
                let dense_cost = active.len() as f64 * (0.25 * (n as f64).powi(3) + nnz);
                if dense_cost < pair_cost {
                    schur_block_dense(sf, bi, w, &active, &mut out);
                    continue;
                }
                for i in 0..m {
                    let ai = &sf.a[i].per_block[bi];
                    if ai.is_empty() {
                        continue;
                    }
                    for j in 0..=i {
                        let aj = &sf.a[j].per_block[bi];
                        if aj.is_empty() {
                            continue;
                        }
                        let mut s = 0.0;
                        for &(p, q, u) in ai {
                            let mut t = 0.0;
                            for &(r, c, v) in aj {
                                t += v * w[(q, r)] * w[(c, p)];
                            }
                            s += u * t;
                        }
                        out[(i, j)] += s;
                    }
                }
            }
            Scale::Diag { w, .. } => {
                for i in 0..m {
                    let ai = &sf.a[i].per_block[bi];
                    if ai.is_empty() {
                        continue;
                    }
                    for j in 0..=i {
                        let aj = &sf.a[j].per_block[bi];
                        for &(p, _, u) in ai {
                            for &(r, _, v) in aj {
                                if p == r {
                                    out[(i, j)] += u * v * w[p] * w[p];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Lower triangle of `M_ij += ⟨A_i, W A_j W⟩` through `T_i = W A_i W`.
fn schur_block_dense(sf: &StandardForm, bi: usize, w: &Mat<f64>, active: &[usize], out: &mut Mat<f64>) {
    let n = w.nrows();
    let mut aw = Mat::<f64>::zeros(n, n);
    let mut t = Mat::<f64>::zeros(n, n);
    for (ii, &i) in active.iter().enumerate() {
        let ai = &sf.a[i].per_block[bi];
        aw.fill(0.0);
        for &(p, q, v) in ai {
            for c in 0..n {
                aw[(p, c)] += v * w[(q, c)];
            }
        }
        faer::linalg::matmul::matmul(
            t.as_mut(),
            faer::Accum::Replace,
            w.as_ref(),
            aw.as_ref(),
            1.0,
            faer::Par::Seq,
        );
        for &j in &active[..=ii] {
            let mut s = 0.0;
            for &(r, c, v) in &sf.a[j].per_block[bi] {
                s += v * t[(r, c)];
            }
            out[(i, j)] += s;
        }
    }
}

struct Factored {
    /// Cholesky factor of `D M D + shift·I` with `D = diag(M)^{-1/2}`.
    l: Mat<f64>,
    /// Lower triangle of the unshifted `M`.
    m: Mat<f64>,
    d: Vec<f64>,
}

fn factor_schur(m: Mat<f64>) -> Option<Factored> {
    let n = m.nrows();
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let v = m[(i, i)];
            if v > 0.0 && v.is_finite() {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = Mat::from_fn(n, n, |i, j| {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        m[(r, c)] * d[r] * d[c]
    });
    let mut shift = 0.0;
    for attempt in 0..8 {
        if let Ok(llt) = scaled.llt(Side::Lower) {
            return Some(Factored {
                l: llt.L().to_owned(),
                m,
                d,
            });
        }
        let next = 1e-14 * 100f64.powi(attempt);
        for i in 0..n {
            scaled[(i, i)] += next - shift;
        }
        shift = next;
    }
    None
}

impl Factored {
    fn solve_factored(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut b = Mat::from_fn(n, 1, |i, _| rhs[i] * self.d[i]);
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(
            self.l.as_ref(),
            b.as_mut(),
            faer::Par::Seq,
        );
        faer::linalg::triangular_solve::solve_upper_triangular_in_place(
            self.l.transpose(),
            b.as_mut(),
            faer::Par::Seq,
        );
        (0..n).map(|i| b[(i, 0)] * self.d[i]).collect()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut out = vec![0.0; n];
        for j in 0..n {
            out[j] += self.m[(j, j)] * v[j];
            for i in j + 1..n {
                let a = self.m[(i, j)];
                out[i] += a * v[j];
                out[j] += a * v[i];
            }
        }
        out
    }

    /// Solve with a few steps of iterative refinement against the unshifted matrix.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        if rhs.is_empty() {
            return Vec::new();
        }
        let mut x = self.solve_factored(rhs);
        let target = vec_norm(rhs) * 1e-14;
        for _ in 0..3 {
            let mx = self.apply(&x);
            let r: Vec<f64> = rhs.iter().zip(&mx).map(|(b, a)| b - a).collect();
            if vec_norm(&r) <= target {
                break;
            }
            let dx = self.solve_factored(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        x
    }
}

struct Direction {
    dx: BlockMat,
    dy: Vec<f64>,
    dz: BlockMat,
}

fn direction(
    sf: &StandardForm,
    scales: &[Scale],
    schur: &Factored,
    r_p: &[f64],
    r_d: &BlockMat,
    v: &BlockMat,
) -> Direction {
    // dX + W dZ W = G V G^T,  dZ = R_d - A^T dy,  A(dX) = r_p
    let r_c = unscale_primal(scales, v);
    let w_rd_w = w_sandwich(scales, r_d);
    let a_rc = sf.apply(&r_c);
    let a_wrdw = sf.apply(&w_rd_w);
    let rhs: Vec<f64> = (0..r_p.len()).map(|i| r_p[i] - a_rc[i] + a_wrdw[i]).collect();
    let dy = schur.solve(&rhs);
    let mut dz = r_d.clone();
    axpy(&mut dz, -1.0, &sf.adjoint(&dy));
    let mut dx = r_c;
    axpy(&mut dx, -1.0, &w_sandwich(scales, &dz));
    Direction { dx, dy, dz }
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `problem`. Errors only for malformed input or options; numerical
/// trouble is reported through [`SolveStatus`].
pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    opts.check()?;
    let sf = StandardForm::new(problem);
    let m = sf.b.len();
    let kinds = sf.kinds.clone();

    let norm_b = vec_norm(&sf.b);
    let norm_c = norm(&sf.c);
    let a_norms: Vec<f64> = sf.a.iter().map(|a| norm(&a.to_dense(&kinds))).collect();
    let max_a = a_norms.iter().copied().fold(0.0, f64::max);

    // Starting point magnitudes follow the usual infeasible-start heuristics.
    let mut xi = Vec::with_capacity(kinds.len());
    let mut eta = Vec::with_capacity(kinds.len());
    for kind in &kinds {
        let n = kind.dim() as f64;
        let ratio = sf
            .b
            .iter()
            .zip(&a_norms)
            .map(|(b, a)| (1.0 + b.abs()) / (1.0 + a))
            .fold(0.0, f64::max);
        xi.push(opts.initial_scale * 10f64.max(n.sqrt()).max(n * ratio));
        eta.push(opts.initial_scale * 10f64.max(n.sqrt()).max((1.0 + max_a.max(norm_c)) / n.sqrt()));
    }
    let mut x = identity_like(&kinds, &xi);
    let mut z = identity_like(&kinds, &eta);
    let mut y = vec![0.0; m];
    let total_dim: f64 = kinds.iter().map(|k| k.dim() as f64).sum();

    let status;
    let mut certificate = None;
    let mut iterations = 0;
    let mut stalls = 0;
    let (mut gap, mut pinf, mut dinf);

    loop {
        let ax = sf.apply(&x);
        let r_p: Vec<f64> = sf.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let r_d = sub(&sub(&sf.c, &z), &sf.adjoint(&y));
        let pobj = inner(&sf.c, &x);
        let dobj: f64 = sf.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        pinf = vec_norm(&r_p) / (1.0 + norm_b);
        dinf = norm(&r_d) / (1.0 + norm_c);
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }

        // Farkas-type tests, normalized by the objective that diverges.
        let aty_z = {
            let mut t = sf.adjoint(&y);
            axpy(&mut t, 1.0, &z);
            t
        };
        if dobj > 0.0 && norm(&aty_z) / dobj < 1e-8 && dobj > 1e6 {
            status = SolveStatus::Infeasible;
            certificate = Some(Certificate::DualInfeasible {
                x: y.iter().map(|v| -v / dobj).collect(),
            });
            break;
        }
        if pobj < 0.0 && vec_norm(&ax) / -pobj < 1e-8 && -pobj > 1e6 {
            status = SolveStatus::Infeasible;
            let mut yy = x.clone();
            for b in &mut yy {
                match b {
                    Blk::Dense(d) => {
                        for j in 0..d.ncols() {
                            for i in 0..d.nrows() {
                                d[(i, j)] /= -pobj;
                            }
                        }
                    }
                    Blk::Diag(d) => d.iter_mut().for_each(|v| *v /= -pobj),
                }
            }
            certificate = Some(Certificate::PrimalInfeasible {
                y: to_values(&kinds, &yy),
            });
            break;
        }

        if iterations >= opts.max_iter {
            status = stalled_status(gap, pinf, dinf, opts);
            break;
        }
        iterations += 1;

        let mu = inner(&x, &z) / total_dim;
        let Some(scales) = nt_scaling(&x, &z) else {
            status = stalled_status(gap, pinf, dinf, opts);
            break;
        };
        let Some(schur) = factor_schur(schur_complement(&sf, &scales)) else {
            status = stalled_status(gap, pinf, dinf, opts);
            break;
        };

        // predictor
        let v_aff = complementarity_rhs(&scales, 0.0, None);
        let aff = direction(&sf, &scales, &schur, &r_p, &r_d, &v_aff);
        let (sdx, sdz) = scale_pair(&scales, &aff.dx, &aff.dz);
        let ap = max_step(&scales, &sdx).min(1.0);
        let ad = max_step(&scales, &sdz).min(1.0);
        let mut x_aff = x.clone();
        axpy(&mut x_aff, ap, &aff.dx);
        let mut z_aff = z.clone();
        axpy(&mut z_aff, ad, &aff.dz);
        let mu_aff = inner(&x_aff, &z_aff) / total_dim;
        let sigma = if mu > 0.0 {
            (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let sigma = sigma.max(if pinf.max(dinf) > 1e-2 { 0.1 } else { 0.0 });

        // corrector
        let v = complementarity_rhs(&scales, sigma * mu, Some((&sdx, &sdz)));
        let dir = direction(&sf, &scales, &schur, &r_p, &r_d, &v);
        let (sdx, sdz) = scale_pair(&scales, &dir.dx, &dir.dz);
        let tau = opts.step_fraction;
        let ap = (tau * max_step(&scales, &sdx)).min(1.0);
        let ad = (tau * max_step(&scales, &sdz)).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) || ap.max(ad) < 1e-10 {
            stalls += 1;
            if stalls > 3 {
                status = stalled_status(gap, pinf, dinf, opts);
                break;
            }
            continue;
        }
        axpy(&mut x, ap, &dir.dx);
        axpy(&mut z, ad, &dir.dz);
        for (yi, dyi) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * dyi;
        }
        if ap.min(ad) < 1e-6 {
            stalls += 1;
            if stalls > 20 {
                status = stalled_status(gap, pinf, dinf, opts);
                break;
            }
        }
    }

    let pobj = inner(&sf.c, &x);
    let dobj: f64 = sf.b.iter().zip(&y).map(|(b, y)| b * y).sum();
    Ok(SdpSolution {
        status,
        primal_value: -dobj,
        dual_value: -pobj,
        x: y.iter().map(|v| -v).collect(),
        slack: to_values(&kinds, &z),
        dual_matrix: to_values(&kinds, &x),
        gap,
        primal_infeasibility: dinf,
        dual_infeasibility: pinf,
        iterations,
        certificate,
    })
}

fn stalled_status(gap: f64, pinf: f64, dinf: f64, opts: &SolverOptions) -> SolveStatus {
    let loose = |t: f64| (t * 1e3).max(1e-6);
    if gap <= loose(opts.gap_tol) && pinf <= loose(opts.feas_tol) && dinf <= loose(opts.feas_tol) {
        SolveStatus::NearOptimal
    } else {
        SolveStatus::Failed
    }
}
