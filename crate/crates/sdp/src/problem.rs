//! Block-diagonal semidefinite programs in SDPA convention.
//!
//! A problem with `m` scalar variables is
//!
//! ```text
//! (P)  minimize   c·x
//!      subject to S = x_1 F_1 + ... + x_m F_m - F_0  ⪰ 0
//!
//! (D)  maximize   F_0 • Y
//!      subject to F_i • Y = c_i   (i = 1..m),   Y ⪰ 0
//! ```
//!
//! where every `F_i` is block diagonal with the same block structure.
//! Diagonal blocks model linear inequalities.

use crate::error::SdpError;

/// Shape of one diagonal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Dense symmetric block constrained to be positive semidefinite.
    Psd(usize),
    /// Diagonal block: every diagonal entry must be nonnegative.
    Diagonal(usize),
}

impl BlockKind {
    pub fn dim(self) -> usize {
        match self {
            BlockKind::Psd(n) | BlockKind::Diagonal(n) => n,
        }
    }

    /// SDPA block-structure code (negative for diagonal blocks).
    pub fn sdpa_code(self) -> i64 {
        match self {
            BlockKind::Psd(n) => n as i64,
            BlockKind::Diagonal(n) => -(n as i64),
        }
    }

    pub fn from_sdpa_code(code: i64) -> Option<Self> {
        match code {
            0 => None,
            c if c > 0 => Some(BlockKind::Psd(c as usize)),
            c => Some(BlockKind::Diagonal(c.unsigned_abs() as usize)),
        }
    }
}

/// One upper-triangle nonzero of a symmetric block matrix (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse symmetric block-diagonal matrix, stored as upper-triangle entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymSparse {
    entries: Vec<Entry>,
}

impl SymSparse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` and its mirror. Indices are swapped into
    /// the upper triangle; repeated positions accumulate.
    pub fn add(&mut self, block: usize, row: usize, col: usize, value: f64) {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(Entry {
            block,
            row,
            col,
            value,
        });
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted by (block, row, col), duplicates merged, exact zeros dropped.
    pub fn normalized(&self) -> SymSparse {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| (a.block, a.row, a.col).cmp(&(b.block, b.row, b.col)));
        let mut out: Vec<Entry> = Vec::with_capacity(entries.len());
        for e in entries {
            match out.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value;
                }
                _ => out.push(e),
            }
        }
        out.retain(|e| e.value != 0.0);
        SymSparse { entries: out }
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> SymSparse {
        SymSparse {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    value: e.value * factor,
                    ..*e
                })
                .collect(),
        }
    }

    /// Frobenius norm of the full symmetric matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.normalized()
            .entries
            .iter()
            .map(|e| {
                let w = if e.row == e.col { 1.0 } else { 2.0 };
                w * e.value * e.value
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// A semidefinite program in SDPA convention; see the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<BlockKind>,
    /// Primal cost vector `c`, one entry per variable (the SDPA right-hand side line).
    pub objective: Vec<f64>,
    /// `F_0` (SDPA matrix number 0).
    pub constant: SymSparse,
    /// `F_1 .. F_m`.
    pub coefficients: Vec<SymSparse>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<BlockKind>) -> Self {
        SdpProblem {
            blocks,
            objective: Vec::new(),
            constant: SymSparse::new(),
            coefficients: Vec::new(),
        }
    }

    /// Appends a variable with cost `cost` and coefficient matrix `matrix`;
    /// returns its 0-based index.
    pub fn add_variable(&mut self, cost: f64, matrix: SymSparse) -> usize {
        self.objective.push(cost);
        self.coefficients.push(matrix);
        self.objective.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    /// Checks block bounds, diagonal-block shape and finiteness.
    pub fn validate(&self) -> Result<(), SdpError> {
        if self.blocks.is_empty() {
            return Err(SdpError::Malformed("no blocks".into()));
        }
        if let Some(pos) = self.blocks.iter().position(|b| b.dim() == 0) {
            return Err(SdpError::Malformed(format!("block {} has size 0", pos + 1)));
        }
        if self.objective.len() != self.coefficients.len() {
            return Err(SdpError::Malformed(format!(
                "{} costs but {} coefficient matrices",
                self.objective.len(),
                self.coefficients.len()
            )));
        }
        if let Some(i) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(SdpError::Malformed(format!("cost {} is not finite", i + 1)));
        }
        let all = std::iter::once(&self.constant).chain(self.coefficients.iter());
        for (matno, mat) in all.enumerate() {
            for e in mat.entries() {
                let kind = self.blocks.get(e.block).ok_or_else(|| {
                    SdpError::Malformed(format!("matrix {matno}: block {} out of range", e.block + 1))
                })?;
                if e.col >= kind.dim() || e.row > e.col {
                    return Err(SdpError::Malformed(format!(
                        "matrix {matno}: entry ({}, {}) outside block {} of size {}",
                        e.row + 1,
                        e.col + 1,
                        e.block + 1,
                        kind.dim()
                    )));
                }
                if matches!(kind, BlockKind::Diagonal(_)) && e.row != e.col {
                    return Err(SdpError::Malformed(format!(
                        "matrix {matno}: off-diagonal entry in diagonal block {}",
                        e.block + 1
                    )));
                }
                if !e.value.is_finite() {
                    return Err(SdpError::Malformed(format!("matrix {matno}: non-finite entry")));
                }
            }
        }
        Ok(())
    }

    /// Same problem with every matrix normalized. Two problems are
    /// structurally equal when their normal forms compare equal.
    pub fn normalized(&self) -> SdpProblem {
        SdpProblem {
            blocks: self.blocks.clone(),
            objective: self.objective.clone(),
            constant: self.constant.normalized(),
            coefficients: self.coefficients.iter().map(SymSparse::normalized).collect(),
        }
    }

    pub fn structurally_eq(&self, other: &SdpProblem) -> bool {
        self.normalized() == other.normalized()
    }

    /// Returns a copy with the variables permuted: variable `i` of the result
    /// is variable `order[i]` of `self`.
    pub fn permute_variables(&self, order: &[usize]) -> SdpProblem {
        SdpProblem {
            blocks: self.blocks.clone(),
            objective: order.iter().map(|&i| self.objective[i]).collect(),
            constant: self.constant.clone(),
            coefficients: order.iter().map(|&i| self.coefficients[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_merges_and_orders() {
        let mut a = SymSparse::new();
        a.add(0, 1, 0, 2.0);
        a.add(0, 0, 0, 1.0);
        a.add(0, 0, 1, -2.0);
        let n = a.normalized();
        assert_eq!(
            n.entries(),
            &[Entry {
                block: 0,
                row: 0,
                col: 0,
                value: 1.0
            }]
        );
    }

    #[test]
    fn validate_rejects_out_of_block_entries() {
        let mut p = SdpProblem::new(vec![BlockKind::Psd(2)]);
        let mut f = SymSparse::new();
        f.add(0, 0, 2, 1.0);
        p.add_variable(1.0, f);
        assert!(p.validate().is_err());

        let mut q = SdpProblem::new(vec![BlockKind::Diagonal(2)]);
        let mut g = SymSparse::new();
        g.add(0, 0, 1, 1.0);
        q.add_variable(1.0, g);
        assert!(q.validate().is_err());
    }

    #[test]
    fn sdpa_codes_round_trip() {
        for kind in [BlockKind::Psd(3), BlockKind::Diagonal(4)] {
            assert_eq!(BlockKind::from_sdpa_code(kind.sdpa_code()), Some(kind));
        }
        assert_eq!(BlockKind::from_sdpa_code(0), None);
    }
}
