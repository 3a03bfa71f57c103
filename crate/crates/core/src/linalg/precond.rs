//! Preconditioners: identity, Jacobi, ILU(0) and block Jacobi with ILU(0) blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Relative size of the pivot substituted for a zero ILU(0) pivot.
pub const ILU_PIVOT_FLOOR: f64 = 1e-12;

/// Default number of diagonal blocks for block Jacobi.
pub const DEFAULT_BLOCK_COUNT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerKind {
    Identity,
    Jacobi,
    Ilu0,
    BlockJacobiIlu0(usize),
}

/// Incomplete LU factors stored on the pattern of the input matrix.
///
/// The strictly lower part holds the unit-lower factor L, the upper part
/// (including the diagonal) holds U. The diagonal is kept separately so a
/// pattern without structural diagonal entries can still be factored.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    matrix: SparseMatrix,
    diag: Vec<f64>,
    // first entry with column > row, per row
    upper_start: Vec<usize>,
    perturbed_pivots: usize,
}

impl Ilu0 {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.n_rows(),
                found: a.n_cols(),
            });
        }
        let n = a.n_rows();
        let offsets = a.row_offsets().to_vec();
        let cols = a.col_indices().to_vec();
        let mut vals = a.values().to_vec();
        let floor = ILU_PIVOT_FLOOR * a.norm_inf().max(f64::MIN_POSITIVE);
        let mut diag = vec![0.0; n];
        let mut upper_start = vec![0usize; n];
        let mut perturbed = 0usize;
        // position of column c in the current row, or usize::MAX
        let mut marker = vec![usize::MAX; n];

        for i in 0..n {
            let (start, end) = (offsets[i], offsets[i + 1]);
            for p in start..end {
                marker[cols[p]] = p;
            }
            let mut diag_val = marker
                .get(i)
                .copied()
                .filter(|&p| p != usize::MAX)
                .map(|p| vals[p])
                .unwrap_or(0.0);
            let mut p = start;
            while p < end && cols[p] < i {
                let k = cols[p];
                let lik = vals[p] / diag[k];
                vals[p] = lik;
                for q in upper_start[k]..offsets[k + 1] {
                    let j = cols[q];
                    let target = marker[j];
                    if target != usize::MAX {
                        if j == i {
                            diag_val -= lik * vals[q];
                        } else {
                            vals[target] -= lik * vals[q];
                        }
                    }
                }
                p += 1;
            }
            if p < end && cols[p] == i {
                p += 1;
            }
            upper_start[i] = p;
            if diag_val == 0.0 || !diag_val.is_finite() {
                diag_val = floor;
                perturbed += 1;
            }
            diag[i] = diag_val;
            for q in start..end {
                marker[cols[q]] = usize::MAX;
            }
        }
        let matrix = a.with_values(vals).map_err(|_| Error::NonFinite("ILU(0) factors"))?;
        Ok(Self {
            matrix,
            diag,
            upper_start,
            perturbed_pivots: perturbed,
        })
    }

    pub fn perturbed_pivots(&self) -> usize {
        self.perturbed_pivots
    }

    /// z = (LU)⁻¹ r.
    pub fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let n = self.diag.len();
        let offsets = self.matrix.row_offsets();
        let cols = self.matrix.col_indices();
        let vals = self.matrix.values();
        for i in 0..n {
            let mut s = r[i];
            let mut p = offsets[i];
            while p < offsets[i + 1] && cols[p] < i {
                s -= vals[p] * z[cols[p]];
                p += 1;
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for p in self.upper_start[i]..offsets[i + 1] {
                s -= vals[p] * z[cols[p]];
            }
            z[i] = s / self.diag[i];
        }
    }
}

#[derive(Debug, Clone)]
enum Factors {
    Identity,
    Jacobi(Vec<f64>),
    Ilu0(Ilu0),
    BlockJacobi(Vec<(usize, Ilu0)>),
}

/// A linear, fixed preconditioning operator M⁻¹.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    kind: PreconditionerKind,
    dim: usize,
    factors: Factors,
}

impl Preconditioner {
    pub fn build(kind: PreconditionerKind, a: &SparseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.n_rows(),
                found: a.n_cols(),
            });
        }
        let n = a.n_rows();
        let factors = match kind {
            PreconditionerKind::Identity => Factors::Identity,
            PreconditionerKind::Jacobi => {
                let d = a.diagonal_values();
                let mut inv = Vec::with_capacity(n);
                for (i, v) in d.into_iter().enumerate() {
                    if v == 0.0 {
                        return Err(Error::ZeroDiagonal(i));
                    }
                    inv.push(1.0 / v);
                }
                Factors::Jacobi(inv)
            }
            PreconditionerKind::Ilu0 => Factors::Ilu0(Ilu0::factor(a)?),
            PreconditionerKind::BlockJacobiIlu0(blocks) => {
                if blocks == 0 {
                    return Err(Error::InvalidInput("block count must be positive".into()));
                }
                let mut out = Vec::new();
                for range in block_ranges(n, blocks) {
                    let idx: Vec<usize> = range.clone().collect();
                    let sub = a.extract_submatrix(&idx, &idx)?;
                    out.push((range.start, Ilu0::factor(&sub)?));
                }
                Factors::BlockJacobi(out)
            }
        };
        Ok(Self { kind, dim: n, factors })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            kind: PreconditionerKind::Identity,
            dim: n,
            factors: Factors::Identity,
        }
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of zero pivots replaced during incomplete factorization.
    pub fn perturbed_pivots(&self) -> usize {
        match &self.factors {
            Factors::Ilu0(f) => f.perturbed_pivots(),
            Factors::BlockJacobi(bs) => bs.iter().map(|(_, f)| f.perturbed_pivots()).sum(),
            _ => 0,
        }
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; r.len()];
        self.apply_into(r, &mut z);
        z
    }

    pub fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        assert_eq!(r.len(), self.dim);
        assert_eq!(z.len(), self.dim);
        match &self.factors {
            Factors::Identity => z.copy_from_slice(r),
            Factors::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
            Factors::Ilu0(f) => f.apply_into(r, z),
            Factors::BlockJacobi(blocks) => {
                for (start, f) in blocks {
                    let len = f.diag.len();
                    f.apply_into(&r[*start..start + len], &mut z[*start..start + len]);
                }
            }
        }
    }
}

/// Splits `0..n` into `blocks` contiguous ranges whose sizes differ by at most one.
pub fn block_ranges(n: usize, blocks: usize) -> Vec<std::ops::Range<usize>> {
    let blocks = blocks.min(n).max(1);
    let (base, extra) = (n / blocks, n % blocks);
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}
