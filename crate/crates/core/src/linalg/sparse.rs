//! Compressed-sparse-row storage and the handful of kernels the solvers need.

use std::io::{self, Write};

use crate::error::{check_len, Error, Result};

/// Real matrix in compressed-sparse-row form.
///
/// Column indices are strictly increasing inside every row and all stored
/// values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_len(n_rows + 1, row_offsets.len())?;
        check_len(col_indices.len(), values.len())?;
        if row_offsets[0] != 0 || row_offsets[n_rows] != col_indices.len() {
            return Err(Error::InvalidInput("row offsets do not span the entries".into()));
        }
        for row in 0..n_rows {
            let (start, end) = (row_offsets[row], row_offsets[row + 1]);
            if start > end {
                return Err(Error::InvalidInput("row offsets must be nondecreasing".into()));
            }
            let cols = &col_indices[start..end];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsortedIndices);
            }
            if let Some(&c) = cols.last() {
                if c >= n_cols {
                    return Err(Error::IndexOutOfRange { index: c, dim: n_cols });
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix values"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from unordered `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= n_rows {
                return Err(Error::IndexOutOfRange { index: r, dim: n_rows });
            }
            if c >= n_cols {
                return Err(Error::IndexOutOfRange { index: c, dim: n_cols });
            }
        }
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::from_csr(n_rows, n_cols, row_offsets, col_indices, values)
    }

    /// Row-major dense input; exact zeros are dropped from the pattern.
    pub fn from_dense(n_rows: usize, n_cols: usize, data: &[f64]) -> Result<Self> {
        check_len(n_rows * n_cols, data.len())?;
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for r in 0..n_rows {
            for c in 0..n_cols {
                let v = data[r * n_cols + c];
                if v != 0.0 {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self::from_csr(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_csr(
            d.len(),
            d.len(),
            (0..=d.len()).collect(),
            (0..d.len()).collect(),
            d.to_vec(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Entry lookup by binary search; absent positions read as zero.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|k| vals[k]).unwrap_or(0.0)
    }

    /// Position of the diagonal entry of each row, if stored.
    pub fn diagonal_positions(&self) -> Vec<Option<usize>> {
        (0..self.n_rows)
            .map(|r| {
                let start = self.row_offsets[r];
                self.row(r).0.binary_search(&r).ok().map(|k| start + k)
            })
            .collect()
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|r| self.get(r, r)).collect()
    }

    /// y = A x.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_cols, x.len())?;
        let mut y = vec![0.0; self.n_rows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// y = A x into a caller buffer. Panics on length mismatch.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// y = Aᵀ x without forming the transpose.
    pub fn spmv_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_rows, x.len())?;
        let mut y = vec![0.0; self.n_cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xr;
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.n_cols {
            counts[c + 1] += counts[c];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                col_indices[next[c]] = r;
                values[next[c]] = v;
                next[c] += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Submatrix with the given (strictly increasing) rows and columns.
    pub fn extract_submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        validate_index_list(rows, self.n_rows)?;
        validate_index_list(cols, self.n_cols)?;
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for &r in rows {
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                let mapped = col_map[c];
                if mapped != usize::MAX {
                    col_indices.push(mapped);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols: cols.len(),
            row_offsets,
            col_indices,
            values,
        })
    }

    /// A + diag(d); every diagonal position ends up in the pattern.
    pub fn add_diagonal(&self, d: &[f64]) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: self.n_cols,
            });
        }
        check_len(self.n_rows, d.len())?;
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("diagonal shift"));
        }
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::with_capacity(self.nnz() + self.n_rows);
        let mut values = Vec::with_capacity(self.nnz() + self.n_rows);
        row_offsets.push(0);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            let mut placed = false;
            for (&c, &v) in cols.iter().zip(vals) {
                if !placed && c >= r {
                    if c == r {
                        col_indices.push(c);
                        values.push(v + d[r]);
                        placed = true;
                        continue;
                    }
                    col_indices.push(r);
                    values.push(d[r]);
                    placed = true;
                }
                col_indices.push(c);
                values.push(v);
            }
            if !placed {
                col_indices.push(r);
                values.push(d[r]);
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// diag(s) A: every row r multiplied by s[r].
    pub fn scale_rows(&self, s: &[f64]) -> Result<Self> {
        check_len(self.n_rows, s.len())?;
        let mut out = self.clone();
        for r in 0..self.n_rows {
            let range = self.row_offsets[r]..self.row_offsets[r + 1];
            for v in &mut out.values[range] {
                *v *= s[r];
            }
        }
        if out.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("row scaling"));
        }
        Ok(out)
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.n_cols];
        for (&c, &v) in self.col_indices.iter().zip(&self.values) {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Induced ∞-norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n_rows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows * self.n_cols];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[r * self.n_cols + c] = v;
            }
        }
        out
    }

    /// Replaces the stored values, keeping the pattern.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        check_len(self.nnz(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix values"));
        }
        Ok(Self { values, ..self.clone() })
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.row_offsets == other.row_offsets
            && self.col_indices == other.col_indices
    }

    /// MatrixMarket coordinate output with 1-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}

fn validate_index_list(idx: &[usize], dim: usize) -> Result<()> {
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedIndices);
    }
    match idx.last() {
        Some(&last) if last >= dim => Err(Error::IndexOutOfRange { index: last, dim }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag() -> SparseMatrix {
        SparseMatrix::from_dense(3, 3, &[4.0, 1.0, 0.0, 1.0, 4.0, 1.0, 0.0, 1.0, 4.0]).unwrap()
    }

    #[test]
    fn spmv_examples() {
        assert_eq!(
            SparseMatrix::identity(3).spmv(&[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        let d = SparseMatrix::diagonal(&[2.0, 4.0]).unwrap();
        assert_eq!(d.spmv(&[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(tridiag().spmv(&[1.0, 0.0, 0.0]).unwrap(), vec![4.0, 1.0, 0.0]);
        assert!(matches!(d.spmv(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spmv_transpose_examples() {
        let a = SparseMatrix::from_dense(2, 2, &[4.0, 1.0, 1.0, 4.0]).unwrap();
        assert_eq!(a.spmv_transpose(&[1.0, 2.0]).unwrap(), vec![6.0, 9.0]);
        let b = SparseMatrix::from_dense(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(b.spmv_transpose(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert!(b.spmv_transpose(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn extract_examples() {
        let a = tridiag();
        let s = a.extract_submatrix(&[0, 2], &[0, 2]).unwrap();
        assert_eq!(s.to_dense(), vec![4.0, 0.0, 0.0, 4.0]);
        assert_eq!(a.extract_submatrix(&[0, 1, 2], &[0, 1, 2]).unwrap(), a);
        assert!(matches!(
            a.extract_submatrix(&[0, 3], &[0]),
            Err(Error::IndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            a.extract_submatrix(&[1, 0], &[0]),
            Err(Error::UnsortedIndices)
        ));
    }

    #[test]
    fn add_diagonal_examples() {
        let z = SparseMatrix::zeros(2, 2);
        assert_eq!(
            z.add_diagonal(&[3.0, 4.0]).unwrap().to_dense(),
            vec![3.0, 0.0, 0.0, 4.0]
        );
        let ones = SparseMatrix::from_dense(2, 2, &[1.0; 4]).unwrap();
        let same = ones.add_diagonal(&[0.0, 0.0]).unwrap();
        assert_eq!(same.to_dense(), vec![1.0; 4]);
        // off-diagonal-only pattern gains the diagonal in sorted position
        let off = SparseMatrix::from_dense(3, 3, &[0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0]).unwrap();
        let shifted = off.add_diagonal(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(shifted.nnz(), 7);
        assert!(shifted.diagonal_positions().iter().all(Option::is_some));
        assert_eq!(shifted.to_dense(), vec![1.0, 1.0, 0.0, 2.0, 1.0, 3.0, 0.0, 4.0, 1.0]);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseMatrix::from_triplets(2, 2, &[(1, 1, 2.0), (0, 0, 1.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.to_dense(), vec![1.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn rejects_bad_csr() {
        assert!(SparseMatrix::from_csr(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::from_csr(1, 1, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn norms() {
        let a = SparseMatrix::from_dense(2, 2, &[1.0, -2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.norm_one(), 6.0);
        assert_eq!(a.norm_inf(), 7.0);
    }

    #[test]
    fn matrix_market_header() {
        let mut buf = Vec::new();
        SparseMatrix::diagonal(&[2.5, 1.0])
            .unwrap()
            .write_matrix_market(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 2.5\n2 2 1\n"
        );
    }
}
