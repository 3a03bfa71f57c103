use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Uniform interior grid on `(0, extent_x) × (0, extent_y)`.
///
/// Unknowns are numbered `k = j·nx + i`, with `i` running along the first
/// coordinate; node `(i, j)` sits at `((i+1)·hx, (j+1)·hy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub extent_x: f64,
    pub extent_y: f64,
    pub hx: f64,
    pub hy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, extent_x: f64, extent_y: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidInput(
                "grid needs at least one interior node per direction".into(),
            ));
        }
        if !(extent_x > 0.0 && extent_y > 0.0) || !extent_x.is_finite() || !extent_y.is_finite() {
            return Err(Error::InvalidInput("grid extents must be positive".into()));
        }
        Ok(Self {
            nx,
            ny,
            extent_x,
            extent_y,
            hx: extent_x / (nx as f64 + 1.0),
            hy: extent_y / (ny as f64 + 1.0),
        })
    }

    pub fn unit_square(nx: usize, ny: usize) -> Result<Self> {
        Self::new(nx, ny, 1.0, 1.0)
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 1.0) * self.hx, (j as f64 + 1.0) * self.hy)
    }

    /// Node coordinates in unknown order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                let (x1, x2) = self.coords(i, j);
                (i, j, x1, x2)
            })
        })
    }
}

/// Five-point matrix of `v ↦ −∇·(w∇v)` scaled by `hx·hy`, with `w` sampled at
/// face midpoints and homogeneous Dirichlet data. Symmetric by construction.
pub fn weighted_laplacian(grid: &GridSpec, w: impl Fn(f64, f64) -> f64) -> SparseMatrix {
    let (hx, hy) = (grid.hx, grid.hy);
    let (ax, ay) = (hy / hx, hx / hy);
    let n = grid.n();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_offsets.push(0);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x1, x2) = grid.coords(i, j);
            // shared faces must see bitwise-identical midpoints for exact symmetry
            let (fi, fj) = (i as f64, j as f64);
            let west = ax * w((fi + 0.5) * hx, x2);
            let east = ax * w((fi + 1.5) * hx, x2);
            let south = ay * w(x1, (fj + 0.5) * hy);
            let north = ay * w(x1, (fj + 1.5) * hy);
            // column order: south, west, centre, east, north
            if j > 0 {
                col_indices.push(grid.index(i, j - 1));
                values.push(-south);
            }
            if i > 0 {
                col_indices.push(grid.index(i - 1, j));
                values.push(-west);
            }
            col_indices.push(grid.index(i, j));
            values.push(west + east + south + north);
            if i + 1 < grid.nx {
                col_indices.push(grid.index(i + 1, j));
                values.push(-east);
            }
            if j + 1 < grid.ny {
                col_indices.push(grid.index(i, j + 1));
                values.push(-north);
            }
            row_offsets.push(col_indices.len());
        }
    }
    SparseMatrix::from_csr(n, n, row_offsets, col_indices, values).expect("stencil assembly produces valid CSR")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_count() {
        let g = GridSpec::new(4, 9, 1.0, 2.0).unwrap();
        assert_eq!(g.n(), 36);
        assert!((g.hx - 0.2).abs() < 1e-15 && (g.hy - 0.2).abs() < 1e-15);
        assert!(GridSpec::new(0, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn laplacian_is_symmetric_with_full_diagonal() {
        let g = GridSpec::new(5, 4, 2.0, 1.0).unwrap();
        let a = weighted_laplacian(&g, |x, y| 1.0 + x * x + y);
        assert!(a.is_symmetric());
        assert!(a.diagonal_positions().iter().all(Option::is_some));
        // interior row has five entries
        assert_eq!(a.row(g.index(2, 2)).0.len(), 5);
    }

    #[test]
    fn dirichlet_laplacian_is_positive() {
        // Dirichlet Laplacian is positive definite: vᵀAv > 0 on a sample vector
        let g = GridSpec::unit_square(6, 6).unwrap();
        let a = weighted_laplacian(&g, |_, _| 1.0);
        let v: Vec<f64> = (0..g.n()).map(|k| ((k * 7 % 11) as f64) - 5.0).collect();
        let av = a.spmv(&v).unwrap();
        assert!(v.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>() > 0.0);
    }
}
