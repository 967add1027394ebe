//! Banded Cholesky factorization for the sparse symmetric operators built on a
//! [`Mesh`](crate::mesh::Mesh).
//!
//! Both mesh kinds number their nodes so that every edge couples indices at
//! most `mesh.bandwidth()` apart, which keeps the factor dense only inside a
//! narrow band.

use crate::error::{Error, Result};

/// Symmetric matrix given as a diagonal plus a list of off-diagonal entries
/// `(i, j, value)` with `i != j`; each pair is stored once.
#[derive(Debug, Clone)]
pub struct SymmetricSparse {
    pub diag: Vec<f64>,
    pub off: Vec<(usize, usize, f64)>,
}

impl SymmetricSparse {
    pub fn new(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds `weight * (e_a - e_b)(e_a - e_b)^T`, the Laplacian stencil of one edge.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: f64) {
        self.diag[a] += weight;
        self.diag[b] += weight;
        self.off.push((a, b, -weight));
    }

    pub fn bandwidth(&self) -> usize {
        self.off.iter().map(|&(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.diag[i] * x[i];
        }
        for &(i, j, v) in &self.off {
            y[i] += v * x[j];
            y[j] += v * x[i];
        }
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let diag = crate::sum::pairwise_sum(self.diag.iter().zip(x).map(|(d, xi)| d * xi * xi));
        let off = crate::sum::pairwise_sum(self.off.iter().map(|&(i, j, v)| 2.0 * v * x[i] * x[j]));
        diag + off
    }
}

/// Lower-triangular banded Cholesky factor `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // row i holds L[i][i-bw ..= i]; entries left of column 0 stay zero
    rows: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(matrix: &SymmetricSparse) -> Result<Self> {
        let n = matrix.len();
        let bw = matrix.bandwidth();
        let width = bw + 1;
        let mut rows = vec![0.0; n * width];
        // off-diagonal entries go to the lower triangle: row max(i,j), column min(i,j)
        for i in 0..n {
            rows[i * width + bw] = matrix.diag[i];
        }
        for &(i, j, v) in &matrix.off {
            let (r, c) = if i > j { (i, j) } else { (j, i) };
            rows[r * width + bw - (r - c)] += v;
        }

        for i in 0..n {
            let first = i.saturating_sub(bw);
            for j in first..=i {
                // dot of L[i][first..j] and L[j][first..j]
                let lo = first.max(j.saturating_sub(bw));
                let mut s = rows[i * width + bw - (i - j)];
                for k in lo..j {
                    s -= rows[i * width + bw - (i - k)] * rows[j * width + bw - (j - k)];
                }
                if i == j {
                    if s <= 1e-13 * matrix.diag[i].abs() || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    rows[i * width + bw] = s.sqrt();
                } else {
                    rows[i * width + bw - (i - j)] = s / rows[j * width + bw];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, width) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let first = i.saturating_sub(bw);
            let mut s = x[i];
            for k in first..i {
                s -= self.rows[i * width + bw - (i - k)] * x[k];
            }
            x[i] = s / self.rows[i * width + bw];
        }
        for i in (0..n).rev() {
            x[i] /= self.rows[i * width + bw];
            let xi = x[i];
            let first = i.saturating_sub(bw);
            for k in first..i {
                x[k] -= self.rows[i * width + bw - (i - k)] * xi;
            }
        }
    }
}
