//! Linear solvers: sparse symmetric conjugate gradients (Jacobi
//! preconditioned) and a small dense LU for the 2g x 2g wedge systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("conjugate gradients stalled at relative residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix is singular")]
    Singular,
}

/// Symmetric sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Assemble from triplets (duplicates are summed). Only the entries
    /// given are stored; symmetry is the caller's responsibility.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (r, c, v) in triplets {
            rows[r as usize].push((c, v));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = 0.0;
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        CsrMatrix {
            n,
            offsets,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.offsets[r]..self.offsets[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.offsets[r]..self.offsets[r + 1] {
                if self.cols[k] as usize == r {
                    d[r] = self.vals[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// systems. Convergence criterion is `|r| <= rel_tol * |b|`.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, SolveError> {
    let n = a.n();
    let norm_b = math::sqrt(dot(b, b));
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let target = rel_tol * norm_b;

    for it in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolveError::NoConvergence {
                iterations: it,
                residual: math::sqrt(dot(&r, &r)) / norm_b,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let norm_r = math::sqrt(dot(&r, &r));
        if norm_r <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolveError::NoConvergence {
        iterations: max_iter,
        residual: math::sqrt(dot(&r, &r)) / norm_b,
    })
}

/// Solve a small dense system in place (Gaussian elimination with partial
/// pivoting).
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, SolveError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                math::abs(a[i][col]).partial_cmp(&math::abs(a[j][col])).unwrap()
            })
            .ok_or(SolveError::Singular)?;
        if math::abs(a[pivot][col]) < 1e-300 {
            return Err(SolveError::Singular);
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for c in col..n {
                    a[row][c] -= factor * a[col][c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cg_solves_small_spd_system() {
        // 1D Laplacian with Dirichlet ends: tridiag(-1, 2, -1).
        let n = 50;
        let mut trip = Vec::new();
        for i in 0..n as u32 {
            trip.push((i, i, 2.0));
            if i + 1 < n as u32 {
                trip.push((i, i + 1, -1.0));
                trip.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, trip);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let x = conjugate_gradient(&a, &b, 1e-12, 10 * n).unwrap();
        let err = x
            .iter()
            .zip(&x_true)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "max err {err}");
    }

    #[test]
    fn cg_zero_rhs_returns_zero() {
        let a = CsrMatrix::from_triplets(3, [(0u32, 0u32, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        let x = conjugate_gradient(&a, &[0.0, 0.0, 0.0], 1e-10, 10).unwrap();
        assert_eq!(x, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn dense_solve_roundtrip() {
        let a = vec![
            vec![0.0, 2.0, 1.0],
            vec![3.0, 0.0, -1.0],
            vec![1.0, 1.0, 1.0],
        ];
        let x_true = vec![1.0, -2.0, 3.0];
        let b: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(&x_true).map(|(a, x)| a * x).sum())
            .collect();
        let x = dense_solve(a, b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_detects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(dense_solve(a, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn triplets_merge_duplicates() {
        let a = CsrMatrix::from_triplets(2, [(0u32, 0u32, 1.0), (0, 0, 2.5), (1, 1, 1.0)]);
        assert_eq!(a.diagonal(), vec![3.5, 1.0]);
    }
}
