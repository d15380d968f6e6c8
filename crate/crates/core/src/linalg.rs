//! Small linear-algebra layer: sparse rows, a cached dense LU for small
//! systems, preconditioned CG for reversible systems and Gauss-Seidel for the
//! rest, plus the Lawson-Hanson active-set NNLS used by the representation
//! solves.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

/// Systems with at most this many unknowns are factored densely.
pub const DENSE_LIMIT: usize = 1500;

/// Relative residual target of the iterative solvers.
pub const ITERATIVE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Singular,
    NoConvergence { iterations: usize, residual: f64 },
}

/// Square sparse matrix stored row by row, columns ascending.
#[derive(Debug, Clone, Default)]
pub struct SparseRows {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    pub fn new(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
        }
        SparseRows { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> SparseRows {
        let mut rows = vec![Vec::new(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                rows[j].push((i, a));
            }
        }
        SparseRows::new(rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] += a;
            }
        }
        m
    }

    fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .filter(|&&(j, _)| j == i)
                    .map(|&(_, a)| a)
                    .sum()
            })
            .collect()
    }
}

type Lu = nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

/// A square system `A x = b` solved repeatedly with different right-hand
/// sides. When `symmetrizer` is present, `diag(m) A` is symmetric positive
/// definite and CG is used above [`DENSE_LIMIT`].
#[derive(Debug)]
pub struct LinearSystem {
    a: SparseRows,
    symmetrizer: Option<Vec<f64>>,
    lu: OnceLock<Option<Lu>>,
    lu_t: OnceLock<Option<Lu>>,
    a_t: OnceLock<SparseRows>,
}

impl LinearSystem {
    pub fn new(a: SparseRows, symmetrizer: Option<Vec<f64>>) -> Self {
        LinearSystem {
            a,
            symmetrizer,
            lu: OnceLock::new(),
            lu_t: OnceLock::new(),
            a_t: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &SparseRows {
        &self.a
    }

    pub fn is_dense(&self) -> bool {
        self.dim() <= DENSE_LIMIT
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        if self.is_dense() {
            let lu = self.lu.get_or_init(|| Some(self.a.to_dense().lu()));
            return dense_solve(lu.as_ref(), b);
        }
        match &self.symmetrizer {
            Some(m) => conjugate_gradient(&self.a, m, b),
            None => gauss_seidel(&self.a, b),
        }
    }

    /// Solves `Aᵀ y = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        if self.is_dense() {
            let lu = self
                .lu_t
                .get_or_init(|| Some(self.a.to_dense().transpose().lu()));
            return dense_solve(lu.as_ref(), b);
        }
        match &self.symmetrizer {
            // diag(m) A symmetric gives Aᵀ = diag(m) A diag(m)⁻¹.
            Some(m) => {
                let scaled: Vec<f64> = b.iter().zip(m).map(|(bi, mi)| bi / mi).collect();
                let z = conjugate_gradient(&self.a, m, &scaled)?;
                Ok(z.iter().zip(m).map(|(zi, mi)| zi * mi).collect())
            }
            None => {
                let at = self.a_t.get_or_init(|| self.a.transpose());
                gauss_seidel(at, b)
            }
        }
    }

    /// Dense inverse, used for Green matrices of small spaces.
    pub fn inverse(&self) -> Result<DMatrix<f64>, SolveError> {
        let inv = self
            .a
            .to_dense()
            .try_inverse()
            .ok_or(SolveError::Singular)?;
        if inv.iter().all(|v| v.is_finite()) {
            Ok(inv)
        } else {
            Err(SolveError::Singular)
        }
    }
}

fn dense_solve(lu: Option<&Lu>, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let lu = lu.ok_or(SolveError::Singular)?;
    let rhs = DVector::from_column_slice(b);
    let x = lu.solve(&rhs).ok_or(SolveError::Singular)?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x.as_slice().to_vec())
    } else {
        Err(SolveError::Singular)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG on `diag(m) A x = diag(m) b`.
fn conjugate_gradient(a: &SparseRows, m: &[f64], b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = a.dim();
    let diag: Vec<f64> = a.diagonal().iter().zip(m).map(|(d, mi)| d * mi).collect();
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(SolveError::Singular);
    }
    let rhs: Vec<f64> = b.iter().zip(m).map(|(bi, mi)| bi * mi).collect();
    let scale = inf_norm(&rhs);
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let max_iter = 20 * n + 1000;
    for _ in 0..max_iter {
        let ap = a.mul(&p);
        let q: Vec<f64> = ap.iter().zip(m).map(|(v, mi)| v * mi).collect();
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(SolveError::Singular);
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if inf_norm(&r) <= ITERATIVE_TOL * scale {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolveError::NoConvergence {
        iterations: max_iter,
        residual: inf_norm(&r) / scale,
    })
}

fn gauss_seidel(a: &SparseRows, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = a.dim();
    let diag = a.diagonal();
    if diag.as_slice().contains(&0.0) {
        return Err(SolveError::Singular);
    }
    let scale = inf_norm(b).max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    let max_sweeps = 1_000_000;
    let mut residual = f64::INFINITY;
    for sweep in 0..max_sweeps {
        for i in 0..n {
            let mut s = b[i];
            for &(j, aij) in a.row(i) {
                if j != i {
                    s -= aij * x[j];
                }
            }
            x[i] = s / diag[i];
        }
        if sweep % 16 == 15 || n < 64 {
            let ax = a.mul(&x);
            residual = ax
                .iter()
                .zip(b)
                .fold(0.0_f64, |acc, (u, v)| acc.max((u - v).abs()))
                / scale;
            if residual <= ITERATIVE_TOL {
                return Ok(x);
            }
            if !residual.is_finite() {
                return Err(SolveError::Singular);
            }
        }
    }
    Err(SolveError::NoConvergence {
        iterations: max_sweeps,
        residual,
    })
}

/// Least-squares solution of `a x ≈ b` restricted to the columns in `cols`.
fn subset_least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(cols);
    let svd = sub.svd(true, true);
    svd.solve(b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols.len()))
}

/// Lawson-Hanson non-negative least squares: minimizes `‖a x − b‖₂` over
/// `x ≥ 0`. Returns the minimizer and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * a.amax().max(1.0) * b.amax().max(1.0) * (n as f64);
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else { break };
        if w[t] <= tol {
            break;
        }
        passive[t] = true;

        loop {
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let s_p = subset_least_squares(a, b, &cols);
            if s_p.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &j) in cols.iter().enumerate() {
                    x[j] = s_p[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in cols.iter().enumerate() {
                if s_p[k] <= 0.0 {
                    let denom = x[j] - s_p[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in cols.iter().enumerate() {
                x[j] += alpha * (s_p[k] - x[j]);
            }
            for &j in &cols {
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Numerical rank by singular values relative to the largest.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_matrix(n: usize) -> SparseRows {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 1.0)];
                if i > 0 {
                    r.push((i - 1, -0.5));
                }
                if i + 1 < n {
                    r.push((i + 1, -0.5));
                }
                r
            })
            .collect();
        SparseRows::new(rows)
    }

    #[test]
    fn iterative_solvers_agree_with_dense() {
        let a = path_matrix(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let dense = dense_solve(Some(&a.to_dense().lu()), &b).unwrap();
        let cg = conjugate_gradient(&a, &vec![1.0; 40], &b).unwrap();
        let gs = gauss_seidel(&a, &b).unwrap();
        for i in 0..40 {
            assert!((dense[i] - cg[i]).abs() < 1e-9);
            assert!((dense[i] - gs[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn transpose_solve_through_symmetrizer() {
        // diag(2, 1) * [[1, -0.25], [-0.5, 1]] is symmetric.
        let a = SparseRows::new(vec![vec![(0, 1.0), (1, -0.25)], vec![(0, -0.5), (1, 1.0)]]);
        let b = [1.0, 2.0];
        let direct = a.to_dense().transpose().lu().solve(&DVector::from_column_slice(&b)).unwrap();
        let m = vec![2.0, 1.0];
        let scaled: Vec<f64> = b.iter().zip(&m).map(|(x, y)| x / y).collect();
        let z = conjugate_gradient(&a, &m, &scaled).unwrap();
        for i in 0..2 {
            assert!((z[i] * m[i] - direct[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn nnls_recovers_nonnegative_combination() {
        let a = DMatrix::from_row_slice(3, 2, &[1.5, 0.5, 1.0, 1.0, 0.5, 1.5]);
        let b = DVector::from_column_slice(&[0.5 * 1.5 + 0.5 * 0.5, 1.0, 0.5 * 0.5 + 0.5 * 1.5]);
        let (x, res) = nnls(&a, &b);
        assert!(res < 1e-12);
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nnls_clamps_negative_directions() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_column_slice(&[2.0, -1.0]);
        let (x, res) = nnls(&a, &b);
        assert_eq!(x[1], 0.0);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_detects_duplicate_columns() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        assert_eq!(numerical_rank(&a, 1e-10), 1);
    }
}
