//! Small dense linear algebra: full-pivot LU with iterative refinement and
//! condition estimates, Householder least squares.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorisation `P A Q = L U` with complete pivoting.
#[derive(Debug, Clone)]
pub struct FullPivLu<T> {
    lu: Matrix<T>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    sign: T,
    smallest_pivot: T,
    largest_pivot: T,
}

impl<T: Scalar> FullPivLu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Input("LU needs a square matrix".into()));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut smallest = T::infinity();
        let mut largest = T::zero();
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, T::zero());
            for i in k..n {
                for j in k..n {
                    let v = lu[(i, j)].abs();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if pi != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, pi * n + j);
                }
                row_perm.swap(k, pi);
                sign = -sign;
            }
            if pj != k {
                for i in 0..n {
                    lu.data.swap(i * n + k, i * n + pj);
                }
                col_perm.swap(k, pj);
                sign = -sign;
            }
            smallest = smallest.min(best);
            largest = largest.max(best);
            if best == T::zero() {
                continue;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / piv;
                lu[(i, k)] = factor;
                if factor != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            row_perm,
            col_perm,
            sign,
            smallest_pivot: if n == 0 { T::one() } else { smallest },
            largest_pivot: largest,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.smallest_pivot == T::zero()
            || self.smallest_pivot <= T::epsilon() * self.largest_pivot
    }

    /// Natural log of `|det A|` and the sign of the determinant.
    pub fn log_abs_det(&self) -> (T, T) {
        let n = self.lu.rows;
        let mut log = T::zero();
        let mut sign = self.sign;
        for i in 0..n {
            let d = self.lu[(i, i)];
            if d < T::zero() {
                sign = -sign;
            }
            log += d.abs().ln();
        }
        (log, sign)
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(Error::Input("right-hand side has wrong length".into()));
        }
        if self.smallest_pivot == T::zero() {
            return Err(Error::Construction {
                message: "matrix is exactly singular".into(),
                condition: f64::INFINITY,
            });
        }
        let mut y: Vec<T> = self.row_perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        let mut x = vec![T::zero(); n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k];
        }
        Ok(x)
    }

    /// Inverse, column by column.
    pub fn inverse(&self) -> Result<Matrix<T>> {
        let n = self.lu.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Result of [`solve_refined`].
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub x: Vec<T>,
    /// 1-norm condition number of the matrix.
    pub condition: f64,
    /// `‖A x - b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)` after refinement.
    pub relative_residual: f64,
    pub refinement_steps: usize,
}

/// Solves `A x = b` with full pivoting and a few steps of iterative refinement.
pub fn solve_refined<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Solution<T>> {
    let lu = FullPivLu::new(a)?;
    let condition = condition_number_from(&lu, a);
    if lu.is_singular() {
        return Err(Error::Construction {
            message: "linear system is numerically singular".into(),
            condition,
        });
    }
    let mut x = lu.solve(b)?;
    let mut residual = relative_residual(a, &x, b);
    let mut steps = 0;
    for _ in 0..5 {
        let ax = a.mul_vec(&x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let dx = lu.solve(&r)?;
        let trial: Vec<T> = x.iter().zip(&dx).map(|(&xi, &di)| xi + di).collect();
        let trial_res = relative_residual(a, &trial, b);
        if trial_res < residual {
            x = trial;
            residual = trial_res;
            steps += 1;
        } else {
            break;
        }
    }
    Ok(Solution {
        x,
        condition,
        relative_residual: residual,
        refinement_steps: steps,
    })
}

fn relative_residual<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> f64 {
    let ax = a.mul_vec(x);
    let inf = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let norm_a = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| a[(i, j)].abs()).sum::<T>())
        .fold(T::zero(), T::max);
    let denom = norm_a * inf(x) + inf(b);
    if denom == T::zero() {
        return 0.0;
    }
    (inf(&r) / denom).to_f64_lossy()
}

fn condition_number_from<T: Scalar>(lu: &FullPivLu<T>, a: &Matrix<T>) -> f64 {
    if lu.smallest_pivot == T::zero() {
        return f64::INFINITY;
    }
    match lu.inverse() {
        Ok(inv) => (a.norm1() * inv.norm1()).to_f64_lossy(),
        Err(_) => f64::INFINITY,
    }
}

pub fn condition_number<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    let lu = FullPivLu::new(a)?;
    Ok(condition_number_from(&lu, a))
}

/// Linear least-squares solution with parameter standard errors.
#[derive(Debug, Clone)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    pub standard_errors: Vec<T>,
    /// Root-mean-square residual.
    pub rms: T,
}

/// Solves `min ‖A c - y‖₂` by Householder QR; `A` has one row per sample.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, y: &[T]) -> Result<LeastSquares<T>> {
    let (m, n) = (a.rows, a.cols);
    if y.len() != m {
        return Err(Error::Input("sample count does not match design rows".into()));
    }
    if m < n || n == 0 {
        return Err(Error::Fit(format!("{m} samples cannot determine {n} parameters")));
    }
    // Column scaling keeps the rank test meaningful for wildly scaled bases.
    let scale: Vec<T> = (0..n)
        .map(|j| {
            let s = (0..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let mut r = a.clone();
    for i in 0..m {
        for j in 0..n {
            r[(i, j)] /= scale[j];
        }
    }
    let mut qty = y.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::Fit("design matrix is rank deficient".into()));
        }
        let alpha = if r[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 > T::zero() {
            for j in k..n {
                let dot: T = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                let f = T::lit(2.0) * dot / vnorm2;
                for i in k..m {
                    r[(i, j)] -= f * v[i - k];
                }
            }
            let dot: T = (k..m).map(|i| v[i - k] * qty[i]).sum();
            let f = T::lit(2.0) * dot / vnorm2;
            for i in k..m {
                qty[i] -= f * v[i - k];
            }
        }
    }
    let diag_max = (0..n).fold(T::zero(), |acc, k| acc.max(r[(k, k)].abs()));
    for k in 0..n {
        if r[(k, k)].abs() <= T::lit(1e3) * T::epsilon() * diag_max {
            return Err(Error::Fit("design matrix is rank deficient".into()));
        }
    }
    let mut c = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = qty[i];
        for j in i + 1..n {
            s -= r[(i, j)] * c[j];
        }
        c[i] = s / r[(i, i)];
    }
    let resid_ss: T = qty[n..].iter().map(|&x| x * x).sum();
    let rms = (resid_ss / T::from_usize_lossy(m)).sqrt();
    let dof = m - n;
    let sigma2 = if dof > 0 {
        resid_ss / T::from_usize_lossy(dof)
    } else {
        T::zero()
    };
    // diag((RᵀR)⁻¹) via R⁻¹
    let mut rinv = Matrix::zeros(n, n);
    for j in 0..n {
        for i in (0..=j).rev() {
            let mut s = if i == j { T::one() } else { T::zero() };
            for k in i + 1..=j {
                s -= r[(i, k)] * rinv[(k, j)];
            }
            rinv[(i, j)] = s / r[(i, i)];
        }
    }
    let standard_errors = (0..n)
        .map(|i| {
            let d: T = (i..n).map(|j| rinv[(i, j)] * rinv[(i, j)]).sum();
            (sigma2 * d).sqrt() / scale[i]
        })
        .collect();
    let coefficients = c.iter().zip(&scale).map(|(&ci, &s)| ci / s).collect();
    Ok(LeastSquares {
        coefficients,
        standard_errors,
        rms,
    })
}
