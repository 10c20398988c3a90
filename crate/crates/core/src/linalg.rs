//! Small dense linear algebra for regression designs: Householder QR,
//! Cholesky and singular values, generic over the scalar.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Relative singular value threshold below which a design is rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
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

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return domain(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return domain("ragged matrix rows");
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return domain("column counts differ");
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `selfᵀ·self`.
    pub fn gram(&self) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..p {
                for j in i..p {
                    g[(i, j)] = g[(i, j)] + row[i] * row[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ·v`.
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * vi;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return domain("matrix dimensions differ");
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    /// `vᵀ·self·v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        dot(v, &self.mul_vec(v))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        (0..self.rows).all(|i| {
            (0..i).all(|j| {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs()))
            })
        })
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

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Householder QR of a tall `n×p` matrix.
#[derive(Debug, Clone)]
pub struct Qr<T> {
    // reflectors stored column-wise below the diagonal, R on and above
    qr: Matrix<T>,
    diag: Vec<T>,
}

impl<T: Real> Qr<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let (n, p) = (a.rows(), a.cols());
        if n < p || p == 0 {
            return domain(format!("QR needs rows >= cols > 0, got {n}x{p}"));
        }
        let mut qr = a.clone();
        let mut diag = vec![T::zero(); p];
        for k in 0..p {
            let mut norm = T::zero();
            for i in k..n {
                norm = norm.hypot(qr[(i, k)]);
            }
            if norm != T::zero() {
                if qr[(k, k)] < T::zero() {
                    norm = -norm;
                }
                for i in k..n {
                    qr[(i, k)] = qr[(i, k)] / norm;
                }
                qr[(k, k)] = qr[(k, k)] + T::one();
                for j in (k + 1)..p {
                    let mut s = T::zero();
                    for i in k..n {
                        s = s + qr[(i, k)] * qr[(i, j)];
                    }
                    s = -s / qr[(k, k)];
                    for i in k..n {
                        qr[(i, j)] = qr[(i, j)] + s * qr[(i, k)];
                    }
                }
            }
            diag[k] = -norm;
        }
        Ok(Self { qr, diag })
    }

    pub fn cols(&self) -> usize {
        self.diag.len()
    }

    /// Upper triangular factor.
    pub fn r(&self) -> Matrix<T> {
        let p = self.cols();
        let mut r = Matrix::zeros(p, p);
        for i in 0..p {
            r[(i, i)] = self.diag[i];
            for j in (i + 1)..p {
                r[(i, j)] = self.qr[(i, j)];
            }
        }
        r
    }

    /// `Qᵀ·y`.
    pub fn qt_mul(&self, y: &[T]) -> Vec<T> {
        let (n, p) = (self.qr.rows(), self.cols());
        assert_eq!(y.len(), n);
        let mut x = y.to_vec();
        for k in 0..p {
            if self.qr[(k, k)] == T::zero() {
                continue;
            }
            let mut s = T::zero();
            for i in k..n {
                s = s + self.qr[(i, k)] * x[i];
            }
            s = -s / self.qr[(k, k)];
            for i in k..n {
                x[i] = x[i] + s * self.qr[(i, k)];
            }
        }
        x
    }

    /// Errors when the smallest singular value is below
    /// `RANK_TOLERANCE` times the largest.
    pub fn check_rank(&self) -> Result<()> {
        let sv = singular_values(&self.r());
        let max = sv.iter().fold(T::zero(), |m, &s| m.max(s));
        let min = sv.iter().fold(T::infinity(), |m, &s| m.min(s));
        if !(max > T::zero()) || min <= T::lit(RANK_TOLERANCE) * max {
            return Err(Error::SingularDesign(format!(
                "singular values span [{min}, {max}]; design is rank deficient"
            )));
        }
        Ok(())
    }

    /// Least-squares solution of `A·x ≈ y` and the residual sum of squares.
    pub fn least_squares(&self, y: &[T]) -> (Vec<T>, T) {
        let p = self.cols();
        let qty = self.qt_mul(y);
        let beta = solve_upper(&self.r(), &qty[..p]);
        let rss = qty[p..].iter().fold(T::zero(), |acc, &e| acc + e * e);
        (beta, rss)
    }

    /// `vᵀ(AᵀA)⁻¹v = ‖R⁻ᵀv‖²`.
    pub fn gram_inverse_quad(&self, v: &[T]) -> T {
        let u = solve_lower_transposed(&self.r(), v);
        dot(&u, &u)
    }
}

/// Solves `R·x = b` for upper triangular `R`.
pub fn solve_upper<T: Real>(r: &Matrix<T>, b: &[T]) -> Vec<T> {
    let p = r.rows();
    let mut x = vec![T::zero(); p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in (i + 1)..p {
            s = s - r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

/// Solves `Rᵀ·x = b` for upper triangular `R`.
pub fn solve_lower_transposed<T: Real>(r: &Matrix<T>, b: &[T]) -> Vec<T> {
    let p = r.rows();
    let mut x = vec![T::zero(); p];
    for i in 0..p {
        let mut s = b[i];
        for j in 0..i {
            s = s - r[(j, i)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

/// Cholesky factor `L` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return domain("Cholesky needs a square matrix");
        }
        let scale = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].abs()));
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::lit(RANK_TOLERANCE) * scale) {
                return Err(Error::ImproperPosterior(format!(
                    "matrix is not positive definite (pivot {j} = {d})"
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    fn forward(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.rows();
        let y = self.forward(b);
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `vᵀA⁻¹v = ‖L⁻¹v‖²`.
    pub fn inverse_quad(&self, v: &[T]) -> T {
        let y = self.forward(v);
        dot(&y, &y)
    }
}

/// Singular values of a square matrix by one-sided Jacobi rotations.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let n = a.cols();
    // work on columns
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let (xi, yj) = (*x, *y);
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter().map(|c| dot(c, c).sqrt()).collect()
}
