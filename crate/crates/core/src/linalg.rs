//! Small dense matrices, generic over an ordered field, plus the few f64
//! kernels the rest of the crate needs (symmetric eigen-decomposition and
//! Cholesky solves).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Ordered field used by the sign-driven cover routines.
///
/// Floating point comparisons go through a tolerance carried by the
/// caller; exact scalars use a zero tolerance.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Signed + ToPrimitive {}

impl Scalar for f64 {}
impl Scalar for BigRational {}

/// Sign classification with an absolute tolerance.
#[derive(Debug, Clone)]
pub struct Signs<T> {
    pub tol: T,
}

impl<T: Scalar> Signs<T> {
    pub fn exact() -> Self {
        Signs { tol: T::zero() }
    }

    pub fn is_pos(&self, x: &T) -> bool {
        *x > self.tol
    }

    pub fn is_neg(&self, x: &T) -> bool {
        *x < -self.tol.clone()
    }

    pub fn is_zero(&self, x: &T) -> bool {
        !self.is_pos(x) && !self.is_neg(x)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Mat<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let data = rows.iter().flat_map(|r| r.iter().cloned()).collect();
        Ok(Mat { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * idx.len());
        for &r in idx {
            for &c in idx {
                data.push(self[(r, c)].clone());
            }
        }
        Mat { rows: idx.len(), cols: idx.len(), data }
    }

    /// Symmetric permutation `out[i][j] = self[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        self.principal(p)
    }
}

impl<T: Clone + Zero + One> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::filled(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Mat::filled(self.rows, rhs.cols, T::zero());
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)].clone();
                for c in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, c)].clone();
                    out[(r, c)] = out[(r, c)].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`.
    pub fn gram(&self) -> Self {
        let mut out = Mat::filled(self.cols, self.cols, T::zero());
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut s = T::zero();
                for r in 0..self.rows {
                    s = s + self[(r, i)].clone() * self[(r, j)].clone();
                }
                out[(i, j)] = s.clone();
                out[(j, i)] = s;
            }
        }
        out
    }
}

impl Mat<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(p) => Err(Error::NonFinite { row: p / self.cols, col: p % self.cols }),
            None => Ok(()),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "cannot subtract {}x{} from {}x{}",
                rhs.rows, rhs.cols, self.rows, self.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|x| x * k)
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact conversion of every entry to a rational.
    pub fn to_rational(&self) -> Mat<BigRational> {
        self.map(|&x| BigRational::from_float(x).unwrap_or_else(BigRational::zero))
    }

    /// Returns the matrix as rationals when every entry is a dyadic number
    /// with a short denominator (integers, halves, quarters, ...).
    pub fn as_short_rational(&self) -> Option<Mat<BigRational>> {
        const SHIFT: f64 = 1048576.0;
        let ok = self.data.iter().all(|&x| {
            let y = x * SHIFT;
            y.is_finite() && y.fract() == 0.0 && y.abs() < 4.5e15
        });
        if !ok {
            return None;
        }
        let den = BigInt::from(1_i64 << 20);
        Some(self.map(|&x| BigRational::new(BigInt::from((x * SHIFT) as i64), den.clone())))
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in ascending order; column `k` of the second
/// matrix is the unit eigenvector for eigenvalue `k`.
pub fn symmetric_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    (values, vectors)
}

/// Cholesky factor of a symmetric positive definite matrix, or `None` when
/// a pivot falls below `rel_tol` times the largest diagonal entry.
pub fn cholesky(a: &Mat<f64>, rel_tol: f64) -> Option<Mat<f64>> {
    let n = a.rows();
    let dmax = (0..n).fold(0.0_f64, |m, i| m.max(a[(i, i)].abs()));
    if dmax == 0.0 {
        return None;
    }
    let mut l = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= rel_tol * dmax {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Numerical rank by Gaussian elimination with partial pivoting.
pub fn rank(a: &Mat<f64>) -> usize {
    let tol = 1e-9 * a.max_abs().max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs()));
        let Some(p) = p else { break };
        if m[(p, c)].abs() <= tol {
            continue;
        }
        for k in 0..cols {
            let t = m[(r, k)];
            m[(r, k)] = m[(p, k)];
            m[(p, k)] = t;
        }
        for i in (r + 1)..rows {
            let f = m[(i, c)] / m[(r, c)];
            for k in c..cols {
                m[(i, k)] -= f * m[(r, k)];
            }
        }
        r += 1;
    }
    r
}

/// Every subset of `0..n`, as sorted index lists, in order of increasing
/// bitmask.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1_u32..(1_u32 << n)).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}
