//! Cover analysis of positive semidefinite Gram matrices.
//!
//! Index `i` is *covered* when the constraint `hᵀGh ≤ 1` bounds `h_i` over
//! the nonnegative orthant. With `G = AᵀA` this happens exactly when the
//! row space of `A` holds a nonnegative vector with a positive `i`-th
//! entry. The cover link is the set of covered indices and the cover order
//! its size.
//!
//! Two independent routes compute the link: one LP feasibility problem per
//! index ([`cover_order`]) and the echelon / positive row transformation
//! route ([`cover_order_echelon`]). [`nonneg_kernel_witness`] solves the dual
//! question and certifies the lack of full cover.
//!
//! Indices are zero-based throughout.

pub mod echelon;
mod lengths;
pub mod lp;

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::linalg::{symmetric_eigen, Mat, Scalar, Signs};

pub use lengths::{cover_lengths, min_unit_quadratic};

/// Largest dimension accepted by the LP routines.
pub const MAX_LP_DIM: usize = 32;

/// Symmetric positive semidefinite `n × n` matrix, optionally with a factor
/// `A` such that `G = AᵀA`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: Mat<f64>,
    factor: Option<Mat<f64>>,
}

impl GramMatrix {
    /// Validates symmetry (1e-12 relative) and positive semidefiniteness
    /// (eigenvalues ≥ −1e-9 · largest eigenvalue).
    pub fn new(entries: Mat<f64>) -> Result<Self> {
        let n = entries.rows();
        if n == 0 {
            return Err(Error::Dimension("Gram matrix of dimension 0".into()));
        }
        if entries.cols() != n {
            return Err(Error::Dimension(format!(
                "Gram matrix must be square, got {}x{}",
                n,
                entries.cols()
            )));
        }
        entries.check_finite()?;
        let tol = 1e-12 * entries.max_abs().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (entries[(i, j)] - entries[(j, i)]).abs() > tol {
                    return Err(invalid("gram", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let (values, _) = symmetric_eigen(&entries);
        let top = values.last().copied().unwrap_or(0.0).max(0.0);
        if values[0] < -1e-9 * top.max(f64::MIN_POSITIVE) {
            return Err(invalid(
                "gram",
                format!("not positive semidefinite (eigenvalue {:e})", values[0]),
            ));
        }
        Ok(GramMatrix { entries, factor: None })
    }

    /// `G = AᵀA` for an `L × N` matrix `A`.
    pub fn from_factor(a: &Mat<f64>) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::Dimension("factor with a zero dimension".into()));
        }
        a.check_finite()?;
        Ok(GramMatrix { entries: a.gram(), factor: Some(a.clone()) })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn factor(&self) -> Option<&Mat<f64>> {
        self.factor.as_ref()
    }

    /// A matrix with the same row space and kernel as `G`.
    pub fn row_basis(&self) -> &Mat<f64> {
        self.factor.as_ref().unwrap_or(&self.entries)
    }

    /// `ΠᵀGΠ` with `out[i][j] = G[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        GramMatrix {
            entries: self.entries.permuted(p),
            factor: self.factor.as_ref().map(|a| {
                let rows: Vec<Vec<f64>> =
                    a.to_rows().iter().map(|r| p.iter().map(|&k| r[k]).collect()).collect();
                Mat::from_rows(&rows).expect("permuted factor")
            }),
        }
    }
}

/// Result of [`analyze`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub n: usize,
    pub cover_order: usize,
    pub cover_link: Vec<usize>,
    /// Per-index cover length; `f64::INFINITY` for uncovered indices.
    pub cover_lengths: Vec<f64>,
    /// Product of the finite cover lengths.
    pub cover_volume: f64,
    pub full_cover: bool,
}

impl CoverReport {
    /// Flat `key = value` dump; indices are printed one-based.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "cover_order = {}", self.cover_order);
        let link: Vec<String> = self.cover_link.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(out, "cover_link = [{}]", link.join(", "));
        let lengths: Vec<String> = self
            .cover_lengths
            .iter()
            .map(|c| if c.is_finite() { format!("{c}") } else { "inf".to_string() })
            .collect();
        let _ = writeln!(out, "cover_lengths = [{}]", lengths.join(", "));
        let _ = writeln!(out, "cover_volume = {}", self.cover_volume);
        let _ = writeln!(out, "full_cover = {}", self.full_cover);
        out
    }
}

/// Either exact rationals or floats with a sign tolerance.
enum Prepared {
    Exact(Mat<BigRational>),
    Float(Mat<f64>),
}

fn prepare(a: &Mat<f64>) -> Result<Prepared> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Dimension("matrix with a zero dimension".into()));
    }
    a.check_finite()?;
    if a.max_abs() == 0.0 {
        return Err(invalid("matrix", "all entries are zero"));
    }
    if a.cols() > MAX_LP_DIM {
        return Err(Error::Cap { what: "cover dimension", limit: MAX_LP_DIM, got: a.cols() });
    }
    if let Some(q) = a.as_short_rational() {
        return Ok(Prepared::Exact(q));
    }
    let m = a.max_abs();
    Ok(Prepared::Float(a.scale(1.0 / m)))
}

fn float_signs() -> Signs<f64> {
    Signs { tol: 1e-9 }
}

/// Decides whether the row space of `a` has a nonnegative vector with a
/// positive entry at `i`, via `Aᵀ(v⁺ − v⁻) − s = e_i` with `v⁺, v⁻, s ≥ 0`.
pub fn coverable_index_in<T: Scalar>(a: &Mat<T>, i: usize, signs: &Signs<T>) -> bool {
    let (l, n) = (a.rows(), a.cols());
    let mut sys = Mat::<T>::zeros(n, 2 * l + n);
    for j in 0..n {
        for r in 0..l {
            sys[(j, r)] = a[(r, j)].clone();
            sys[(j, l + r)] = -a[(r, j)].clone();
        }
        sys[(j, 2 * l + j)] = -T::one();
    }
    let mut b = vec![T::zero(); n];
    b[i] = T::one();
    lp::feasible_point(&sys, &b, signs).is_some()
}

/// Nonzero `h ≥ 0` with `A h = 0`, scaled so its largest entry is one.
pub fn kernel_witness_in<T: Scalar>(a: &Mat<T>, signs: &Signs<T>) -> Option<Vec<T>> {
    let (l, n) = (a.rows(), a.cols());
    let mut sys = Mat::<T>::zeros(l + 1, n);
    for r in 0..l {
        for j in 0..n {
            sys[(r, j)] = a[(r, j)].clone();
        }
    }
    for j in 0..n {
        sys[(l, j)] = T::one();
    }
    let mut b = vec![T::zero(); l + 1];
    b[l] = T::one();
    let h = lp::feasible_point(&sys, &b, signs)?;
    let top = h.iter().fold(T::zero(), |m, x| if *x > m { x.clone() } else { m });
    Some(h.into_iter().map(|x| x / top.clone()).collect())
}

/// Cover link by one LP per index.
pub fn lp_cover_link_in<T: Scalar>(a: &Mat<T>, signs: &Signs<T>) -> Vec<usize> {
    (0..a.cols()).filter(|&i| coverable_index_in(a, i, signs)).collect()
}

/// Whether index `i` (zero-based) of the row space of `a` is covered.
pub fn coverable_index(a: &Mat<f64>, i: usize) -> Result<bool> {
    if i >= a.cols() {
        return Err(Error::Dimension(format!("index {i} out of range for {} columns", a.cols())));
    }
    Ok(match prepare(a)? {
        Prepared::Exact(q) => coverable_index_in(&q, i, &Signs::exact()),
        Prepared::Float(f) => coverable_index_in(&f, i, &float_signs()),
    })
}

/// Cover order and link of the row space of `a` (LP route).
pub fn cover_order_of(a: &Mat<f64>) -> Result<(usize, Vec<usize>)> {
    let link = match prepare(a)? {
        Prepared::Exact(q) => lp_cover_link_in(&q, &Signs::exact()),
        Prepared::Float(f) => lp_cover_link_in(&f, &float_signs()),
    };
    Ok((link.len(), link))
}

/// Cover order and link of the row space of `a` (echelon route).
pub fn cover_order_echelon_of(a: &Mat<f64>) -> Result<(usize, Vec<usize>)> {
    let link = match prepare(a)? {
        Prepared::Exact(q) => echelon::cover_link_echelon(&q, &Signs::exact())?,
        Prepared::Float(f) => echelon::cover_link_echelon(&f, &float_signs())?,
    };
    Ok((link.len(), link))
}

/// Cover order and cover link of `G` (LP route).
pub fn cover_order(g: &GramMatrix) -> Result<(usize, Vec<usize>)> {
    cover_order_of(g.row_basis())
}

/// Cover order and cover link of `G` (echelon route).
pub fn cover_order_echelon(g: &GramMatrix) -> Result<(usize, Vec<usize>)> {
    cover_order_echelon_of(g.row_basis())
}

pub fn is_full_cover(g: &GramMatrix) -> Result<bool> {
    Ok(cover_order(g)?.0 == g.n())
}

/// Nonzero `h ≥ 0` with `A h = 0` if one exists.
pub fn nonneg_kernel_witness(a: &Mat<f64>) -> Result<Option<Vec<f64>>> {
    Ok(match prepare(a)? {
        Prepared::Exact(q) => kernel_witness_in(&q, &Signs::exact())
            .map(|h| h.iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(0.0)).collect()),
        Prepared::Float(f) => kernel_witness_in(&f, &float_signs()),
    })
}

/// Exact-arithmetic kernel witness for rational input.
pub fn nonneg_kernel_witness_exact(a: &Mat<BigRational>) -> Option<Vec<BigRational>> {
    if a.data().iter().all(|x| x.is_zero()) {
        let mut h = vec![BigRational::zero(); a.cols()];
        if let Some(first) = h.first_mut() {
            *first = BigRational::one();
        }
        return Some(h);
    }
    kernel_witness_in(a, &Signs::exact())
}

/// Full cover report: order, link, lengths and volume.
pub fn analyze(g: &GramMatrix) -> Result<CoverReport> {
    let (order, link) = cover_order(g)?;
    let lengths = lengths::lengths_for_link(g, &link)?;
    let volume = lengths.iter().filter(|c| c.is_finite()).product();
    Ok(CoverReport {
        n: g.n(),
        cover_order: order,
        full_cover: order == g.n(),
        cover_link: link,
        cover_lengths: lengths,
        cover_volume: volume,
    })
}
