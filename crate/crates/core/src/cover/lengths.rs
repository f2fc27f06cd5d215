//! Cover lengths `c_i = max{h_i : h ≥ 0, hᵀGh ≤ 1}` and the coding gain
//! `C_min = min{zᵀGz : z ≥ 0, ‖z‖ = 1}`.
//!
//! Both optima sit on a face of the orthant whose principal submatrix is
//! well behaved, so both are found by enumerating coordinate subsets.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, subsets, symmetric_eigen, Mat};

use super::{cover_order, is_full_cover, GramMatrix};

/// Largest dimension for the subset enumerations.
pub const MAX_ENUM_DIM: usize = 12;

const SINGULAR_TOL: f64 = 1e-10;

/// Cover length of every index; uncovered indices get `f64::INFINITY`.
pub fn cover_lengths(g: &GramMatrix) -> Result<Vec<f64>> {
    let (_, link) = cover_order(g)?;
    lengths_for_link(g, &link)
}

pub(crate) fn lengths_for_link(g: &GramMatrix, link: &[usize]) -> Result<Vec<f64>> {
    let n = g.n();
    if n > MAX_ENUM_DIM {
        return Err(Error::Cap { what: "cover length dimension", limit: MAX_ENUM_DIM, got: n });
    }
    let gm = g.entries();
    let mut best = vec![f64::NEG_INFINITY; n];
    for s in subsets(n) {
        if !s.iter().any(|i| link.contains(i)) {
            continue;
        }
        let sub = gm.principal(&s);
        let Some(l) = cholesky(&sub, SINGULAR_TOL) else { continue };
        for (pos, &i) in s.iter().enumerate() {
            if !link.contains(&i) {
                continue;
            }
            let mut e = vec![0.0; s.len()];
            e[pos] = 1.0;
            let x = cholesky_solve(&l, &e);
            let top = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if x.iter().all(|&v| v >= -1e-9 * top) && x[pos] > 0.0 {
                best[i] = best[i].max(x[pos].sqrt());
            }
        }
    }
    let mut out = vec![f64::INFINITY; n];
    for &i in link {
        out[i] = if best[i].is_finite() {
            best[i]
        } else if n <= 4 {
            log::warn!("cover length of index {i} has no nonsingular candidate; using grid search");
            grid_cover_length(gm, i, 240)
        } else {
            return Err(Error::Internal(format!("no finite cover length for covered index {i}")));
        };
    }
    Ok(out)
}

/// Dense search over directions of the nonnegative unit sphere (n ≤ 4).
pub(crate) fn grid_cover_length(g: &Mat<f64>, i: usize, steps: usize) -> f64 {
    let n = g.rows();
    let mut best: f64 = 0.0;
    for u in sphere_grid(n, steps) {
        let q = quad(g, &u);
        if q > 1e-300 {
            best = best.max(u[i] / q.sqrt());
        }
    }
    best
}

fn quad(g: &Mat<f64>, u: &[f64]) -> f64 {
    let gu = g.mat_vec(u);
    gu.iter().zip(u).map(|(a, b)| a * b).sum()
}

/// Points of the nonnegative unit sphere from a product grid of angles.
pub(crate) fn sphere_grid(n: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut angles = vec![0usize; n.saturating_sub(1)];
    loop {
        let mut u = vec![1.0; n];
        for (k, &a) in angles.iter().enumerate() {
            let t = a as f64 / steps as f64 * std::f64::consts::FRAC_PI_2;
            for v in u.iter_mut().take(k + 1) {
                *v *= t.cos();
            }
            u[k + 1] *= t.sin();
        }
        out.push(u);
        let mut k = 0;
        loop {
            if k == angles.len() {
                return out;
            }
            angles[k] += 1;
            if angles[k] <= steps {
                break;
            }
            angles[k] = 0;
            k += 1;
        }
    }
}

/// Minimum of `zᵀGz` over unit-norm nonnegative `z`.
///
/// Each subset `S` contributes the eigenvalues of `G_SS` whose eigenvector
/// can be chosen nonnegative.
pub fn min_unit_quadratic(g: &GramMatrix) -> Result<f64> {
    let n = g.n();
    if n > MAX_ENUM_DIM {
        return Err(Error::Cap { what: "C_min dimension", limit: MAX_ENUM_DIM, got: n });
    }
    if !is_full_cover(g)? {
        return Err(Error::ZeroCover);
    }
    let gm = g.entries();
    let mut best = f64::INFINITY;
    for s in subsets(n) {
        let sub = gm.principal(&s);
        let (values, vectors) = symmetric_eigen(&sub);
        for (k, &lam) in values.iter().enumerate() {
            if lam >= best {
                break;
            }
            let col: Vec<f64> = (0..s.len()).map(|r| vectors[(r, k)]).collect();
            let top = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let tol = 1e-9 * top;
            if col.iter().all(|&v| v >= -tol) || col.iter().all(|&v| v <= tol) {
                best = lam;
            }
        }
    }
    let scale = gm.max_abs();
    if best <= 1e-12 * scale {
        return Err(Error::ZeroCover);
    }
    Ok(best)
}
