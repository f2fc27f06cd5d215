//! Echelon-form route to the cover link.
//!
//! The row space of `A` is brought to reduced row echelon form
//! `[I | F]` under a column permutation. Every nonnegative row-space
//! vector is `vᵀ[I | F]` with `v ≥ 0`, so the nonnegative part of the row
//! space is the cone `{v ≥ 0 : vᵀF ≥ 0}`. Its extreme rays are built one
//! column of `F` at a time by positive row transformations: rows that are
//! already nonnegative in the column are kept, every adjacent
//! positive/negative pair is combined so the column cancels, and rows left
//! negative are dropped. The cover link is the union of the supports of
//! the surviving rows, mapped back through the permutation.

use crate::error::{Error, Result};
use crate::linalg::{Mat, Scalar, Signs};

const MAX_GENERATORS: usize = 50_000;

/// Reduced row echelon form with the column order used to expose `[I | F]`.
#[derive(Debug, Clone)]
pub struct Echelon<T> {
    /// `rank × n` matrix `[I | F]` in permuted column order.
    pub reduced: Mat<T>,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

pub fn echelon<T: Scalar>(a: &Mat<T>, signs: &Signs<T>) -> Echelon<T> {
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<T>> = a.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..rows {
            if signs.is_zero(&m[i][c]) {
                continue;
            }
            best = match best {
                Some(b) if m[b][c].abs() >= m[i][c].abs() => Some(b),
                _ => Some(i),
            };
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for k in 0..cols {
            m[r][k] = m[r][k].clone() / piv.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in 0..cols {
                let v = m[i][k].clone() - f.clone() * m[r][k].clone();
                m[i][k] = if signs.is_zero(&v) { T::zero() } else { v };
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut perm = pivots.clone();
    perm.extend((0..cols).filter(|c| !pivots.contains(c)));
    let mut data = Vec::with_capacity(r * cols);
    for row in m.iter().take(r) {
        for &c in &perm {
            data.push(row[c].clone());
        }
    }
    let reduced = Mat::from_vec(r, cols, data).expect("echelon shape");
    Echelon { reduced, perm, rank: r }
}

/// Cover link of the row space of `a` (sorted original indices).
pub fn cover_link_echelon<T: Scalar>(a: &Mat<T>, signs: &Signs<T>) -> Result<Vec<usize>> {
    let ech = echelon(a, signs);
    let n = a.cols();
    let r = ech.rank;
    if r == 0 {
        return Ok(Vec::new());
    }
    let mut gens: Vec<Vec<T>> = ech.reduced.to_rows();
    // Tight constraints are tracked over the columns processed so far:
    // the pivot block (v ≥ 0) and every finished column of F.
    let mut processed: Vec<usize> = (0..r).collect();
    for col in r..n {
        let (mut pos, mut zero, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for (k, g) in gens.iter().enumerate() {
            if signs.is_pos(&g[col]) {
                pos.push(k);
            } else if signs.is_neg(&g[col]) {
                neg.push(k);
            } else {
                zero.push(k);
            }
        }
        if neg.is_empty() {
            processed.push(col);
            continue;
        }
        let zsets: Vec<Vec<bool>> = gens
            .iter()
            .map(|g| processed.iter().map(|&c| signs.is_zero(&g[c])).collect())
            .collect();
        let mut next: Vec<Vec<T>> = Vec::new();
        for &k in pos.iter().chain(zero.iter()) {
            let mut g = gens[k].clone();
            if signs.is_zero(&g[col]) {
                g[col] = T::zero();
            }
            normalize(&mut g);
            next.push(g);
        }
        for &p in &pos {
            for &q in &neg {
                if !adjacent(&zsets, p, q) {
                    continue;
                }
                let cp = -gens[q][col].clone();
                let cq = gens[p][col].clone();
                let mut g: Vec<T> = gens[p]
                    .iter()
                    .zip(&gens[q])
                    .map(|(x, y)| {
                        let v = x.clone() * cp.clone() + y.clone() * cq.clone();
                        if signs.is_zero(&v) {
                            T::zero()
                        } else {
                            v
                        }
                    })
                    .collect();
                g[col] = T::zero();
                normalize(&mut g);
                if !next.iter().any(|h| same_ray(h, &g, signs)) {
                    next.push(g);
                }
                if next.len() > MAX_GENERATORS {
                    return Err(Error::Cap {
                        what: "echelon cover generators",
                        limit: MAX_GENERATORS,
                        got: next.len(),
                    });
                }
            }
        }
        gens = next;
        processed.push(col);
    }
    let mut link: Vec<usize> = (0..n)
        .filter(|&c| gens.iter().any(|g| signs.is_pos(&g[c])))
        .map(|c| ech.perm[c])
        .collect();
    link.sort_unstable();
    Ok(link)
}

/// Combinatorial adjacency test: no third ray is tight on every
/// constraint where both `p` and `q` are tight.
fn adjacent(zsets: &[Vec<bool>], p: usize, q: usize) -> bool {
    let common: Vec<usize> =
        (0..zsets[p].len()).filter(|&c| zsets[p][c] && zsets[q][c]).collect();
    !zsets
        .iter()
        .enumerate()
        .any(|(k, z)| k != p && k != q && common.iter().all(|&c| z[c]))
}

fn normalize<T: Scalar>(g: &mut [T]) {
    let m = g.iter().fold(T::zero(), |m, x| if x.abs() > m { x.abs() } else { m });
    if m.is_zero() {
        return;
    }
    for x in g.iter_mut() {
        *x = x.clone() / m.clone();
    }
}

fn same_ray<T: Scalar>(a: &[T], b: &[T], signs: &Signs<T>) -> bool {
    a.iter().zip(b).all(|(x, y)| signs.is_zero(&(x.clone() - y.clone())))
}
