//! Phase-1 simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! Dense tableau, Bland's smallest-index rule for both entering and
//! leaving variables, so the method terminates on degenerate problems.

use crate::linalg::{Mat, Scalar, Signs};

const MAX_PIVOTS: usize = 100_000;

/// Returns a feasible point of `{x ≥ 0 : A x = b}` or `None`.
///
/// `signs` decides when a tableau entry is treated as zero; pass
/// [`Signs::exact`] for rational input.
pub fn feasible_point<T: Scalar>(a: &Mat<T>, b: &[T], signs: &Signs<T>) -> Option<Vec<T>> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m, "right-hand side length");
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < T::zero();
        let mut row = vec![T::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
        }
        row[n + i] = T::one();
        row[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    // Reduced costs of the phase-1 objective (sum of artificials).
    let mut cost = vec![T::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[rhs] = cost[rhs].clone() - row[rhs].clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..n + m).find(|&j| signs.is_neg(&cost[j])) else { break };
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in t.iter().enumerate() {
            if !signs.is_pos(&row[enter]) {
                continue;
            }
            let ratio = row[rhs].clone() / row[enter].clone();
            leave = match leave {
                None => Some((i, ratio)),
                Some((k, best)) => {
                    if ratio < best || (ratio == best && basis[i] < basis[k]) {
                        Some((i, ratio))
                    } else {
                        Some((k, best))
                    }
                }
            };
        }
        let Some((p, _)) = leave else {
            // Phase-1 objective is bounded below, so this cannot happen in
            // exact arithmetic; treat as numerically stuck.
            break;
        };
        pivot(&mut t, &mut cost, p, enter);
        basis[p] = enter;
    }

    let objective = -cost[rhs].clone();
    if signs.is_pos(&objective) {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            let v = t[i][rhs].clone();
            x[var] = if v < T::zero() { T::zero() } else { v };
        }
    }
    Some(x)
}

fn pivot<T: Scalar>(t: &mut [Vec<T>], cost: &mut [T], p: usize, q: usize) {
    let width = cost.len();
    let piv = t[p][q].clone();
    for j in 0..width {
        t[p][j] = t[p][j].clone() / piv.clone();
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[q].is_zero() {
            continue;
        }
        let f = row[q].clone();
        for j in 0..width {
            row[j] = row[j].clone() - f.clone() * prow[j].clone();
        }
    }
    if !cost[q].is_zero() {
        let f = cost[q].clone();
        for j in 0..width {
            cost[j] = cost[j].clone() - f.clone() * prow[j].clone();
        }
    }
}
