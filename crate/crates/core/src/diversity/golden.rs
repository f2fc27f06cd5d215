//! Checks behind the Golden code design.

use crate::error::{invalid, Result};

fn check(bits: u32) -> Result<i64> {
    if bits == 0 || bits > 16 {
        return Err(invalid("bits", format!("must be in 1..=16, got {bits}")));
    }
    Ok((1i64 << bits) - 1)
}

/// `min (e_1² + 3e_1e_2 + e_2²)²` over nonzero integer errors with
/// `|e_1| < 2^{k1}`, `|e_2| < 2^{k2}`.
pub fn golden_min_metric(k1: u32, k2: u32) -> Result<u64> {
    let (a, b) = (check(k1)?, check(k2)?);
    let mut best = u64::MAX;
    for e1 in -a..=a {
        for e2 in -b..=b {
            if e1 == 0 && e2 == 0 {
                continue;
            }
            let q = e1 * e1 + 3 * e1 * e2 + e2 * e2;
            best = best.min((q * q) as u64);
        }
    }
    Ok(best)
}

/// Worst case over errors of `∏_i (f_i·e)^{2Ω_i} (g_i·e)^{2Ω_i}`, zero when
/// some error leaves a projection at zero or with mixed signs across
/// apertures.
pub fn golden_objective(f: &[[f64; 2]], g: &[[f64; 2]], omega: &[f64], k1: u32, k2: u32) -> Result<f64> {
    let (a, b) = (check(k1)?, check(k2)?);
    if f.len() != omega.len() || g.len() != omega.len() || omega.is_empty() {
        return Err(invalid("design", "F, G and Ω must have one row per aperture"));
    }
    let mut best = f64::INFINITY;
    for e1 in -a..=a {
        for e2 in -b..=b {
            if e1 == 0 && e2 == 0 {
                continue;
            }
            let (x1, x2) = (e1 as f64, e2 as f64);
            let mut value = 1.0;
            for m in [f, g] {
                let p: Vec<f64> = m.iter().map(|r| r[0] * x1 + r[1] * x2).collect();
                let same_sign = p.iter().all(|&v| v > 0.0) || p.iter().all(|&v| v < 0.0);
                if !same_sign {
                    return Ok(0.0);
                }
                value *= p.iter().zip(omega).map(|(v, w)| v.abs().powf(2.0 * w)).product::<f64>();
            }
            best = best.min(value);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub best: f64,
    /// `(f_1, f_2, g_1, g_2)` of the best grid point.
    pub argmax: [f64; 4],
    pub closed_form: f64,
    pub evaluated: usize,
}

/// Exhaustive search over positive `(f_1, f_2, g_1, g_2)` summing to one on
/// a lattice of spacing `1/units`, one aperture with `Ω = 1` and one bit
/// per symbol. The closed-form optimum is `1/400`.
pub fn golden_grid_search(units: u32) -> Result<GridSearch> {
    if units < 4 {
        return Err(invalid("units", "need at least 4 lattice steps"));
    }
    let step = 1.0 / f64::from(units);
    let mut best = f64::NEG_INFINITY;
    let mut argmax = [0.0; 4];
    let mut evaluated = 0;
    for a in 1..units {
        for b in 1..units - a {
            for c in 1..units - a - b {
                let d = units - a - b - c;
                let p = [a, b, c, d].map(|u| f64::from(u) * step);
                let v = golden_objective(&[[p[0], p[1]]], &[[p[2], p[3]]], &[1.0], 1, 1)?;
                evaluated += 1;
                if v > best {
                    best = v;
                    argmax = p;
                }
            }
        }
    }
    Ok(GridSearch { best, argmax, closed_form: 1.0 / 400.0, evaluated })
}
