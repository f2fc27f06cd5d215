//! Multidimensional nonnegative constellations on a scaled integer grid.
//!
//! Every constellation here has coordinates `g / denom` with integer
//! numerators `g`, so distances and powers are compared exactly.

use std::collections::HashSet;

use crate::error::{invalid, Error, Result};

pub const MAX_DIOPHANTINE_DIM: usize = 8;
pub const MAX_DIOPHANTINE_BITS: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    dim: usize,
    denom: u32,
    grid: Vec<Vec<u32>>,
    points: Vec<Vec<f64>>,
    min_distance: f64,
    mean_power: f64,
}

impl Constellation {
    /// Points `grid[k] / denom`; rejects empty, duplicate or ragged input.
    pub fn from_grid(dim: usize, denom: u32, grid: Vec<Vec<u32>>) -> Result<Self> {
        if dim == 0 || denom == 0 {
            return Err(invalid("constellation", "dimension and denominator must be positive"));
        }
        if grid.len() < 2 {
            return Err(invalid("constellation", "needs at least two points"));
        }
        if let Some(bad) = grid.iter().position(|p| p.len() != dim) {
            return Err(Error::Dimension(format!("point {bad} does not have {dim} coordinates")));
        }
        let mut seen = HashSet::new();
        for (k, p) in grid.iter().enumerate() {
            if !seen.insert(p.clone()) {
                return Err(invalid("constellation", format!("duplicate point at index {k}")));
            }
        }
        let d = f64::from(denom);
        let points: Vec<Vec<f64>> =
            grid.iter().map(|p| p.iter().map(|&g| f64::from(g) / d).collect()).collect();
        let total: u64 = grid.iter().flatten().map(|&g| u64::from(g)).sum();
        let mean_power = total as f64 / d / grid.len() as f64;
        let mut c = Constellation { dim, denom, grid, points, min_distance: 0.0, mean_power };
        let (num, den) = c.min_distance_sq_exact();
        c.min_distance = (num as f64 / den as f64).sqrt();
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Integer numerators of the coordinates.
    pub fn grid(&self) -> &[Vec<u32>] {
        &self.grid
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn mean_power(&self) -> f64 {
        self.mean_power
    }

    /// Total power `Σ_s 1ᵀs` as an exact fraction `(num, denom)`.
    pub fn total_power_exact(&self) -> (u64, u64) {
        (self.grid.iter().flatten().map(|&g| u64::from(g)).sum(), u64::from(self.denom))
    }

    /// Squared minimum distance as an exact fraction `(num, den)`.
    pub fn min_distance_sq_exact(&self) -> (u64, u64) {
        let mut best = u64::MAX;
        for i in 0..self.grid.len() {
            for j in (i + 1)..self.grid.len() {
                best = best.min(dist_sq(&self.grid[i], &self.grid[j]));
            }
        }
        (best, u64::from(self.denom) * u64::from(self.denom))
    }

    /// `index,s1,...,sL` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index");
        for l in 1..=self.dim {
            out.push_str(&format!(",s{l}"));
        }
        out.push('\n');
        for (k, p) in self.points.iter().enumerate() {
            out.push_str(&k.to_string());
            for x in p {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

fn dist_sq(a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum()
}

/// Even split of `total` bits over `parts`, remainder to the leading parts.
pub fn split_bits(total: u32, parts: usize) -> Vec<u32> {
    let base = total / parts as u32;
    let extra = (total % parts as u32) as usize;
    (0..parts).map(|k| base + u32::from(k < extra)).collect()
}

/// All `x ∈ ℕ^dim` with `Σx = q`, in descending lexicographic order.
fn compositions(dim: usize, q: u32) -> Vec<Vec<u32>> {
    if dim == 1 {
        return vec![vec![q]];
    }
    let mut out = Vec::new();
    for first in (0..=q).rev() {
        for mut rest in compositions(dim - 1, q - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Diophantine constellation of `2^bits` points in dimension `dim`.
///
/// Candidates are `(n/s)·1 + x` with `s = ⌊√dim⌋`, `0 ≤ n < s` and
/// `x ∈ ℕ^dim`, any two of which are at distance at least one. Power
/// levels are taken whole in increasing order; the last, partial level
/// keeps the points with the fewest unit-distance neighbours among the
/// lower levels, ties broken by descending lexicographic order.
pub fn diophantine_constellation(dim: usize, bits: u32) -> Result<Constellation> {
    if dim == 0 || dim > MAX_DIOPHANTINE_DIM {
        return Err(Error::Cap { what: "constellation dimension", limit: MAX_DIOPHANTINE_DIM, got: dim });
    }
    if bits == 0 || bits > MAX_DIOPHANTINE_BITS {
        return Err(Error::Cap {
            what: "constellation bits",
            limit: MAX_DIOPHANTINE_BITS as usize,
            got: bits as usize,
        });
    }
    let s = (dim as f64).sqrt().floor() as u32;
    let s = if (s + 1) * (s + 1) <= dim as u32 { s + 1 } else { s };
    let target = 1usize << bits;
    let mut chosen: Vec<Vec<u32>> = Vec::with_capacity(target);
    // Power of a candidate in units of 1/s is n·dim + s·q.
    let mut level = 0u32;
    while chosen.len() < target {
        let mut group = Vec::new();
        for n in 0..s {
            let base = n * dim as u32;
            if level < base || !(level - base).is_multiple_of(s) {
                continue;
            }
            let q = (level - base) / s;
            for x in compositions(dim, q) {
                group.push(x.iter().map(|&xi| n + s * xi).collect::<Vec<u32>>());
            }
        }
        group.sort_by(|a, b| b.cmp(a));
        let room = target - chosen.len();
        if group.len() <= room {
            chosen.extend(group);
        } else {
            let unit = u64::from(s) * u64::from(s);
            let mut scored: Vec<(usize, Vec<u32>)> = group
                .into_iter()
                .map(|p| {
                    let k = chosen.iter().filter(|c| dist_sq(c, &p) == unit).count();
                    (k, p)
                })
                .collect();
            scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
            let mut pick: Vec<Vec<u32>> = scored.into_iter().take(room).map(|(_, p)| p).collect();
            pick.sort_by(|a, b| b.cmp(a));
            chosen.extend(pick);
        }
        level += 1;
    }
    Constellation::from_grid(dim, s, chosen)
}

/// Cartesian product of per-dimension PAM sets `{0, …, 2^{K_i} − 1}` with
/// the even bit split; first coordinate most significant.
pub fn pam_product_constellation(dim: usize, bits: u32) -> Result<Constellation> {
    if dim == 0 {
        return Err(invalid("dimension", "must be at least 1"));
    }
    if bits == 0 {
        return Err(invalid("bits", "must be at least 1"));
    }
    if bits > 20 {
        return Err(Error::Cap { what: "PAM product bits", limit: 20, got: bits as usize });
    }
    let split = split_bits(bits, dim);
    let sizes: Vec<u32> = split.iter().map(|&k| 1u32 << k).collect();
    let grid = mixed_radix(&sizes);
    Constellation::from_grid(dim, 1, grid)
}

/// Every tuple with `t[i] < sizes[i]`, first entry most significant.
pub(crate) fn mixed_radix(sizes: &[u32]) -> Vec<Vec<u32>> {
    let total: usize = sizes.iter().map(|&s| s as usize).product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; sizes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for k in (0..sizes.len()).rev() {
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
    out
}
