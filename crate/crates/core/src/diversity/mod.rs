//! Diversity and coding-gain analysis of codebooks over log-normal fading.
//!
//! For a codeword pair with difference Gram `G`:
//!
//! * the large-scale diversity is `Σ_j Σ_{k ∈ link} σ_kj⁻²`, summed over the
//!   cover link of `G`;
//! * the small-scale loss is `∏_i c_i^{Ω_i}` with cover lengths `c_i`;
//! * the coding gain is `C_min = min{zᵀGz : z ≥ 0, ‖z‖ = 1}`.
//!
//! Codebook values take the worst pair. Fast-fading codes are analysed in
//! equivalent coordinates with the channel statistics tiled per slot.

mod fit;
mod golden;

use rayon::prelude::*;
use std::fmt::Write as _;

use crate::channel::{q_function, ChannelStats};
use crate::codebook::{diophantine_constellation, pam_product_constellation, Codebook, Fading, OmegaWeights};
use crate::cover::{cover_lengths, cover_order, min_unit_quadratic, GramMatrix};
use crate::error::{invalid, Error, Result};
use crate::fmt::num;
use crate::linalg::{symmetric_eigen, Mat};

pub use fit::{fit_diversity_from_curve, fit_window, loglog_slope, DiversityFit, MIN_FIT_ERRORS};
pub use golden::{golden_grid_search, golden_min_metric, golden_objective, GridSearch};

/// Per-pair terms of a [`DiversityReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairTerms {
    pub i: usize,
    pub j: usize,
    pub cover_order: usize,
    pub large_scale: f64,
    /// `ln ∏ c_i^{Ω_i}`; infinite without full cover.
    pub ln_loss: f64,
    /// Zero without full cover.
    pub c_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub large_scale: f64,
    pub worst_pair: (usize, usize),
    /// Worst-case loss and its pair; `None` when some pair lacks full cover.
    pub small_scale_loss: Option<(f64, (usize, usize))>,
    pub ln_small_scale_loss: Option<f64>,
    pub coding_gain: f64,
    pub pairs: Vec<PairTerms>,
}

impl DiversityReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "large_scale_diversity = {}", self.large_scale);
        let _ = writeln!(out, "large_scale_worst_pair = {},{}", self.worst_pair.0, self.worst_pair.1);
        match self.small_scale_loss {
            Some((v, (a, b))) => {
                let _ = writeln!(out, "small_scale_loss = {v}");
                let _ = writeln!(out, "ln_small_scale_loss = {}", self.ln_small_scale_loss.unwrap_or(f64::NAN));
                let _ = writeln!(out, "small_scale_worst_pair = {a},{b}");
            }
            None => {
                let _ = writeln!(out, "small_scale_loss = inf");
            }
        }
        let _ = writeln!(out, "coding_gain = {}", self.coding_gain);
        let _ = writeln!(out, "pairs = {}", self.pairs.len());
        out
    }

    /// `i,j,cover_order,large_scale,loss` with zero-based codeword indices.
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("i,j,cover_order,large_scale,loss\n");
        for p in &self.pairs {
            let loss = if p.ln_loss.is_finite() { num(p.ln_loss.exp()) } else { "inf".into() };
            let _ = writeln!(out, "{},{},{},{},{}", p.i, p.j, p.cover_order, num(p.large_scale), loss);
        }
        out
    }
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect()
}

fn effective_omega(code: &Codebook, omega: &OmegaWeights) -> Result<Vec<f64>> {
    let w = omega.omega();
    if w.len() == code.effective_apertures() {
        return Ok(w.to_vec());
    }
    if w.len() == code.apertures() && code.fading() == Fading::Fast {
        return Ok((0..code.slots()).flat_map(|_| w.iter().copied()).collect());
    }
    Err(Error::Dimension(format!("{} weights for {} apertures", w.len(), code.apertures())))
}

fn check_stats(code: &Codebook, stats: &ChannelStats) -> Result<ChannelStats> {
    if stats.n() != code.apertures() {
        return Err(Error::Dimension(format!(
            "channel has {} transmit apertures, codebook has {}",
            stats.n(),
            code.apertures()
        )));
    }
    Ok(match code.fading() {
        Fading::Block => stats.clone(),
        Fading::Fast => stats.tiled(code.slots()),
    })
}

fn pair_large_scale(g: &GramMatrix, omega: &[f64]) -> Result<(usize, f64)> {
    let (order, link) = cover_order(g)?;
    Ok((order, link.iter().fold(0.0, |acc, &k| acc + omega[k])))
}

fn pair_ln_loss(g: &GramMatrix, omega: &[f64]) -> Result<f64> {
    let c = cover_lengths(g)?;
    Ok(c.iter().zip(omega).map(|(c, w)| w * c.ln()).sum())
}

/// Minimum large-scale diversity over codeword pairs and the first pair
/// attaining it.
pub fn large_scale_diversity(code: &Codebook, stats: &ChannelStats) -> Result<(f64, (usize, usize))> {
    let omega = check_stats(code, stats)?.omega();
    let terms: Vec<f64> = all_pairs(code.len())
        .into_par_iter()
        .map(|(a, b)| Ok(pair_large_scale(&code.difference_gram(a, b)?, &omega)?.1))
        .collect::<Result<_>>()?;
    Ok(worst(&terms, code.len(), |x, best| x < best))
}

fn worst(terms: &[f64], n: usize, better: impl Fn(f64, f64) -> bool) -> (f64, (usize, usize)) {
    let pairs = all_pairs(n);
    let mut best = (terms[0], pairs[0]);
    for (t, p) in terms.iter().zip(&pairs).skip(1) {
        if better(*t, best.0) {
            best = (*t, *p);
        }
    }
    best
}

/// Worst-case `∏ c_i^{Ω_i}` over codeword pairs, as `(ln loss, pair)`.
///
/// `omega` has one weight per transmit aperture, or per equivalent column
/// for fast-fading codes.
pub fn ln_small_scale_loss(code: &Codebook, omega: &OmegaWeights) -> Result<(f64, (usize, usize))> {
    let w = effective_omega(code, omega)?;
    let pairs = all_pairs(code.len());
    let terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let g = code.difference_gram(a, b)?;
            let (order, _) = cover_order(&g)?;
            if order < g.n() {
                return Err(Error::NotFullCover(a, b));
            }
            pair_ln_loss(&g, &w)
        })
        .collect::<Result<_>>()?;
    Ok(worst(&terms, code.len(), |x, best| x > best))
}

/// Worst-case `∏ c_i^{Ω_i}` over codeword pairs and the attaining pair.
pub fn small_scale_loss(code: &Codebook, omega: &OmegaWeights) -> Result<(f64, (usize, usize))> {
    ln_small_scale_loss(code, omega).map(|(l, p)| (l.exp(), p))
}

/// Minimum of `C_min` over codeword pairs; zero when some pair lacks full
/// cover.
pub fn coding_gain(code: &Codebook) -> Result<f64> {
    let terms: Vec<f64> = all_pairs(code.len())
        .into_par_iter()
        .map(|(a, b)| match min_unit_quadratic(&code.difference_gram(a, b)?) {
            Ok(c) => Ok(c),
            Err(Error::ZeroCover) => Ok(0.0),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(terms.into_iter().fold(f64::INFINITY, f64::min))
}

/// All three criteria with per-pair terms.
pub fn diversity_report(code: &Codebook, stats: &ChannelStats) -> Result<DiversityReport> {
    let eff = check_stats(code, stats)?;
    let omega = eff.omega();
    let pairs: Vec<PairTerms> = all_pairs(code.len())
        .into_par_iter()
        .map(|(i, j)| {
            let g = code.difference_gram(i, j)?;
            let (cover_order, large_scale) = pair_large_scale(&g, &omega)?;
            let full = cover_order == g.n();
            let ln_loss = if full { pair_ln_loss(&g, &omega)? } else { f64::INFINITY };
            let c_min = if full { min_unit_quadratic(&g)? } else { 0.0 };
            Ok(PairTerms { i, j, cover_order, large_scale, ln_loss, c_min })
        })
        .collect::<Result<_>>()?;
    let large: Vec<f64> = pairs.iter().map(|p| p.large_scale).collect();
    let (large_scale, worst_pair) = worst(&large, code.len(), |x, b| x < b);
    let ln: Vec<f64> = pairs.iter().map(|p| p.ln_loss).collect();
    let (ln_max, loss_pair) = worst(&ln, code.len(), |x, b| x > b);
    let full = ln_max.is_finite();
    Ok(DiversityReport {
        large_scale,
        worst_pair,
        small_scale_loss: full.then(|| (ln_max.exp(), loss_pair)),
        ln_small_scale_loss: full.then_some(ln_max),
        coding_gain: pairs.iter().map(|p| p.c_min).fold(f64::INFINITY, f64::min),
        pairs,
    })
}

/// `((2^K − 1)/2)^Ω · ∏ (Ω/Ω_i)^{Ω_i}`, the least worst-case loss of any
/// linear code with `K` bits per slot.
pub fn linear_loss_lower_bound(bits: u32, omega: &OmegaWeights) -> Result<f64> {
    ln_linear_loss_lower_bound(bits, omega).map(f64::exp)
}

pub fn ln_linear_loss_lower_bound(bits: u32, omega: &OmegaWeights) -> Result<f64> {
    if bits == 0 || bits > 30 {
        return Err(invalid("bits", format!("must be in 1..=30, got {bits}")));
    }
    let total = omega.total();
    let base = (f64::from((1u32 << bits) - 1) / 2.0).ln() * total;
    Ok(base + omega.omega().iter().map(|w| w * (total / w).ln()).sum::<f64>())
}

/// Evaluated PEP bounds; the upper one drops a little-o remainder and is
/// only asymptotic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepBounds {
    pub lower: f64,
    pub upper: f64,
    /// `ln lower`; `−∞` when the lower expression is not positive.
    pub ln_lower: f64,
    pub ln_upper: f64,
}

/// Lower and (asymptotic) upper bounds on the pairwise error probability
/// with conditional PEP `Q(√(ρ/N · Σ_j h_jᵀ G h_j) / 2)`.
pub fn pep_bounds(g: &GramMatrix, stats: &ChannelStats, snr: f64) -> Result<PepBounds> {
    let n = g.n();
    if stats.n() != n {
        return Err(Error::Dimension(format!("Gram is {n}x{n}, channel has {} apertures", stats.n())));
    }
    if !(snr.is_finite() && snr > std::f64::consts::E.powi(2)) {
        return Err(invalid("snr", format!("must exceed e², got {snr}")));
    }
    let c_min = min_unit_quadratic(g)?;
    let c = cover_lengths(g)?;
    let (eig, _) = symmetric_eigen(g.entries());
    let lambda_max = *eig.last().expect("nonempty Gram");
    let m = stats.m();
    let (mu, sigma) = (stats.mu(), stats.sigma());
    let omega = stats.omega();
    let omega_tilde = stats.omega_tilde();
    let big_omega: f64 = omega.iter().sum();
    let big_tilde: f64 = omega_tilde.iter().sum();
    let ln_rho = snr.ln();
    let half_ln_var: f64 = sigma.data().iter().map(|s| s.ln()).sum();
    let (nn, mm) = (n as f64, m as f64);

    let ln_cl = half_ln_var + q_function((mm / (4.0 * nn)).sqrt()).ln()
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - lambda_max.ln() * big_tilde;
    let mut sign = 1.0;
    let mut ln_lower = ln_cl;
    for i in 0..n {
        for j in 0..m {
            let a = (ln_rho + 2.0 * lambda_max.ln() + 2.0 * mu[(i, j)]) / (2.0 * sigma[(i, j)]);
            let f = (1.0 - a.powi(-2)) / a;
            if f <= 0.0 {
                sign = -sign;
            }
            ln_lower += f.abs().ln() - 0.5 * a * a;
        }
    }
    let lower = sign * ln_lower.exp();

    let ln_nomega = (nn * big_omega).ln();
    let ln_cu = -(mm * nn / 2.0) * (big_omega * c_min / (nn * nn)).ln()
        - (2f64.ln() + half_ln_var)
        + c.iter()
            .zip(omega.iter().zip(&omega_tilde))
            .map(|(ci, (w, wt))| (wt - w * ln_nomega) * ci.ln())
            .sum::<f64>();
    let ln_loss: f64 = c.iter().zip(&omega).map(|(ci, w)| w * ci.ln()).sum();
    let x = snr / (ln_rho * ln_rho);
    let exponent = 0.5 * ln_loss - 0.5 * big_omega * ln_nomega - 0.25 * big_tilde;
    let ln_upper = ln_cu + exponent * x.ln() - mm * nn * ln_rho.ln() - big_omega * x.ln().powi(2) / 8.0;
    Ok(PepBounds {
        lower,
        upper: ln_upper.exp(),
        ln_lower: if lower > 0.0 { ln_lower } else { f64::NEG_INFINITY },
        ln_upper,
    })
}

/// `E[Q(√(ρ/N · Σ_j h_jᵀ G h_j) / 2)]` by tensor trapezoid quadrature with
/// `nodes` points per log-normal entry over the standardised range
/// `[−20, 8]`.
pub fn pairwise_error_probability(g: &GramMatrix, stats: &ChannelStats, snr: f64, nodes: usize) -> Result<f64> {
    let n = g.n();
    if stats.n() != n {
        return Err(Error::Dimension(format!("Gram is {n}x{n}, channel has {} apertures", stats.n())));
    }
    let m = stats.m();
    let dims = n * m;
    let total = u32::try_from(dims)
        .ok()
        .and_then(|d| nodes.checked_pow(d))
        .filter(|&t| t <= crate::channel::MAX_QUADRATURE_POINTS && nodes >= 2)
        .ok_or_else(|| invalid("nodes", "quadrature grid is empty or too large"))?;
    let step = 28.0 / (nodes - 1) as f64;
    let t: Vec<f64> = (0..nodes).map(|k| -20.0 + step * k as f64).collect();
    let raw: Vec<f64> = t
        .iter()
        .enumerate()
        .map(|(k, &x)| crate::channel::normal_pdf(x) * if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 })
        .collect();
    let norm: f64 = raw.iter().sum();
    let gm = g.entries();
    let scale = snr / n as f64;
    let chunk = 4096;
    let parts: Vec<f64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut h = Mat::zeros(n, m);
            let mut acc = 0.0;
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = idx;
                let mut w = 1.0;
                for e in 0..dims {
                    let k = rest % nodes;
                    rest /= nodes;
                    let (i, j) = (e / m, e % m);
                    h[(i, j)] = (stats.mu()[(i, j)] + stats.sigma()[(i, j)] * t[k]).exp();
                    w *= raw[k] / norm;
                }
                let mut d2 = 0.0;
                for j in 0..m {
                    let col: Vec<f64> = (0..n).map(|i| h[(i, j)]).collect();
                    let gh = gm.mat_vec(&col);
                    d2 += col.iter().zip(&gh).map(|(a, b)| a * b).sum::<f64>();
                }
                acc += w * q_function((scale * d2.max(0.0)).sqrt() / 2.0);
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// Mean powers of the Diophantine and the PAM product constellations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub diophantine: f64,
    pub pam: f64,
    pub ratio: f64,
}

pub fn energy_report(dim: usize, bits: u32) -> Result<EnergyReport> {
    let s = diophantine_constellation(dim, bits)?;
    let p = pam_product_constellation(dim, bits)?;
    let (sn, sd) = s.total_power_exact();
    let (pn, pd) = p.total_power_exact();
    let count = s.len() as f64;
    let diophantine = sn as f64 / sd as f64 / count;
    let pam = pn as f64 / pd as f64 / count;
    Ok(EnergyReport { diophantine, pam, ratio: (sn * pd) as f64 / (pn * sd) as f64 })
}
