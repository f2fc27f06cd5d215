//! Semi-analytic codeword error rate of linear codes.
//!
//! Conditioned on `H`, slot `ℓ` of a linear code is a PAM link whose
//! adjacent received means differ by `w_ℓ = Hᵀv_ℓ`. With per-entry noise
//! standard deviation `s = √(σ_N²/M)` the exact conditional symbol error
//! probability is `2(2^K−1)/2^K · Q(‖w_ℓ‖/(2s))`, and the slots fail
//! independently. The conditional rate is then averaged over channel
//! draws or by tensor quadrature over the log-normal entries.

use rayon::prelude::*;

use super::qfunc::{normal_pdf, q_function};
use super::rng::{channel_rng, MAX_TRIALS};
use super::sim::effective_stats;
use super::{check_grid, draw_channel, ErrorCurve, Method, NoiseModel};
use super::ChannelStats;
use crate::codebook::{Codebook, Structure};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;

/// Cap on the number of tensor quadrature nodes.
pub const MAX_QUADRATURE_POINTS: usize = 20_000_000;

const T_LOW: f64 = -20.0;
const T_HIGH: f64 = 8.0;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Averaging {
    /// Mean over channel draws from the trial streams of `seed`.
    Sampled { draws: u64, seed: u64 },
    /// Trapezoid rule with `nodes` points per log-normal entry, on the
    /// standardised range `[−20, 8]`.
    Quadrature { nodes: usize },
}

/// `2(2^bits − 1)/2^bits · Q(spacing/(2·std))`.
pub fn slot_symbol_error(bits: u32, spacing: f64, std: f64) -> f64 {
    let size = f64::from(1u32 << bits);
    2.0 * (size - 1.0) / size * q_function(spacing / (2.0 * std))
}

/// `1 − ∏(1 − p_ℓ)`, accurate when every `p_ℓ` is tiny.
pub fn codeword_error_from_slots(p: &[f64]) -> f64 {
    -p.iter().map(|&x| (-x).ln_1p()).sum::<f64>().exp_m1()
}

fn linear_parts(code: &Codebook) -> Result<(&[u32], &[Vec<f64>])> {
    match code.structure() {
        Structure::Linear { slot_bits, levels } => Ok((slot_bits, levels)),
        Structure::General => Err(Error::Incompatible(format!(
            "semi-analytic rates need a linear code, `{}` is not",
            code.family().name()
        ))),
    }
}

/// Codeword error probability of a linear code given the channel `h`
/// (stacked for fast fading) and total noise variance `sigma_n_sq`.
pub fn conditional_codeword_error(code: &Codebook, h: &Mat<f64>, sigma_n_sq: f64) -> Result<f64> {
    let (bits, levels) = linear_parts(code)?;
    if h.rows() != code.effective_apertures() {
        return Err(Error::Dimension(format!(
            "H has {} rows, codebook needs {}",
            h.rows(),
            code.effective_apertures()
        )));
    }
    let std = NoiseModel::new(sigma_n_sq)?.entry_std(h.cols());
    let spacing = spacings(h, levels);
    let p: Vec<f64> = bits.iter().zip(&spacing).map(|(&k, &d)| slot_symbol_error(k, d, std)).collect();
    Ok(codeword_error_from_slots(&p))
}

fn spacings(h: &Mat<f64>, levels: &[Vec<f64>]) -> Vec<f64> {
    let ht = h.transpose();
    levels.iter().map(|v| ht.mat_vec(v).iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
}

fn errors_at(bits: &[u32], spacing: &[f64], stds: &[f64], out: &mut [f64], weight: f64) {
    let mut p = vec![0.0; bits.len()];
    for (k, &s) in stds.iter().enumerate() {
        for l in 0..bits.len() {
            p[l] = slot_symbol_error(bits[l], spacing[l], s);
        }
        out[k] += weight * codeword_error_from_slots(&p);
    }
}

/// Codeword error rate of a linear code from the exact conditional error
/// probability, averaged over the channel.
pub fn semianalytic_error_rate(
    code: &Codebook,
    stats: &ChannelStats,
    snr_db: &[f64],
    averaging: &Averaging,
) -> Result<ErrorCurve> {
    check_grid(snr_db)?;
    let (bits, levels) = linear_parts(code)?;
    let eff = effective_stats(code, stats)?;
    let stds: Vec<f64> = snr_db
        .iter()
        .map(|&db| NoiseModel::from_snr_db(db).map(|n| n.entry_std(eff.m())))
        .collect::<Result<_>>()?;
    let points = snr_db.len();
    let add = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<f64>>();

    match *averaging {
        Averaging::Sampled { draws, seed } => {
            if !(2..=MAX_TRIALS).contains(&draws) {
                return Err(Error::Cap { what: "channel draws", limit: MAX_TRIALS as usize, got: draws as usize });
            }
            let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..draws.div_ceil(CHUNK as u64))
                .into_par_iter()
                .map(|c| {
                    let mut sum = vec![0.0; points];
                    let mut sq = vec![0.0; points];
                    let mut one = vec![0.0; points];
                    for t in c * CHUNK as u64..((c + 1) * CHUNK as u64).min(draws) {
                        let h = draw_channel(&eff, &mut channel_rng(seed, t));
                        one.iter_mut().for_each(|x| *x = 0.0);
                        errors_at(bits, &spacings(&h, levels), &stds, &mut one, 1.0);
                        for k in 0..points {
                            sum[k] += one[k];
                            sq[k] += one[k] * one[k];
                        }
                    }
                    (sum, sq)
                })
                .collect();
            let (sum, sq) = chunks
                .into_iter()
                .fold((vec![0.0; points], vec![0.0; points]), |(a, b), (c, d)| (add(a, c), add(b, d)));
            let n = draws as f64;
            let rate: Vec<f64> = sum.iter().map(|s| s / n).collect();
            let ci_half = rate
                .iter()
                .zip(&sq)
                .map(|(&mean, &q)| {
                    let var = ((q - n * mean * mean) / (n - 1.0)).max(0.0);
                    1.96 * (var / n).sqrt()
                })
                .collect();
            Ok(ErrorCurve {
                snr_db: snr_db.to_vec(),
                rate,
                trials: vec![draws; points],
                errors: vec![0; points],
                ci_half,
                method: Method::SemiAnalytic,
            })
        }
        Averaging::Quadrature { nodes } => {
            if nodes < 2 {
                return Err(invalid("nodes", "need at least two nodes per dimension"));
            }
            let dims = eff.n() * eff.m();
            let total = u32::try_from(dims)
                .ok()
                .and_then(|d| nodes.checked_pow(d))
                .filter(|&t| t <= MAX_QUADRATURE_POINTS)
                .ok_or(Error::Cap { what: "quadrature nodes", limit: MAX_QUADRATURE_POINTS, got: usize::MAX })?;
            let step = (T_HIGH - T_LOW) / (nodes - 1) as f64;
            let abscissa: Vec<f64> = (0..nodes).map(|k| T_LOW + step * k as f64).collect();
            let raw: Vec<f64> = abscissa
                .iter()
                .enumerate()
                .map(|(k, &t)| normal_pdf(t) * if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 })
                .collect();
            let norm: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / norm).collect();
            let (mu, sigma) = (eff.mu(), eff.sigma());
            let cols = eff.m();
            let sums: Vec<Vec<f64>> = (0..total.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut acc = vec![0.0; points];
                    let mut h = Mat::zeros(eff.n(), cols);
                    for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                        let mut rest = idx;
                        let mut w = 1.0;
                        for e in 0..dims {
                            let k = rest % nodes;
                            rest /= nodes;
                            let (i, j) = (e / cols, e % cols);
                            h[(i, j)] = (mu[(i, j)] + sigma[(i, j)] * abscissa[k]).exp();
                            w *= weights[k];
                        }
                        errors_at(bits, &spacings(&h, levels), &stds, &mut acc, w);
                    }
                    acc
                })
                .collect();
            let rate = sums.into_iter().fold(vec![0.0; points], add);
            Ok(ErrorCurve {
                snr_db: snr_db.to_vec(),
                rate: rate.into_iter().map(|r| r.clamp(0.0, 1.0)).collect(),
                trials: vec![total as u64; points],
                errors: vec![0; points],
                ci_half: vec![0.0; points],
                method: Method::SemiAnalytic,
            })
        }
    }
}
