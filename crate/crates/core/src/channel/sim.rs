//! Monte Carlo codeword error rate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::detect::{nearest, project_and_round};
use super::rng::{channel_rng, noise_rng, MAX_TRIALS};
use super::{check_grid, draw_channel, ChannelStats, ErrorCurve, Method, NoiseModel};
use crate::codebook::{Codebook, Fading, Structure};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    /// Exhaustive search over all codewords.
    Brute,
    /// Per-slot projection and rounding; linear codes only.
    Fast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Maximum trials per SNR point.
    pub trials: u64,
    pub seed: u64,
    pub detector: Detector,
    /// A point stops after the first batch that brings its error count to
    /// this value; `None` always runs every trial.
    pub min_errors: Option<u64>,
    /// Trials per scheduling batch. Results do not depend on it unless
    /// early stopping is enabled.
    pub batch: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { trials: 100_000, seed: 0, detector: Detector::Brute, min_errors: Some(200), batch: 8192 }
    }
}

/// Channel matrix seen by the equivalent codewords.
pub(crate) fn effective_stats(code: &Codebook, stats: &ChannelStats) -> Result<ChannelStats> {
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

/// Codeword error rate by simulation: per trial a channel and a uniform
/// codeword are drawn once and reused at every SNR point, each point
/// adding its own noise.
pub fn simulate_error_rate(
    code: &Codebook,
    stats: &ChannelStats,
    snr_db: &[f64],
    cfg: &SimConfig,
) -> Result<ErrorCurve> {
    check_grid(snr_db)?;
    if cfg.trials == 0 || cfg.trials > MAX_TRIALS {
        return Err(Error::Cap { what: "trials", limit: MAX_TRIALS as usize, got: cfg.trials as usize });
    }
    if cfg.batch == 0 {
        return Err(invalid("batch", "must be positive"));
    }
    if cfg.min_errors == Some(0) {
        return Err(invalid("min_errors", "must be positive"));
    }
    let linear = match (cfg.detector, code.structure()) {
        (Detector::Fast, Structure::Linear { slot_bits, levels }) => Some((slot_bits, levels)),
        (Detector::Fast, Structure::General) => {
            return Err(Error::Incompatible(format!(
                "fast detection needs a linear code, `{}` is not",
                code.family().name()
            )))
        }
        (Detector::Brute, _) => None,
    };
    let eff = effective_stats(code, stats)?;
    let m = eff.m();
    let stds: Vec<f64> =
        snr_db.iter().map(|&db| NoiseModel::from_snr_db(db).map(|n| n.entry_std(m))).collect::<Result<_>>()?;

    let points = snr_db.len();
    let mut errors = vec![0u64; points];
    let mut trials = vec![0u64; points];
    let mut active: Vec<usize> = (0..points).collect();
    let mut start = 0u64;
    while start < cfg.trials && !active.is_empty() {
        let end = (start + cfg.batch).min(cfg.trials);
        let counts = (start..end)
            .into_par_iter()
            .map(|t| run_trial(code, &eff, linear, &stds, &active, cfg.seed, t))
            .try_reduce(|| vec![0u64; active.len()], |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            })?;
        for (slot, &p) in active.iter().enumerate() {
            errors[p] += counts[slot];
            trials[p] += end - start;
        }
        start = end;
        if let Some(limit) = cfg.min_errors {
            active.retain(|&p| errors[p] < limit);
        }
    }
    let rate: Vec<f64> = errors.iter().zip(&trials).map(|(&e, &n)| e as f64 / n as f64).collect();
    let ci_half = rate
        .iter()
        .zip(&trials)
        .map(|(&p, &n)| 1.96 * (p * (1.0 - p) / n as f64).sqrt())
        .collect();
    Ok(ErrorCurve { snr_db: snr_db.to_vec(), rate, trials, errors, ci_half, method: Method::MonteCarlo })
}

type LinearParts<'a> = Option<(&'a Vec<u32>, &'a Vec<Vec<f64>>)>;

fn run_trial(
    code: &Codebook,
    stats: &ChannelStats,
    linear: LinearParts<'_>,
    stds: &[f64],
    active: &[usize],
    seed: u64,
    trial: u64,
) -> Result<Vec<u64>> {
    let mut rng = channel_rng(seed, trial);
    let h = draw_channel(stats, &mut rng);
    let sent = rng.random_range(0..code.len());
    let mean = code.equivalent(sent).matmul(&h)?;
    let mut out = vec![0u64; active.len()];
    match linear {
        None => {
            let means: Vec<Mat<f64>> =
                (0..code.len()).map(|k| code.equivalent(k).matmul(&h)).collect::<Result<_>>()?;
            let mut y = vec![0.0; mean.data().len()];
            for (slot, &p) in active.iter().enumerate() {
                add_noise(&mut y, mean.data(), stds[p], seed, p, trial);
                out[slot] = u64::from(nearest(&y, &means) != sent);
            }
        }
        Some((slot_bits, levels)) => {
            let ht = h.transpose();
            let w: Vec<Vec<f64>> = levels.iter().map(|v| ht.mat_vec(v)).collect();
            let label = &code.labels()[sent];
            let cols = mean.cols();
            let mut y = vec![0.0; mean.data().len()];
            for (slot, &p) in active.iter().enumerate() {
                add_noise(&mut y, mean.data(), stds[p], seed, p, trial);
                let mut wrong = false;
                for (l, bits) in slot_bits.iter().enumerate() {
                    let k = project_and_round(&y[l * cols..(l + 1) * cols], &w[l], *bits)?;
                    wrong |= k != label[l];
                }
                out[slot] = u64::from(wrong);
            }
        }
    }
    Ok(out)
}

fn add_noise(y: &mut [f64], mean: &[f64], std: f64, seed: u64, point: usize, trial: u64) {
    let mut rng = noise_rng(seed, point, trial);
    for (out, m) in y.iter_mut().zip(mean) {
        let g: f64 = StandardNormal.sample(&mut rng);
        *out = m + std * g;
    }
}
