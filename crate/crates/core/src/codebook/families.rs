//! Code family constructors.

use super::constellation::mixed_radix;
use super::{Codebook, Constellation, Fading, Family, OmegaWeights, Structure};
use crate::error::{invalid, Result};
use crate::linalg::Mat;

/// `Φ = (1 + √5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

fn check_bits(bits: &[u32]) -> Result<()> {
    if bits.is_empty() {
        return Err(invalid("bits", "need at least one slot"));
    }
    if let Some(k) = bits.iter().find(|&&k| k == 0 || k > 16) {
        return Err(invalid("bits", format!("per-slot bits must be in 1..=16, got {k}")));
    }
    if bits.iter().sum::<u32>() > 20 {
        return Err(invalid("bits", "more than 2^20 codewords"));
    }
    Ok(())
}

/// Per-slot PAM code with row `ℓ` equal to `p_ℓ · levels[ℓ]`.
fn slotwise_linear(family: Family, bits: &[u32], levels: Vec<Vec<f64>>) -> Result<Codebook> {
    let sizes: Vec<u32> = bits.iter().map(|&k| 1 << k).collect();
    let n = levels[0].len();
    let labels = mixed_radix(&sizes);
    let codewords = labels
        .iter()
        .map(|p| {
            let mut x = Mat::zeros(bits.len(), n);
            for (l, &pl) in p.iter().enumerate() {
                for i in 0..n {
                    x[(l, i)] = f64::from(pl) * levels[l][i];
                }
            }
            x
        })
        .collect();
    let structure = Structure::Linear { slot_bits: bits.to_vec(), levels };
    Codebook::new(family, Fading::Block, codewords, labels, bits.len() as f64, structure)
}

/// Repetition code: row `ℓ` is `2/(N(2^{K_ℓ}−1)) · p_ℓ · 1ᵀ`.
pub fn repetition_code(bits: &[u32], apertures: usize) -> Result<Codebook> {
    check_bits(bits)?;
    if apertures == 0 {
        return Err(invalid("apertures", "must be at least 1"));
    }
    let levels = bits
        .iter()
        .map(|&k| vec![2.0 / (apertures as f64 * f64::from((1u32 << k) - 1)); apertures])
        .collect();
    slotwise_linear(Family::Repetition, bits, levels)
}

/// Ω-weighted linear code: row `ℓ` is `2/(Ω(2^{K_ℓ}−1)) · p_ℓ · [Ω_1 … Ω_N]`.
pub fn optimal_linear_code(bits: &[u32], omega: &OmegaWeights) -> Result<Codebook> {
    check_bits(bits)?;
    let levels = bits
        .iter()
        .map(|&k| {
            let c = 2.0 / (omega.total() * f64::from((1u32 << k) - 1));
            omega.omega().iter().map(|w| c * w).collect()
        })
        .collect();
    slotwise_linear(Family::OptimalLinear, bits, levels)
}

/// Zero-cover code: both slots send the OOK pair `(x_1, x_2)`.
pub fn zcc_code() -> Result<Codebook> {
    let labels = mixed_radix(&[2, 2]);
    let codewords = labels
        .iter()
        .map(|p| {
            let (a, b) = (f64::from(p[0]), f64::from(p[1]));
            Mat::from_vec(2, 2, vec![a, b, a, b]).expect("2x2")
        })
        .collect();
    Codebook::new(Family::ZeroCover, Fading::Block, codewords, labels, 2.0, Structure::General)
}

/// Collaborative code: the point `s` is sent as `scale · [Ω_i s_ℓ]` with
/// `scale = L·|S| / (Ω·Σ_s 1ᵀs)`.
pub fn cstbc_from_constellation(s: &Constellation, omega: &OmegaWeights) -> Result<Codebook> {
    let (num, den) = s.total_power_exact();
    if num == 0 {
        return Err(invalid("constellation", "total power is zero"));
    }
    let l = s.dim();
    let total = num as f64 / den as f64;
    let scale = l as f64 * s.len() as f64 / (omega.total() * total);
    let n = omega.len();
    let codewords = s
        .points()
        .iter()
        .map(|p| {
            let mut x = Mat::zeros(l, n);
            for (r, &pr) in p.iter().enumerate() {
                for (i, w) in omega.omega().iter().enumerate() {
                    x[(r, i)] = scale * pr * w;
                }
            }
            x
        })
        .collect();
    let labels = (0..s.len() as u32).map(|k| vec![k]).collect();
    Codebook::new(Family::Collaborative, Fading::Block, codewords, labels, l as f64, Structure::General)
}

/// Design matrices `(F, G)`, each `N × 2`, with rows
/// `(√5/10)(Ω_i/Ω)(Φ−1, Φ)` and `(√5/10)(Ω_i/Ω)(Φ, Φ−1)`.
pub fn golden_design(omega: &OmegaWeights) -> (Mat<f64>, Mat<f64>) {
    let n = omega.len();
    let phi = GOLDEN_RATIO;
    let mut f = Mat::zeros(n, 2);
    let mut g = Mat::zeros(n, 2);
    for (i, w) in omega.omega().iter().enumerate() {
        let v = 5f64.sqrt() / 10.0 * w / omega.total();
        f[(i, 0)] = v * (phi - 1.0);
        f[(i, 1)] = v * phi;
        g[(i, 0)] = v * phi;
        g[(i, 1)] = v * (phi - 1.0);
    }
    (f, g)
}

/// Golden code for two fast-fading channel uses.
///
/// Slot one sends `Φs_1 + (Φ−1)s_2`, slot two `(Φ−1)s_1 + Φs_2`, on
/// aperture `i` with weight `Ω_i/Ω`, scaled by
/// `4/((2Φ−1)(2^{K_1} + 2^{K_2} − 2))`.
pub fn golden_code(k1: u32, k2: u32, omega: &OmegaWeights) -> Result<Codebook> {
    check_bits(&[k1, k2])?;
    let phi = GOLDEN_RATIO;
    let kappa = 4.0 / ((2.0 * phi - 1.0) * f64::from((1u32 << k1) + (1u32 << k2) - 2));
    let n = omega.len();
    let labels = mixed_radix(&[1 << k1, 1 << k2]);
    let codewords = labels
        .iter()
        .map(|s| {
            let (s1, s2) = (f64::from(s[0]), f64::from(s[1]));
            let u1 = phi * s1 + (phi - 1.0) * s2;
            let u2 = (phi - 1.0) * s1 + phi * s2;
            let mut x = Mat::zeros(2, n);
            for (i, w) in omega.omega().iter().enumerate() {
                let c = kappa * w / omega.total();
                x[(0, i)] = c * u1;
                x[(1, i)] = c * u2;
            }
            x
        })
        .collect();
    Codebook::new(Family::Golden, Fading::Fast, codewords, labels, 2.0, Structure::General)
}

/// Space-time repetition code over two fast-fading uses of a 2-aperture
/// link: every entry equals `(s_1 + 2^{K_1}s_2)/(2^{K_1+K_2} − 1)`.
pub fn strc_code(k1: u32, k2: u32) -> Result<Codebook> {
    check_bits(&[k1, k2])?;
    let denom = f64::from((1u32 << (k1 + k2)) - 1);
    let labels = mixed_radix(&[1 << k1, 1 << k2]);
    let codewords = labels
        .iter()
        .map(|s| {
            let v = f64::from(s[0] + (s[1] << k1)) / denom;
            Mat::filled(2, 2, v)
        })
        .collect();
    Codebook::new(Family::SpaceTimeRepetition, Fading::Fast, codewords, labels, 2.0, Structure::General)
}
