//! Maximum-likelihood detectors.

use crate::codebook::Codebook;
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;

/// Index of the codeword minimising `‖Y − X_k H‖_F`, with the equivalent
/// codeword for fast-fading codes and the stacked `L·N × M` channel.
/// Ties go to the lowest index.
pub fn ml_detect(y: &Mat<f64>, h: &Mat<f64>, code: &Codebook) -> Result<usize> {
    if code.is_empty() {
        return Err(invalid("codebook", "no codewords"));
    }
    if h.rows() != code.effective_apertures() || y.rows() != code.slots() || y.cols() != h.cols() {
        return Err(Error::Dimension(format!(
            "Y is {}x{} and H is {}x{} for {}x{} equivalent codewords",
            y.rows(),
            y.cols(),
            h.rows(),
            h.cols(),
            code.slots(),
            code.effective_apertures()
        )));
    }
    let means: Vec<Mat<f64>> =
        (0..code.len()).map(|k| code.equivalent(k).matmul(h)).collect::<Result<_>>()?;
    Ok(nearest(y.data(), &means))
}

pub(crate) fn nearest(y: &[f64], means: &[Mat<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, m) in means.iter().enumerate() {
        let d: f64 = y.iter().zip(m.data()).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// `clamp(⌊t + ½⌋, 0, 2^bits − 1)`.
pub fn round_level(t: f64, bits: u32) -> u32 {
    let top = f64::from((1u32 << bits) - 1);
    (t + 0.5).floor().clamp(0.0, top) as u32
}

/// Symbol level of one slot of a linear code: `y` is the received row,
/// `v` the level vector of the slot, and the decision rounds the
/// projection of `y` onto `w = Hᵀv`.
pub fn fast_ml_detect(y: &[f64], h: &Mat<f64>, v: &[f64], bits: u32) -> Result<u32> {
    if v.len() != h.rows() || y.len() != h.cols() {
        return Err(Error::Dimension(format!(
            "y has {} entries, v has {}, H is {}x{}",
            y.len(),
            v.len(),
            h.rows(),
            h.cols()
        )));
    }
    let w = h.transpose().mat_vec(v);
    project_and_round(y, &w, bits)
}

pub(crate) fn project_and_round(y: &[f64], w: &[f64], bits: u32) -> Result<u32> {
    let norm_sq: f64 = w.iter().map(|x| x * x).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::DegenerateChannel);
    }
    let t = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / norm_sq;
    Ok(round_level(t, bits))
}
