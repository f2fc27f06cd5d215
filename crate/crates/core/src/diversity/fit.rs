//! Diversity estimates from simulated or semi-analytic error curves.
//!
//! The large-scale diversity is the limit of `−8 ln P / ln²ρ`. It is
//! estimated as the least-squares slope of `ln P` against `−ln²ρ/8` (with
//! intercept) over the top decade of SNR of the highest contiguous run of
//! reliable points: at least [`MIN_FIT_ERRORS`] errors for Monte Carlo
//! points, a positive rate for semi-analytic ones.

use crate::channel::{ErrorCurve, Method};
use crate::error::{Error, Result};

pub const MIN_FIT_ERRORS: u64 = 50;

const DECADE_DB: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityFit {
    pub d_hat: f64,
    pub intercept: f64,
    pub snr_lo: f64,
    pub snr_hi: f64,
    pub points: usize,
}

fn reliable(curve: &ErrorCurve, k: usize) -> bool {
    let r = curve.rate[k];
    let ok = r > 0.0 && r.is_finite();
    match curve.method {
        Method::MonteCarlo => ok && curve.errors[k] >= MIN_FIT_ERRORS,
        Method::SemiAnalytic => ok,
    }
}

/// Indices of the highest-SNR contiguous run of reliable points, in
/// increasing SNR.
fn top_run(curve: &ErrorCurve) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..curve.len()).collect();
    order.sort_by(|&a, &b| curve.snr_db[a].total_cmp(&curve.snr_db[b]));
    let top = order
        .iter()
        .rposition(|&k| reliable(curve, k))
        .ok_or_else(|| Error::Insufficient("no point with a usable error rate".into()))?;
    let mut start = top;
    while start > 0 && reliable(curve, order[start - 1]) {
        start -= 1;
    }
    Ok(order[start..=top].to_vec())
}

fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Insufficient("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn fit_points(curve: &ErrorCurve, idx: &[usize]) -> Result<DiversityFit> {
    if idx.len() < 3 {
        return Err(Error::Insufficient(format!("{} usable points, need at least 3", idx.len())));
    }
    let x: Vec<f64> = idx.iter().map(|&k| -(curve.snr_db[k] * std::f64::consts::LN_10 / 10.0).powi(2) / 8.0).collect();
    let y: Vec<f64> = idx.iter().map(|&k| curve.rate[k].ln()).collect();
    let (d_hat, intercept) = least_squares(&x, &y)?;
    let snr = idx.iter().map(|&k| curve.snr_db[k]);
    Ok(DiversityFit {
        d_hat,
        intercept,
        snr_lo: snr.clone().fold(f64::INFINITY, f64::min),
        snr_hi: snr.fold(f64::NEG_INFINITY, f64::max),
        points: idx.len(),
    })
}

/// `D̂` over the top SNR decade of the highest reliable run.
pub fn fit_diversity_from_curve(curve: &ErrorCurve) -> Result<DiversityFit> {
    let run = top_run(curve)?;
    let hi = curve.snr_db[*run.last().expect("nonempty run")];
    let window: Vec<usize> = run.into_iter().filter(|&k| curve.snr_db[k] >= hi - DECADE_DB - 1e-9).collect();
    fit_points(curve, &window)
}

/// `D̂` over the reliable points with `lo_db ≤ SNR ≤ hi_db`.
pub fn fit_window(curve: &ErrorCurve, lo_db: f64, hi_db: f64) -> Result<DiversityFit> {
    let idx: Vec<usize> = (0..curve.len())
        .filter(|&k| reliable(curve, k) && curve.snr_db[k] >= lo_db && curve.snr_db[k] <= hi_db)
        .collect();
    fit_points(curve, &idx)
}

/// Least-squares slope of `log10 P` against `log10 ρ` over the whole
/// highest reliable run.
pub fn loglog_slope(curve: &ErrorCurve) -> Result<f64> {
    let run = top_run(curve)?;
    if run.len() < 2 {
        return Err(Error::Insufficient("need at least 2 usable points".into()));
    }
    let x: Vec<f64> = run.iter().map(|&k| curve.snr_db[k] / 10.0).collect();
    let y: Vec<f64> = run.iter().map(|&k| curve.rate[k].log10()).collect();
    Ok(least_squares(&x, &y)?.0)
}
