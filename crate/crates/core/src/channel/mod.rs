//! Log-normal IM/DD MIMO channel, detection and error-rate estimation.
//!
//! The received block is `Y = X H + Z`, with `X` the `L × N` equivalent
//! codeword, `H` the `N × M` channel with `h_ij = exp(z_ij)`,
//! `z_ij ~ N(μ_ij, σ_ij²)`, and `Z` white Gaussian noise of per-entry
//! variance `σ_N²/M`. The SNR is `ρ = 1/σ_N² = 10^{dB/10}`.

mod detect;
mod qfunc;
pub mod rng;
mod semi;
mod sim;

use rand_distr::{Distribution, StandardNormal};
use std::fmt;
use std::fmt::Write as _;

use crate::codebook::OmegaWeights;
use crate::error::{invalid, Error, Result};
use crate::fmt::num;
use crate::linalg::Mat;

pub use detect::{fast_ml_detect, ml_detect, round_level};
pub use qfunc::{normal_pdf, q_function};
pub use semi::{
    codeword_error_from_slots, conditional_codeword_error, semianalytic_error_rate, slot_symbol_error, Averaging,
    MAX_QUADRATURE_POINTS,
};
pub use sim::{simulate_error_rate, Detector, SimConfig};

/// Per-link log-normal parameters of an `N × M` channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    mu: Mat<f64>,
    sigma: Mat<f64>,
}

impl ChannelStats {
    pub fn new(mu: Mat<f64>, sigma: Mat<f64>) -> Result<Self> {
        if mu.rows() != sigma.rows() || mu.cols() != sigma.cols() {
            return Err(Error::Dimension(format!(
                "mu is {}x{} but sigma is {}x{}",
                mu.rows(),
                mu.cols(),
                sigma.rows(),
                sigma.cols()
            )));
        }
        if mu.rows() == 0 || mu.cols() == 0 {
            return Err(Error::Dimension("channel with a zero dimension".into()));
        }
        mu.check_finite()?;
        sigma.check_finite()?;
        if let Some(s) = sigma.data().iter().find(|s| **s <= 0.0) {
            return Err(invalid("sigma", format!("must be positive, got {s}")));
        }
        Ok(ChannelStats { mu, sigma })
    }

    /// Same `μ` and `σ` on every link.
    pub fn uniform(n: usize, m: usize, mu: f64, sigma: f64) -> Result<Self> {
        ChannelStats::new(Mat::filled(n, m, mu), Mat::filled(n, m, sigma))
    }

    /// Zero-mean links with per-aperture standard deviation `sigma[i]`.
    pub fn per_aperture(sigma: &[f64], m: usize) -> Result<Self> {
        let n = sigma.len();
        let mut s = Mat::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                s[(i, j)] = sigma[i];
            }
        }
        ChannelStats::new(Mat::zeros(n, m), s)
    }

    pub fn n(&self) -> usize {
        self.mu.rows()
    }

    pub fn m(&self) -> usize {
        self.mu.cols()
    }

    pub fn mu(&self) -> &Mat<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &Mat<f64> {
        &self.sigma
    }

    /// `Ω_i = Σ_j σ_ij⁻²`.
    pub fn omega(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.sigma.row(i).iter().map(|s| s.powi(-2)).sum()).collect()
    }

    /// `Ω̃_i = Σ_j μ_ij σ_ij⁻²`.
    pub fn omega_tilde(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.m()).map(|j| self.mu[(i, j)] * self.sigma[(i, j)].powi(-2)).sum())
            .collect()
    }

    pub fn omega_weights(&self) -> OmegaWeights {
        OmegaWeights::new(self.omega()).expect("sigma entries are positive and finite")
    }

    /// Statistics of `copies` independent channel uses stacked vertically.
    pub fn tiled(&self, copies: usize) -> ChannelStats {
        let stack = |m: &Mat<f64>| {
            let rows: Vec<Vec<f64>> = (0..copies).flat_map(|_| m.to_rows()).collect();
            Mat::from_rows(&rows).expect("tiled stats")
        };
        ChannelStats { mu: stack(&self.mu), sigma: stack(&self.sigma) }
    }
}

/// Receiver noise of total variance `σ_N²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma_n_sq: f64,
}

impl NoiseModel {
    pub fn new(sigma_n_sq: f64) -> Result<Self> {
        if !(sigma_n_sq.is_finite() && sigma_n_sq > 0.0) {
            return Err(invalid("sigma_n_sq", format!("must be positive and finite, got {sigma_n_sq}")));
        }
        Ok(NoiseModel { sigma_n_sq })
    }

    /// `σ_N² = 10^{−dB/10}`.
    pub fn from_snr_db(db: f64) -> Result<Self> {
        NoiseModel::new(10f64.powf(-db / 10.0))
    }

    pub fn sigma_n_sq(&self) -> f64 {
        self.sigma_n_sq
    }

    pub fn snr(&self) -> f64 {
        1.0 / self.sigma_n_sq
    }

    /// Standard deviation of one noise entry with `m` receive apertures.
    pub fn entry_std(&self, m: usize) -> f64 {
        (self.sigma_n_sq / m as f64).sqrt()
    }
}

/// `ρ = 10^{dB/10}`.
pub fn db_to_snr(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Draws `H` for one trial: `h_ij = exp(μ_ij + σ_ij·g)` in row-major order.
pub fn sample_channel(stats: &ChannelStats, seed: u64, trial: u64) -> Mat<f64> {
    let mut rng = rng::channel_rng(seed, trial);
    draw_channel(stats, &mut rng)
}

pub(crate) fn draw_channel<R: rand::Rng>(stats: &ChannelStats, rng: &mut R) -> Mat<f64> {
    let mut h = Mat::zeros(stats.n(), stats.m());
    for i in 0..stats.n() {
        for j in 0..stats.m() {
            let g: f64 = StandardNormal.sample(rng);
            h[(i, j)] = (stats.mu[(i, j)] + stats.sigma[(i, j)] * g).exp();
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    SemiAnalytic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::MonteCarlo => "monte-carlo",
            Method::SemiAnalytic => "semi-analytic",
        })
    }
}

/// Codeword error rate against SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub snr_db: Vec<f64>,
    pub rate: Vec<f64>,
    /// Monte Carlo trials, channel draws, or quadrature nodes per point.
    pub trials: Vec<u64>,
    /// Error counts for Monte Carlo curves, zero otherwise.
    pub errors: Vec<u64>,
    /// Half-width of the 95% confidence interval.
    pub ci_half: Vec<f64>,
    pub method: Method,
}

impl ErrorCurve {
    pub fn len(&self) -> usize {
        self.snr_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_db.is_empty()
    }

    /// `snr_db,rate,trials,ci_half,method` rows in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,rate,trials,ci_half,method\n");
        for k in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(self.snr_db[k]),
                num(self.rate[k]),
                self.trials[k],
                num(self.ci_half[k]),
                self.method
            );
        }
        out
    }

    /// SNR (dB) where the curve crosses `target`, by linear interpolation
    /// of `log10(rate)` between the first bracketing pair of points.
    pub fn snr_at_rate(&self, target: f64) -> Option<f64> {
        for k in 1..self.len() {
            let (a, b) = (self.rate[k - 1], self.rate[k]);
            if a >= target && b <= target && a > 0.0 && b > 0.0 {
                if a == b {
                    return Some(self.snr_db[k - 1]);
                }
                let t = (a.log10() - target.log10()) / (a.log10() - b.log10());
                return Some(self.snr_db[k - 1] + t * (self.snr_db[k] - self.snr_db[k - 1]));
            }
        }
        None
    }
}

pub(crate) fn check_grid(snr_db: &[f64]) -> Result<()> {
    if snr_db.is_empty() {
        return Err(invalid("snr_db", "grid is empty"));
    }
    if snr_db.len() > rng::MAX_POINTS {
        return Err(Error::Cap { what: "SNR points", limit: rng::MAX_POINTS, got: snr_db.len() });
    }
    if let Some(x) = snr_db.iter().find(|x| !x.is_finite()) {
        return Err(invalid("snr_db", format!("non-finite value {x}")));
    }
    Ok(())
}
