//! Run configuration schema.
//!
//! Every table rejects unknown keys.
//!
//! ```toml
//! command = "simulate"   # cover | codebook | simulate | bounds | constellation | report
//! seed = 7
//! trials = 100000
//!
//! [code]
//! family = "rc"          # rc | optimal-linear | zcc | cstbc | golden | strc | import
//! bits = [1, 1]          # per-slot bits; [K1, K2] for golden and strc
//!
//! [channel]
//! receivers = 1
//! sigma = [0.3, 0.1]     # scalar, per transmit aperture, or N×M rows
//! mu = 0.0
//!
//! [simulate]
//! snr_db = { start = 0.0, stop = 40.0, step = 5.0 }
//! method = "monte-carlo" # or "semi-analytic"
//! ```

use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cover,
    Codebook,
    Simulate,
    Bounds,
    Constellation,
    Report,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub cover: Option<CoverSection>,
    pub code: Option<CodeSection>,
    pub channel: Option<ChannelSection>,
    pub simulate: Option<SimulateSection>,
    pub bounds: Option<BoundsSection>,
    pub constellation: Option<ConstellationSection>,
}

/// Either a factor `A` (`G = AᵀA`) or a Gram matrix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSection {
    pub factor: Option<Vec<Vec<f64>>>,
    pub gram: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub family: String,
    pub bits: Option<Vec<u32>>,
    /// Transmit apertures when neither the channel nor `omega` gives them.
    pub apertures: Option<usize>,
    /// Design weights; defaults to the channel's `Ω_i`.
    pub omega: Option<Vec<f64>>,
    /// Constellation dimension and bits for `cstbc`.
    pub dim: Option<usize>,
    pub constellation_bits: Option<u32>,
    /// CSV file for `import`, relative to the config file.
    pub path: Option<PathBuf>,
    /// `block` or `fast`, for `import`.
    pub fading: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Scalar(f64),
    PerAperture(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub transmitters: Option<usize>,
    #[serde(default = "one")]
    pub receivers: usize,
    pub sigma: Grid,
    pub mu: Option<Grid>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SnrGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    MonteCarlo,
    SemiAnalytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorName {
    Brute,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingName {
    Quadrature,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub snr_db: SnrGrid,
    #[serde(default = "monte_carlo")]
    pub method: MethodName,
    #[serde(default = "brute")]
    pub detector: DetectorName,
    /// Early-stop error count; `0` runs every trial.
    pub min_errors: Option<u64>,
    pub batch: Option<u64>,
    /// Averaging for semi-analytic curves.
    pub averaging: Option<AveragingName>,
    pub nodes: Option<usize>,
    pub draws: Option<u64>,
}

fn monte_carlo() -> MethodName {
    MethodName::MonteCarlo
}

fn brute() -> DetectorName {
    DetectorName::Brute
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Evaluation points in dB.
    pub snr_db: SnrGrid,
    /// Codeword pair, zero-based; defaults to the worst large-scale pair.
    pub pair: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSection {
    pub dim: usize,
    pub bits: u32,
}

impl SnrGrid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match *self {
            SnrGrid::List(ref v) => Ok(v.clone()),
            SnrGrid::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err("range needs finite start <= stop and step > 0".into());
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 10_000 {
                    return Err(format!("range has {count} points, more than 10000"));
                }
                Ok((0..count).map(|k| start + step * k as f64).collect())
            }
        }
    }
}
