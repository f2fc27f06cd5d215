//! Command-line front end: reads a TOML run configuration, runs one
//! command and writes its artifacts into an output directory.
//!
//! Every run directory holds `config.echo` (the configuration as read),
//! the command's artifacts and `meta` (seed, version, wall time). All
//! artifacts except `meta` are byte-identical for the same configuration
//! and seed.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for runtime
//! errors.

mod config;

use clap::Parser;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::*;

use crate::channel::{semianalytic_error_rate, simulate_error_rate, Averaging, ChannelStats, Detector, SimConfig};
use crate::codebook::{
    cstbc_from_constellation, diophantine_constellation, golden_code, optimal_linear_code, repetition_code,
    strc_code, validate_codebook, zcc_code, Codebook, Fading, OmegaWeights, Structure,
};
use crate::cover::{analyze, GramMatrix};
use crate::fmt::num;
use crate::diversity::{diversity_report, energy_report, linear_loss_lower_bound, pep_bounds};
use crate::linalg::Mat;

#[derive(Debug, Clone, Parser)]
#[command(name = "srcover", version, about = "Cover analysis, code construction and error-rate simulation")]
pub struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn cfg_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {e}"))
}

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_MIN_ERRORS: u64 = 200;
pub const DEFAULT_NODES: usize = 200;

/// Parses and strictly validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// Runs a parsed command-line and returns the output directory.
pub fn run(args: &Args) -> Result<PathBuf, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.trials.is_some() {
        cfg.trials = args.trials;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| cfg_err("output", "no output directory (use --out)"))?;
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(run_err)?;
    let start = Instant::now();
    let artifacts = pool.install(|| execute(&cfg, &base))?;
    fs::create_dir_all(&out).map_err(|e| run_err(format!("cannot create {}: {e}", out.display())))?;
    let write = |name: &str, body: &str| {
        fs::write(out.join(name), body).map_err(|e| run_err(format!("cannot write {name}: {e}")))
    };
    write("config.echo", &text)?;
    for (name, body) in &artifacts {
        write(name, body)?;
    }
    let seed = cfg.seed.map_or("none".to_string(), |s| s.to_string());
    let meta = format!(
        "seed = {seed}\nversion = {}\nwall_time_s = {:.3}\n",
        env!("CARGO_PKG_VERSION"),
        start.elapsed().as_secs_f64()
    );
    write("meta", &meta)?;
    log::info!("wrote {} artifacts to {}", artifacts.len() + 2, out.display());
    Ok(out)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with(args: &Args) -> i32 {
    match run(args) {
        Ok(out) => {
            println!("{}", out.display());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

type Artifacts = Vec<(&'static str, String)>;

/// Runs a configuration and returns `(file name, contents)` pairs.
pub fn execute(cfg: &RunConfig, base: &Path) -> Result<Artifacts, CliError> {
    match cfg.command {
        Command::Cover => run_cover(cfg),
        Command::Codebook => {
            let code = build_code(cfg, base)?;
            let report = validate_codebook(&code, true).map_err(run_err)?;
            let mut text = format!("family = {}\nslots = {}\napertures = {}\ncodewords = {}\n",
                code.family().name(), code.slots(), code.apertures(), code.len());
            text.push_str(&report.to_key_value());
            Ok(vec![("codebook.csv", code.to_csv()), ("report.txt", text)])
        }
        Command::Simulate => run_simulate(cfg, base),
        Command::Bounds => run_bounds(cfg, base),
        Command::Constellation => {
            let c = cfg.constellation.as_ref().ok_or_else(|| cfg_err("constellation", "section missing"))?;
            let s = diophantine_constellation(c.dim, c.bits).map_err(|e| cfg_err("constellation", e))?;
            let e = energy_report(c.dim, c.bits).map_err(run_err)?;
            let text = format!(
                "points = {}\nmin_distance = {}\nmean_power = {}\npam_mean_power = {}\nratio = {}\n",
                s.len(), s.min_distance(), e.diophantine, e.pam, e.ratio
            );
            Ok(vec![("constellation.csv", s.to_csv()), ("report.txt", text)])
        }
        Command::Report => {
            let code = build_code(cfg, base)?;
            let stats = build_channel(cfg, code.apertures())?;
            let r = diversity_report(&code, &stats).map_err(run_err)?;
            let mut text = format!("family = {}\n", code.family().name());
            text.push_str(&r.to_key_value());
            Ok(vec![("report.txt", text), ("pairs.csv", r.pairs_csv())])
        }
    }
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<Mat<f64>, CliError> {
    Mat::from_rows(rows).map_err(|e| cfg_err(field, e))
}

fn run_cover(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let c = cfg.cover.as_ref().ok_or_else(|| cfg_err("cover", "section missing"))?;
    let g = match (&c.factor, &c.gram) {
        (Some(a), None) => GramMatrix::from_factor(&matrix(a, "cover.factor")?).map_err(|e| cfg_err("cover.factor", e))?,
        (None, Some(g)) => GramMatrix::new(matrix(g, "cover.gram")?).map_err(|e| cfg_err("cover.gram", e))?,
        _ => return Err(cfg_err("cover", "give exactly one of `factor` and `gram`")),
    };
    let report = analyze(&g).map_err(run_err)?;
    Ok(vec![("report.txt", report.to_key_value())])
}

fn grid_matrix(grid: &Grid, n: usize, m: usize, field: &str) -> Result<Mat<f64>, CliError> {
    match grid {
        Grid::Scalar(v) => Ok(Mat::filled(n, m, *v)),
        Grid::PerAperture(v) => {
            if v.len() != n {
                return Err(cfg_err(field, format!("{} entries for {n} transmit apertures", v.len())));
            }
            let rows: Vec<Vec<f64>> = v.iter().map(|&x| vec![x; m]).collect();
            matrix(&rows, field)
        }
        Grid::Matrix(rows) => {
            let a = matrix(rows, field)?;
            if a.rows() != n || a.cols() != m {
                return Err(cfg_err(field, format!("is {}x{}, expected {n}x{m}", a.rows(), a.cols())));
            }
            Ok(a)
        }
    }
}

fn channel_apertures(ch: &ChannelSection) -> Option<usize> {
    match &ch.sigma {
        Grid::PerAperture(v) => Some(v.len()),
        Grid::Matrix(r) => Some(r.len()),
        Grid::Scalar(_) => ch.transmitters,
    }
}

/// Channel statistics for `n` transmit apertures.
pub fn build_channel(cfg: &RunConfig, n: usize) -> Result<ChannelStats, CliError> {
    let ch = cfg.channel.as_ref().ok_or_else(|| cfg_err("channel", "section missing"))?;
    if ch.receivers == 0 {
        return Err(cfg_err("channel.receivers", "must be at least 1"));
    }
    if let (Some(t), Some(declared)) = (channel_apertures(ch), ch.transmitters) {
        if t != declared {
            return Err(cfg_err("channel.sigma", format!("describes {t} transmit apertures, transmitters = {declared}")));
        }
    }
    if let Some(t) = channel_apertures(ch) {
        if t != n {
            return Err(cfg_err("channel.sigma", format!("describes {t} transmit apertures, the code has {n}")));
        }
    }
    let m = ch.receivers;
    let sigma = grid_matrix(&ch.sigma, n, m, "channel.sigma")?;
    let mu = match &ch.mu {
        Some(g) => grid_matrix(g, n, m, "channel.mu")?,
        None => Mat::zeros(n, m),
    };
    ChannelStats::new(mu, sigma).map_err(|e| cfg_err("channel", e))
}

fn design_omega(code: &CodeSection, cfg: &RunConfig, n: Option<usize>) -> Result<OmegaWeights, CliError> {
    if let Some(w) = &code.omega {
        return OmegaWeights::new(w.clone()).map_err(|e| cfg_err("code.omega", e));
    }
    let n = n.ok_or_else(|| cfg_err("code.omega", "needed when the channel does not fix the apertures"))?;
    match cfg.channel {
        Some(_) => Ok(build_channel(cfg, n)?.omega_weights()),
        None => Ok(OmegaWeights::uniform(n)),
    }
}

fn bits(code: &CodeSection, count: Option<usize>) -> Result<Vec<u32>, CliError> {
    let b = code.bits.clone().ok_or_else(|| cfg_err("code.bits", "required for this family"))?;
    if let Some(c) = count {
        if b.len() != c {
            return Err(cfg_err("code.bits", format!("needs exactly {c} entries")));
        }
    }
    Ok(b)
}

/// Constructs the configured codebook.
pub fn build_code(cfg: &RunConfig, base: &Path) -> Result<Codebook, CliError> {
    let code = cfg.code.as_ref().ok_or_else(|| cfg_err("code", "section missing"))?;
    let n = code
        .omega
        .as_ref()
        .map(Vec::len)
        .or(code.apertures)
        .or_else(|| cfg.channel.as_ref().and_then(channel_apertures));
    let bad = |e: crate::Error| cfg_err("code", e);
    let built = match code.family.as_str() {
        "rc" => repetition_code(&bits(code, None)?, n.ok_or_else(|| cfg_err("code.apertures", "required"))?),
        "optimal-linear" => optimal_linear_code(&bits(code, None)?, &design_omega(code, cfg, n)?),
        "zcc" => zcc_code(),
        "cstbc" => {
            let dim = code.dim.ok_or_else(|| cfg_err("code.dim", "required for cstbc"))?;
            let k = code.constellation_bits.ok_or_else(|| cfg_err("code.constellation_bits", "required for cstbc"))?;
            let s = diophantine_constellation(dim, k).map_err(bad)?;
            cstbc_from_constellation(&s, &design_omega(code, cfg, n)?)
        }
        "golden" => {
            let b = bits(code, Some(2))?;
            golden_code(b[0], b[1], &design_omega(code, cfg, n)?)
        }
        "strc" => {
            let b = bits(code, Some(2))?;
            strc_code(b[0], b[1])
        }
        "import" => {
            let path = code.path.as_ref().ok_or_else(|| cfg_err("code.path", "required for import"))?;
            let fading = match code.fading.as_deref().unwrap_or("block") {
                "block" => Fading::Block,
                "fast" => Fading::Fast,
                other => return Err(cfg_err("code.fading", format!("unknown fading `{other}`"))),
            };
            let text = fs::read_to_string(base.join(path))
                .map_err(|e| cfg_err("code.path", format!("cannot read {}: {e}", path.display())))?;
            Codebook::from_csv(&text, fading)
        }
        other => return Err(cfg_err("code.family", format!("unknown family `{other}`"))),
    }
    .map_err(bad)?;
    if let Some(n) = n {
        if n != built.apertures() {
            return Err(cfg_err("code", format!("built {} apertures, configuration implies {n}", built.apertures())));
        }
    }
    Ok(built)
}

fn run_simulate(cfg: &RunConfig, base: &Path) -> Result<Artifacts, CliError> {
    let sim = cfg.simulate.as_ref().ok_or_else(|| cfg_err("simulate", "section missing"))?;
    let code = build_code(cfg, base)?;
    let stats = build_channel(cfg, code.apertures())?;
    let grid = sim.snr_db.values().map_err(|e| cfg_err("simulate.snr_db", e))?;
    let need_seed = || cfg.seed.ok_or_else(|| cfg_err("seed", "required for stochastic runs (use --seed)"));
    let curve = match sim.method {
        MethodName::MonteCarlo => {
            let min_errors = match sim.min_errors.unwrap_or(DEFAULT_MIN_ERRORS) {
                0 => None,
                k => Some(k),
            };
            let sc = SimConfig {
                trials: cfg.trials.unwrap_or(DEFAULT_TRIALS),
                seed: need_seed()?,
                detector: match sim.detector {
                    DetectorName::Brute => Detector::Brute,
                    DetectorName::Fast => Detector::Fast,
                },
                min_errors,
                batch: sim.batch.unwrap_or(SimConfig::default().batch),
            };
            simulate_error_rate(&code, &stats, &grid, &sc)
        }
        MethodName::SemiAnalytic => {
            if !matches!(code.structure(), Structure::Linear { .. }) {
                return Err(cfg_err("simulate.method", format!("semi-analytic needs a linear code, not `{}`", code.family().name())));
            }
            let averaging = match sim.averaging.unwrap_or(AveragingName::Quadrature) {
                AveragingName::Quadrature => Averaging::Quadrature { nodes: sim.nodes.unwrap_or(DEFAULT_NODES) },
                AveragingName::Sampled => Averaging::Sampled {
                    draws: sim.draws.or(cfg.trials).unwrap_or(DEFAULT_TRIALS),
                    seed: need_seed()?,
                },
            };
            semianalytic_error_rate(&code, &stats, &grid, &averaging)
        }
    }
    .map_err(|e| match e {
        crate::Error::Incompatible(_) | crate::Error::Invalid { .. } | crate::Error::Cap { .. } => cfg_err("simulate", e),
        other => run_err(other),
    })?;
    Ok(vec![("curve.csv", curve.to_csv())])
}

fn run_bounds(cfg: &RunConfig, base: &Path) -> Result<Artifacts, CliError> {
    let b = cfg.bounds.as_ref().ok_or_else(|| cfg_err("bounds", "section missing"))?;
    let code = build_code(cfg, base)?;
    let stats = build_channel(cfg, code.apertures())?;
    let grid = b.snr_db.values().map_err(|e| cfg_err("bounds.snr_db", e))?;
    let report = diversity_report(&code, &stats).map_err(run_err)?;
    let (i, j) = match b.pair {
        Some([i, j]) if i != j && i.max(j) < code.len() => (i.min(j), i.max(j)),
        Some(_) => return Err(cfg_err("bounds.pair", "needs two distinct codeword indices")),
        None => report.worst_pair,
    };
    let eff = match code.fading() {
        Fading::Block => stats.clone(),
        Fading::Fast => stats.tiled(code.slots()),
    };
    let g = code.difference_gram(i, j).map_err(run_err)?;
    let mut csv = String::from("snr_db,lower,upper,ln_lower,ln_upper\n");
    for db in &grid {
        let pb = pep_bounds(&g, &eff, 10f64.powf(db / 10.0)).map_err(|e| cfg_err("bounds", e))?;
        let _ = writeln!(csv, "{},{},{},{},{}", num(*db), num(pb.lower), num(pb.upper), num(pb.ln_lower), num(pb.ln_upper));
    }
    let mut text = format!("family = {}\npair = {i},{j}\nupper_bound = asymptotic\n", code.family().name());
    text.push_str(&report.to_key_value());
    if let Structure::Linear { slot_bits, .. } = code.structure() {
        if slot_bits.windows(2).all(|w| w[0] == w[1]) {
            let lb = linear_loss_lower_bound(slot_bits[0], &eff.omega_weights()).map_err(run_err)?;
            let _ = writeln!(text, "linear_loss_lower_bound = {lb}");
        }
    }
    Ok(vec![("bounds.csv", csv), ("report.txt", text), ("pairs.csv", report.pairs_csv())])
}
