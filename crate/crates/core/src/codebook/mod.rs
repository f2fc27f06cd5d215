//! Nonnegative space-time codebooks and the constellations behind them.
//!
//! A codebook holds `2^bits` distinct `L × N` intensity matrices. Codeword
//! `k` carries the symbol tuple `labels[k]`; tuples are enumerated in
//! lexicographic order with the first symbol most significant.
//!
//! Codes for fast fading see an independent channel per time slot. They
//! are analysed and simulated through the equivalent `L × (L·N)` block
//! diagonal matrix whose row `ℓ` occupies columns `ℓN .. (ℓ+1)N`.

mod constellation;
mod families;

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::cover::{is_full_cover, GramMatrix};
use crate::error::{invalid, Error, Result};
use crate::linalg::Mat;

pub use constellation::{
    diophantine_constellation, pam_product_constellation, split_bits, Constellation,
    MAX_DIOPHANTINE_BITS, MAX_DIOPHANTINE_DIM,
};
pub use families::{
    cstbc_from_constellation, golden_code, golden_design, optimal_linear_code, repetition_code,
    strc_code, zcc_code, GOLDEN_RATIO,
};

/// Inverse log-variance weights `Ω_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaWeights {
    omega: Vec<f64>,
    total: f64,
}

impl OmegaWeights {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(invalid("omega", "needs at least one entry"));
        }
        if let Some(bad) = omega.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid("omega", format!("entries must be positive, got {bad}")));
        }
        let total = omega.iter().sum();
        Ok(OmegaWeights { omega, total })
    }

    pub fn uniform(n: usize) -> Self {
        OmegaWeights { omega: vec![1.0; n], total: n as f64 }
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fading {
    /// One channel realisation for the whole codeword.
    Block,
    /// An independent channel realisation per time slot.
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Repetition,
    OptimalLinear,
    ZeroCover,
    Collaborative,
    Golden,
    SpaceTimeRepetition,
    Imported,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Repetition => "rc",
            Family::OptimalLinear => "optimal-linear",
            Family::ZeroCover => "zcc",
            Family::Collaborative => "cstbc",
            Family::Golden => "golden",
            Family::SpaceTimeRepetition => "strc",
            Family::Imported => "imported",
        }
    }
}

/// Algebraic structure used by the fast detector and the semi-analytic
/// error rate.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    /// Row `ℓ` of the equivalent codeword is `p_ℓ · levels[ℓ]ᵀ` with a PAM
    /// symbol `p_ℓ ∈ {0, …, 2^{slot_bits[ℓ]} − 1}`.
    Linear { slot_bits: Vec<u32>, levels: Vec<Vec<f64>> },
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    family: Family,
    slots: usize,
    apertures: usize,
    fading: Fading,
    codewords: Vec<Mat<f64>>,
    equivalent: Vec<Mat<f64>>,
    labels: Vec<Vec<u32>>,
    bits: u32,
    power_target: f64,
    structure: Structure,
}

impl Codebook {
    /// Assembles a codebook; shapes and the codeword count are checked,
    /// the remaining invariants are reported by [`validate_codebook`].
    pub fn new(
        family: Family,
        fading: Fading,
        codewords: Vec<Mat<f64>>,
        labels: Vec<Vec<u32>>,
        power_target: f64,
        structure: Structure,
    ) -> Result<Self> {
        let first = codewords.first().ok_or_else(|| invalid("codebook", "no codewords"))?;
        let (slots, apertures) = (first.rows(), first.cols());
        if slots == 0 || apertures == 0 {
            return Err(Error::Dimension("codeword with a zero dimension".into()));
        }
        if let Some(bad) = codewords.iter().position(|x| x.rows() != slots || x.cols() != apertures) {
            return Err(Error::Dimension(format!("codeword {bad} is not {slots}x{apertures}")));
        }
        for x in &codewords {
            x.check_finite()?;
        }
        if labels.len() != codewords.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} codewords",
                labels.len(),
                codewords.len()
            )));
        }
        let count = codewords.len();
        if !count.is_power_of_two() || count < 2 {
            return Err(invalid("codebook", format!("{count} codewords is not a power of two")));
        }
        let bits = count.trailing_zeros();
        let equivalent = codewords.iter().map(|x| expand(x, fading)).collect();
        if let Structure::Linear { slot_bits, levels } = &structure {
            let n_eff = match fading {
                Fading::Block => apertures,
                Fading::Fast => slots * apertures,
            };
            if slot_bits.len() != slots || levels.len() != slots || levels.iter().any(|v| v.len() != n_eff)
            {
                return Err(Error::Dimension("linear structure does not match codeword shape".into()));
            }
        }
        Ok(Codebook {
            family,
            slots,
            apertures,
            fading,
            codewords,
            equivalent,
            labels,
            bits,
            power_target,
            structure,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Time slots `L`.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Transmit apertures `N`.
    pub fn apertures(&self) -> usize {
        self.apertures
    }

    pub fn fading(&self) -> Fading {
        self.fading
    }

    /// Columns of the equivalent codeword: `N` for block fading, `L·N` for
    /// fast fading.
    pub fn effective_apertures(&self) -> usize {
        match self.fading {
            Fading::Block => self.apertures,
            Fading::Fast => self.slots * self.apertures,
        }
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn power_target(&self) -> f64 {
        self.power_target
    }

    pub fn codewords(&self) -> &[Mat<f64>] {
        &self.codewords
    }

    pub fn codeword(&self, k: usize) -> &Mat<f64> {
        &self.codewords[k]
    }

    /// Equivalent codeword seen by the stacked channel.
    pub fn equivalent(&self, k: usize) -> &Mat<f64> {
        &self.equivalent[k]
    }

    pub fn labels(&self) -> &[Vec<u32>] {
        &self.labels
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn mean_power(&self) -> f64 {
        let total: f64 = self.codewords.iter().map(|x| x.data().iter().sum::<f64>()).sum();
        total / self.codewords.len() as f64
    }

    /// Gram matrix of the equivalent difference `X_a − X_b`.
    pub fn difference_gram(&self, a: usize, b: usize) -> Result<GramMatrix> {
        GramMatrix::from_factor(&self.equivalent[a].sub(&self.equivalent[b])?)
    }

    /// Same codewords scaled by `k`, keeping the power target.
    pub fn scaled(&self, k: f64) -> Codebook {
        let mut out = self.clone();
        out.codewords = self.codewords.iter().map(|x| x.scale(k)).collect();
        out.equivalent = self.equivalent.iter().map(|x| x.scale(k)).collect();
        if let Structure::Linear { levels, .. } = &mut out.structure {
            for v in levels.iter_mut() {
                for x in v.iter_mut() {
                    *x *= k;
                }
            }
        }
        out
    }

    /// One row per codeword: `index,label,r1c1,r1c2,…` with the label tuple
    /// joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,label");
        for r in 1..=self.slots {
            for c in 1..=self.apertures {
                let _ = write!(out, ",r{r}c{c}");
            }
        }
        out.push('\n');
        for (k, x) in self.codewords.iter().enumerate() {
            let label: Vec<String> = self.labels[k].iter().map(|s| s.to_string()).collect();
            let _ = write!(out, "{k},{}", label.join(";"));
            for v in x.data() {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Reads the format written by [`Codebook::to_csv`]. The power target
    /// is `L`, matching every constructed family.
    pub fn from_csv(text: &str, fading: Fading) -> Result<Codebook> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty codebook CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[0] != "index" || cols[1] != "label" {
            return Err(Error::Parse("codebook CSV header must start with index,label".into()));
        }
        let mut slots = 0;
        let mut apertures = 0;
        for name in &cols[2..] {
            let (r, c) = parse_entry_name(name)
                .ok_or_else(|| Error::Parse(format!("bad column name `{name}`")))?;
            slots = slots.max(r);
            apertures = apertures.max(c);
        }
        let expected: Vec<String> = (1..=slots)
            .flat_map(|r| (1..=apertures).map(move |c| format!("r{r}c{c}")))
            .collect();
        if expected.len() != cols.len() - 2 || expected.iter().zip(&cols[2..]).any(|(e, c)| e != c) {
            return Err(Error::Parse("codebook CSV columns must be r1c1, r1c2, ... in row-major order".into()));
        }
        let mut codewords = Vec::new();
        let mut labels = Vec::new();
        for (line_no, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse(format!("row {} has {} fields", line_no + 1, fields.len())));
            }
            let label = fields[1]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|e| Error::Parse(format!("label `{s}`: {e}"))))
                .collect::<Result<Vec<u32>>>()?;
            let data = fields[2..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("entry `{s}`: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            codewords.push(Mat::from_vec(slots, apertures, data)?);
            labels.push(label);
        }
        Codebook::new(Family::Imported, fading, codewords, labels, slots as f64, Structure::General)
    }
}

fn parse_entry_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('r')?;
    let (r, c) = rest.split_once('c')?;
    let r: usize = r.parse().ok()?;
    let c: usize = c.parse().ok()?;
    (r >= 1 && c >= 1).then_some((r, c))
}

fn expand(x: &Mat<f64>, fading: Fading) -> Mat<f64> {
    match fading {
        Fading::Block => x.clone(),
        Fading::Fast => {
            let (l, n) = (x.rows(), x.cols());
            let mut out = Mat::zeros(l, l * n);
            for r in 0..l {
                for c in 0..n {
                    out[(r, r * n + c)] = x[(r, c)];
                }
            }
            out
        }
    }
}

/// Findings of [`validate_codebook`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    /// `(codeword, slot, aperture)` of every negative entry.
    pub negative_entries: Vec<(usize, usize, usize)>,
    pub duplicate_pairs: Vec<(usize, usize)>,
    pub mean_power: f64,
    pub power_target: f64,
    pub power_ok: bool,
    /// Pairs whose difference Gram lacks full cover; `None` when not checked.
    pub non_full_cover_pairs: Option<Vec<(usize, usize)>>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.negative_entries.is_empty()
            && self.duplicate_pairs.is_empty()
            && self.power_ok
            && self.non_full_cover_pairs.as_ref().is_none_or(|p| p.is_empty())
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "negative_entries = {}", self.negative_entries.len());
        let _ = writeln!(out, "duplicate_pairs = {}", self.duplicate_pairs.len());
        let _ = writeln!(out, "mean_power = {}", self.mean_power);
        let _ = writeln!(out, "power_target = {}", self.power_target);
        let _ = writeln!(out, "power_ok = {}", self.power_ok);
        match &self.non_full_cover_pairs {
            Some(p) => {
                let _ = writeln!(out, "non_full_cover_pairs = {}", p.len());
                let _ = writeln!(out, "full_cover = {}", p.is_empty());
            }
            None => {
                let _ = writeln!(out, "full_cover = unchecked");
            }
        }
        let _ = writeln!(out, "valid = {}", self.is_valid());
        out
    }
}

/// Checks unipolarity, distinctness, the power target (1e-12 relative)
/// and, when `check_cover` is set, full cover of every difference Gram.
pub fn validate_codebook(c: &Codebook, check_cover: bool) -> Result<ValidationReport> {
    let mut report = ValidationReport { power_target: c.power_target, ..Default::default() };
    for (k, x) in c.codewords.iter().enumerate() {
        for r in 0..x.rows() {
            for col in 0..x.cols() {
                if x[(r, col)] < 0.0 {
                    report.negative_entries.push((k, r, col));
                }
            }
        }
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for (k, x) in c.codewords.iter().enumerate() {
        let key: Vec<u64> = x.data().iter().map(|v| v.to_bits()).collect();
        if !seen.insert(key) {
            for j in 0..k {
                if c.codewords[j] == *x {
                    report.duplicate_pairs.push((j, k));
                }
            }
        }
    }
    report.mean_power = c.mean_power();
    report.power_ok =
        (report.mean_power - c.power_target).abs() <= 1e-12 * c.power_target.abs().max(1.0);
    if check_cover {
        let mut bad = Vec::new();
        for a in 0..c.len() {
            for b in (a + 1)..c.len() {
                if c.codewords[a] == c.codewords[b] {
                    bad.push((a, b));
                    continue;
                }
                if !is_full_cover(&c.difference_gram(a, b)?)? {
                    bad.push((a, b));
                }
            }
        }
        report.non_full_cover_pairs = Some(bad);
    }
    Ok(report)
}
