//! Acceptance criteria, run as a plain binary that prints one PASS/FAIL line
//! per criterion and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use srcover::channel::{
    fast_ml_detect, ml_detect, rng::noise_rng, sample_channel, semianalytic_error_rate, simulate_error_rate,
    Averaging, ChannelStats, ErrorCurve, NoiseModel, SimConfig,
};
use srcover::codebook::{
    diophantine_constellation, golden_code, optimal_linear_code, pam_product_constellation, repetition_code,
    strc_code, zcc_code, Codebook, Constellation, Fading, Family, OmegaWeights, Structure,
};
use srcover::cover::{
    cover_lengths, cover_order, cover_order_echelon, cover_order_echelon_of, cover_order_of,
    nonneg_kernel_witness_exact, GramMatrix,
};
use srcover::diversity::{
    fit_diversity_from_curve, golden_grid_search, golden_min_metric, ln_linear_loss_lower_bound,
    ln_small_scale_loss, loglog_slope,
};
use srcover::linalg::{rank, Mat};
use srcover::Error;

type Outcome = Result<String, String>;

/// Name, runtime limit in seconds, and check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: srcover::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn mat(rows: &[&[f64]]) -> Mat<f64> {
    Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}

fn crossing(curve: &ErrorCurve, target: f64, what: &str) -> Result<f64, String> {
    curve.snr_at_rate(target).ok_or_else(|| format!("{what} never crosses {target:e}"))
}

fn cover_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut full, mut witnessed, mut zero) = (0, 0, 0);
    let mut trial = 0;
    while trial < 500 {
        let l = rng.random_range(1..=5);
        let n = rng.random_range(1..=5);
        let data: Vec<f64> = (0..l * n).map(|_| f64::from(rng.random_range(-2i32..=2))).collect();
        if data.iter().all(|&x| x == 0.0) {
            zero += 1;
            continue;
        }
        let a = Mat::from_vec(l, n, data).unwrap();
        let lp = lib(cover_order_of(&a))?;
        let ech = lib(cover_order_echelon_of(&a))?;
        ensure(lp == ech, || format!("matrix {trial}: LP {lp:?} vs echelon {ech:?}"))?;
        let q = a.to_rational();
        match nonneg_kernel_witness_exact(&q) {
            None => {
                ensure(lp.0 == n, || format!("matrix {trial}: no witness but order {} < {n}", lp.0))?;
                full += 1;
            }
            Some(h) => {
                ensure(lp.0 < n, || format!("matrix {trial}: witness for a full cover"))?;
                ensure(h.iter().all(|x| *x >= BigRational::zero()) && h.iter().any(|x| !x.is_zero()), || {
                    format!("matrix {trial}: witness is not a nonzero nonnegative vector")
                })?;
                for r in 0..l {
                    let s = (0..n).fold(BigRational::zero(), |acc, c| acc + &q[(r, c)] * &h[c]);
                    ensure(s.is_zero(), || format!("matrix {trial}: A h != 0 in row {r}"))?;
                }
                ensure(lp.1.iter().all(|&i| h[i].is_zero()), || {
                    format!("matrix {trial}: witness support meets the cover link")
                })?;
                witnessed += 1;
            }
        }
        trial += 1;
    }
    Ok(format!(
        "500/500 consistent ({full} full cover, {witnessed} with exact kernel witness, {zero} zero draws redrawn)"
    ))
}

fn cover_examples() -> Outcome {
    let cases: [(&str, Mat<f64>, usize); 3] = [
        ("ones", mat(&[&[1.0, 1.0], &[1.0, 1.0]]), 2),
        ("diag(1,0)", mat(&[&[1.0, 0.0], &[0.0, 0.0]]), 1),
        ("alternating", mat(&[&[1.0, -1.0], &[-1.0, 1.0]]), 0),
    ];
    for (name, g, want) in &cases {
        let g = lib(GramMatrix::new(g.clone()))?;
        let lp = lib(cover_order(&g))?.0;
        let ech = lib(cover_order_echelon(&g))?.0;
        ensure(lp == *want && ech == *want, || format!("{name}: orders {lp}/{ech}, want {want}"))?;
    }
    let ones = lib(cover_lengths(&lib(GramMatrix::new(cases[0].1.clone()))?))?;
    ensure(ones == vec![1.0, 1.0], || format!("ones lengths {ones:?}"))?;
    let diag = lib(cover_lengths(&lib(GramMatrix::new(cases[1].1.clone()))?))?;
    ensure(diag[0] == 1.0 && diag[1] == f64::INFINITY, || format!("diag lengths {diag:?}"))?;
    let blocks = mat(&[
        &[2.0, 1.0, 0.0, 0.0],
        &[1.0, 2.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, -1.0],
        &[0.0, 0.0, -1.0, 1.0],
    ]);
    let r = rank(&blocks);
    let g = lib(GramMatrix::new(blocks))?;
    let (order, link) = lib(cover_order(&g))?;
    ensure(order == 2 && r == 3, || format!("block example: order {order}, rank {r}"))?;
    Ok(format!("orders 2, 1, 0; lengths (1,1), (1,inf); block example order 2 rank 3 link {link:?}"))
}

fn diophantine() -> Outcome {
    for l in 1..=4 {
        for k in 1..=7 {
            let c = lib(diophantine_constellation(l, k))?;
            let pam = lib(pam_product_constellation(l, k))?;
            ensure(c.len() == 1 << k, || format!("S^({l},{k}) has {} points", c.len()))?;
            ensure((c.min_distance() - 1.0).abs() <= 1e-12, || {
                format!("S^({l},{k}) min distance {}", c.min_distance())
            })?;
            ensure(c.mean_power() <= pam.mean_power(), || {
                format!("S^({l},{k}) mean {} > PAM {}", c.mean_power(), pam.mean_power())
            })?;
        }
    }
    let listed: Vec<Vec<u32>> = [
        [0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2], [3, 0], [0, 3],
        [1, 2], [2, 1], [4, 0], [0, 4], [1, 3], [3, 1], [2, 2], [5, 0],
    ]
    .iter()
    .map(|p| p.to_vec())
    .collect();
    let s24 = lib(diophantine_constellation(2, 4))?;
    let want = Constellation::from_grid(2, 1, listed).unwrap();
    let mut got_pts = s24.points().to_vec();
    let mut want_pts = want.points().to_vec();
    for v in [&mut got_pts, &mut want_pts] {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    ensure(got_pts == want_pts, || format!("S^(2,4) differs: {:?}", s24.grid()))?;
    ensure(s24.mean_power() == 45.0 / 16.0, || format!("S^(2,4) mean {}", s24.mean_power()))?;
    let s46 = lib(diophantine_constellation(4, 6))?;
    ensure(s46.points().contains(&vec![0.5; 4]), || "S^(4,6) lacks (1,1,1,1)/2".into())?;
    Ok("28 (L,K) cases; S^(2,4) listed set with mean power 45/16; (1,1,1,1)/2 in S^(4,6)".into())
}

fn fast_detector() -> Outcome {
    let stats = lib(ChannelStats::per_aperture(&[0.3, 0.1], 1))?;
    let design = lib(OmegaWeights::new(vec![1.0, 3.0]))?;
    let code = lib(optimal_linear_code(&[2], &design))?;
    let Structure::Linear { levels, slot_bits } = code.structure() else {
        return Err("optimal linear code lost its structure".into());
    };
    let snrs = grid(0.0, 30.0, 5.0);
    let trials = 100_000u64;
    for t in 0..trials {
        let h = sample_channel(&stats, 4, t);
        let k = ChaCha8Rng::seed_from_u64(t).random_range(0..code.len());
        let point = (t % snrs.len() as u64) as usize;
        let sd = lib(NoiseModel::from_snr_db(snrs[point]))?.entry_std(1);
        let mut rng = noise_rng(4, point, t);
        let mut y = code.equivalent(k).matmul(&h).unwrap();
        for j in 0..y.cols() {
            let g: f64 = StandardNormal.sample(&mut rng);
            y[(0, j)] += sd * g;
        }
        let brute = lib(ml_detect(&y, &h, &code))?;
        let fast = lib(fast_ml_detect(y.row(0), &h, &levels[0], slot_bits[0]))?;
        ensure(code.labels()[brute] == [fast], || {
            format!("trial {t}: brute {:?} vs fast {fast:?}", code.labels()[brute])
        })?;
    }
    Ok(format!("{trials} trials over 0-30 dB, 100% identical decisions"))
}

fn semi_vs_mc() -> Outcome {
    let stats = lib(ChannelStats::per_aperture(&[0.3, 0.1], 1))?;
    let code = lib(optimal_linear_code(&[1, 1], &stats.omega_weights()))?;
    let snrs = grid(0.0, 40.0, 5.0);
    let cfg = SimConfig { trials: 100_000, seed: 5, min_errors: None, ..Default::default() };
    let mc = lib(simulate_error_rate(&code, &stats, &snrs, &cfg))?;
    let semi = lib(semianalytic_error_rate(&code, &stats, &snrs, &Averaging::Quadrature { nodes: 400 }))?;
    let mut worst: f64 = 0.0;
    for k in 0..snrs.len() {
        let p = semi.rate[k];
        let sd = (p * (1.0 - p) / mc.trials[k] as f64).sqrt();
        let diff = (mc.rate[k] - p).abs();
        ensure(diff <= 3.0 * sd, || {
            format!("{} dB: MC {:e} vs semi-analytic {p:e}, {:.2} sd", snrs[k], mc.rate[k], diff / sd)
        })?;
        if sd > 0.0 {
            worst = worst.max(diff / sd);
        }
    }
    Ok(format!("9 points, worst deviation {worst:.2} binomial sd"))
}

fn optimal_vs_rc() -> Outcome {
    let stats = lib(ChannelStats::per_aperture(&[0.3f64.sqrt(), 0.001f64.sqrt()], 1))?;
    let opt = lib(optimal_linear_code(&[1, 1], &stats.omega_weights()))?;
    let rc = lib(repetition_code(&[1, 1], 2))?;
    let q = Averaging::Quadrature { nodes: 400 };
    let full = grid(0.0, 40.0, 1.0);
    let a = lib(semianalytic_error_rate(&opt, &stats, &full, &q))?;
    let b = lib(semianalytic_error_rate(&rc, &stats, &full, &q))?;
    let worse: Vec<f64> = (0..full.len()).filter(|&k| a.rate[k] > b.rate[k]).map(|k| full[k]).collect();
    ensure(worse.iter().all(|&x| x < 4.0), || format!("optimal code worse than RC at {worse:?} dB"))?;
    let gain = crossing(&b, 1e-4, "RC")? - crossing(&a, 1e-4, "optimal")?;
    ensure(gain >= 1.0, || format!("gain {gain:.2} dB at 1e-4"))?;
    let note = match worse.last() {
        Some(x) => format!("; RC ahead only at {}-{x} dB where both exceed 0.15", worse[0]),
        None => String::new(),
    };
    Ok(format!("optimal <= RC over 4-40 dB, gain {gain:.2} dB at 1e-4{note}"))
}

fn zcc_degradation() -> Outcome {
    let snrs = grid(30.0, 60.0, 5.0);
    let cfg = SimConfig { trials: 100_000, seed: 7, min_errors: None, ..Default::default() };
    let zstats = lib(ChannelStats::uniform(2, 2, 0.0, 3.0))?;
    let z = lib(simulate_error_rate(&lib(zcc_code())?, &zstats, &snrs, &cfg))?;
    let zfit = lib(fit_diversity_from_curve(&z))?;
    let slope = lib(loglog_slope(&z))?;
    let rstats = lib(ChannelStats::uniform(2, 2, 0.0, 1.0))?;
    let rc = lib(repetition_code(&[1, 1], 2))?;
    let r = lib(semianalytic_error_rate(&rc, &rstats, &snrs, &Averaging::Quadrature { nodes: 50 }))?;
    let rfit = lib(fit_diversity_from_curve(&r))?;
    ensure(zfit.d_hat <= 0.3, || format!("ZCC D = {:.3}", zfit.d_hat))?;
    ensure((-1.6..=-0.4).contains(&slope), || format!("ZCC log-log slope {slope:.3}"))?;
    ensure(rfit.d_hat >= 1.0, || format!("RC D = {:.3}", rfit.d_hat))?;
    Ok(format!(
        "ZCC D = {:.3} ({}-{} dB), slope {slope:.3}; RC D = {:.3} ({}-{} dB)",
        zfit.d_hat, zfit.snr_lo, zfit.snr_hi, rfit.d_hat, rfit.snr_lo, rfit.snr_hi
    ))
}

fn golden_invariance() -> Outcome {
    for k1 in 1..=4 {
        for k2 in 1..=4 {
            let d = lib(golden_min_metric(k1, k2))?;
            ensure(d == 1, || format!("metric({k1},{k2}) = {d}"))?;
        }
    }
    let s = lib(golden_grid_search(200))?;
    ensure(s.best <= s.closed_form + 1e-6, || format!("grid best {} above {}", s.best, s.closed_form))?;
    Ok(format!(
        "metric 1 for all 16 (K1,K2); grid best {:.6} vs closed form {:.6} over {} points",
        s.best, s.closed_form, s.evaluated
    ))
}

fn golden_vs_strc() -> Outcome {
    let stats = lib(ChannelStats::uniform(2, 1, 0.0, 0.3))?;
    let snrs = grid(0.0, 24.0, 2.0);
    let cfg = SimConfig { trials: 1_000_000, seed: 13, min_errors: Some(2000), ..Default::default() };
    let golden = lib(golden_code(1, 1, &OmegaWeights::uniform(2)))?;
    let g = lib(simulate_error_rate(&golden, &stats, &snrs, &cfg))?;
    let s = lib(simulate_error_rate(&lib(strc_code(1, 1))?, &stats, &snrs, &cfg))?;
    let (sg, ss) = (crossing(&g, 1e-4, "Golden")?, crossing(&s, 1e-4, "STRC")?);
    ensure(ss - sg >= 2.0, || format!("gain {:.2} dB", ss - sg))?;
    Ok(format!("1e-4 at {sg:.2} dB (Golden) vs {ss:.2} dB (STRC), gain {:.2} dB", ss - sg))
}

/// Linear code `X(p) = Σ_ℓ A_ℓ p_ℓ` with random nonnegative `A_ℓ` and `P`,
/// scaled so that the mean of `1ᵀX1` is `L`.
fn random_linear_code(rng: &mut ChaCha8Rng, l: usize, k: u32, n: usize) -> Codebook {
    loop {
        if let Some(code) = try_linear_code(rng, l, k, n) {
            return code;
        }
    }
}

fn try_linear_code(rng: &mut ChaCha8Rng, l: usize, k: u32, n: usize) -> Option<Codebook> {
    let a: Vec<Mat<f64>> = (0..l)
        .map(|_| {
            let data = (0..l * n)
                .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) })
                .collect();
            Mat::from_vec(l, n, data).unwrap()
        })
        .collect();
    let mut p: Vec<f64> = Vec::new();
    while p.len() < 1 << k {
        let v = if rng.random_bool(0.5) { f64::from(rng.random_range(0..8u32)) } else { rng.random_range(0.0..4.0) };
        if !p.contains(&v) {
            p.push(v);
        }
    }
    let mean_p = p.iter().sum::<f64>() / p.len() as f64;
    let total_a: f64 = a.iter().map(|m| m.data().iter().sum::<f64>()).sum();
    if mean_p * total_a == 0.0 {
        return None;
    }
    let scale = l as f64 / (mean_p * total_a);
    let size = 1u32 << k;
    let labels: Vec<Vec<u32>> = (0..size.pow(l as u32))
        .map(|mut idx| {
            let mut lab = vec![0; l];
            for slot in (0..l).rev() {
                lab[slot] = idx % size;
                idx /= size;
            }
            lab
        })
        .collect();
    let codewords: Vec<Mat<f64>> = labels
        .iter()
        .map(|lab| {
            let mut x = Mat::zeros(l, n);
            for (slot, &s) in lab.iter().enumerate() {
                for r in 0..l {
                    for c in 0..n {
                        x[(r, c)] += scale * p[s as usize] * a[slot][(r, c)];
                    }
                }
            }
            x
        })
        .collect();
    let distinct = (0..codewords.len()).all(|i| (0..i).all(|j| codewords[i] != codewords[j]));
    if !distinct {
        return None;
    }
    Codebook::new(Family::Imported, Fading::Block, codewords, labels, l as f64, Structure::General).ok()
}

fn linear_converse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut full, mut worst_margin) = (0, f64::INFINITY);
    for sample in 0..200 {
        let l = rng.random_range(1..=2);
        let k = rng.random_range(1..=2);
        let n = rng.random_range(1..=3);
        let omega = lib(OmegaWeights::new((0..n).map(|_| rng.random_range(0.5..4.0)).collect()))?;
        let code = random_linear_code(&mut rng, l, k, n);
        ensure((code.mean_power() - l as f64).abs() < 1e-9, || format!("sample {sample}: power {}", code.mean_power()))?;
        let bound = lib(ln_linear_loss_lower_bound(k, &omega))?;
        match ln_small_scale_loss(&code, &omega) {
            Ok((ln, _)) => {
                ensure(ln >= bound - 1e-9, || format!("sample {sample}: ln loss {ln} below bound {bound}"))?;
                worst_margin = worst_margin.min(ln - bound);
                full += 1;
            }
            Err(Error::NotFullCover(..)) => {}
            Err(e) => return Err(format!("sample {sample}: {e}")),
        }
        let opt = lib(optimal_linear_code(&vec![k; l], &omega))?;
        let (ln, _) = lib(ln_small_scale_loss(&opt, &omega))?;
        ensure((ln - bound).abs() <= 1e-9, || format!("sample {sample}: optimal code {ln} vs bound {bound}"))?;
    }
    Ok(format!(
        "200 codebooks ({full} full cover, rest infinite loss), none below the bound (closest margin {worst_margin:.3e} in ln); optimal code attains it"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cover-order oracle equivalence", 30, cover_oracles),
        ("cover examples", 10, cover_examples),
        ("Diophantine constellations", 10, diophantine),
        ("fast ML equals brute-force ML", 60, fast_detector),
        ("semi-analytic vs Monte Carlo", 300, semi_vs_mc),
        ("optimal linear vs RC ordering", 300, optimal_vs_rc),
        ("ZCC degradation", 600, zcc_degradation),
        ("Golden invariance", 120, golden_invariance),
        ("Golden vs STRC", 600, golden_vs_strc),
        ("linear-code loss converse", 60, linear_converse),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(*limit) => Err(format!("runtime over {limit} s")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} {:>2} {name} [{:.1} s]: {detail}", k + 1, took.as_secs_f64());
        failed += usize::from(outcome.is_err());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
