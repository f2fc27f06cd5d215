use srcover::codebook::{
    cstbc_from_constellation, diophantine_constellation, golden_code, golden_design,
    optimal_linear_code, pam_product_constellation, repetition_code, split_bits, strc_code,
    validate_codebook, zcc_code, Codebook, Constellation, Fading, OmegaWeights, Structure,
    GOLDEN_RATIO,
};
use srcover::cover::cover_order;
use srcover::linalg::Mat;

fn rows(x: &Mat<f64>) -> Vec<Vec<f64>> {
    x.to_rows()
}

fn sorted_points(c: &Constellation) -> Vec<Vec<f64>> {
    let mut p = c.points().to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p
}

fn sort(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn brute_min_distance(c: &Constellation) -> f64 {
    let p = c.points();
    let mut best = f64::INFINITY;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            let d: f64 = p[i].iter().zip(&p[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.min(d.sqrt());
        }
    }
    best
}

#[test]
fn repetition_examples() {
    let c = repetition_code(&[1], 2).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(rows(c.codeword(0)), vec![vec![0.0, 0.0]]);
    assert_eq!(rows(c.codeword(1)), vec![vec![1.0, 1.0]]);
    assert_eq!(c.mean_power(), 1.0);

    let ook = repetition_code(&[1], 1).unwrap();
    assert_eq!(rows(ook.codeword(1)), vec![vec![2.0]]);
    assert_eq!(ook.mean_power(), 1.0);

    let c = repetition_code(&[1, 1], 2).unwrap();
    assert_eq!(c.len(), 4);
    for x in c.codewords() {
        assert_eq!(x.row(0)[0], x.row(0)[1]);
        assert_eq!(x.row(1)[0], x.row(1)[1]);
    }
    assert_eq!(c.labels()[2], vec![1, 0]);
    assert_eq!(rows(c.codeword(2)), vec![vec![1.0, 1.0], vec![0.0, 0.0]]);
    assert!((c.mean_power() - 2.0).abs() < 1e-12);
}

#[test]
fn repetition_rejects_zero_bits() {
    assert!(repetition_code(&[0], 2).is_err());
    assert!(repetition_code(&[], 2).is_err());
}

#[test]
fn optimal_linear_examples() {
    let c = optimal_linear_code(&[1], &OmegaWeights::new(vec![1.0, 3.0]).unwrap()).unwrap();
    assert_eq!(rows(c.codeword(0)), vec![vec![0.0, 0.0]]);
    assert_eq!(rows(c.codeword(1)), vec![vec![0.5, 1.5]]);
    assert_eq!(c.mean_power(), 1.0);
    let uniform = optimal_linear_code(&[1], &OmegaWeights::uniform(2)).unwrap();
    assert_eq!(uniform.codewords(), repetition_code(&[1], 2).unwrap().codewords());
    assert!(OmegaWeights::new(vec![1.0, 0.0]).is_err());
    assert!(OmegaWeights::new(vec![-1.0]).is_err());
}

#[test]
fn mean_power_is_exact_for_every_family() {
    let omega = OmegaWeights::new(vec![0.7, 2.3, 5.0]).unwrap();
    let books: Vec<Codebook> = vec![
        repetition_code(&[2, 1, 3], 3).unwrap(),
        optimal_linear_code(&[3, 2], &omega).unwrap(),
        zcc_code().unwrap(),
        cstbc_from_constellation(&diophantine_constellation(3, 5).unwrap(), &omega).unwrap(),
        golden_code(2, 3, &omega).unwrap(),
        strc_code(2, 1).unwrap(),
    ];
    for c in &books {
        let r = validate_codebook(c, false).unwrap();
        assert!(r.is_valid(), "{:?}: {r:?}", c.family());
        assert!((c.mean_power() - c.slots() as f64).abs() <= 1e-12 * c.slots() as f64);
        assert_eq!(c.len(), 1 << c.bits());
    }
}

#[test]
fn zcc_pairs() {
    let c = zcc_code().unwrap();
    assert_eq!(c.len(), 4);
    assert!((c.mean_power() - 2.0).abs() < 1e-15);
    // labels (0,0) (0,1) (1,0) (1,1)
    let e_minus = c.difference_gram(2, 1).unwrap();
    assert_eq!(e_minus.entries().to_rows(), vec![vec![2.0, -2.0], vec![-2.0, 2.0]]);
    assert_eq!(cover_order(&e_minus).unwrap().0, 0);
    let e_plus = c.difference_gram(3, 0).unwrap();
    assert_eq!(cover_order(&e_plus).unwrap().0, 2);
    let e_one = c.difference_gram(2, 0).unwrap();
    assert_eq!(cover_order(&e_one).unwrap().0, 1);
}

#[test]
fn validation_flags() {
    let opt = optimal_linear_code(&[1], &OmegaWeights::new(vec![1.0, 3.0]).unwrap()).unwrap();
    let r = validate_codebook(&opt, true).unwrap();
    assert_eq!(r.non_full_cover_pairs, Some(vec![]));
    assert!(r.is_valid());
    let z = validate_codebook(&zcc_code().unwrap(), true).unwrap();
    assert!(!z.non_full_cover_pairs.unwrap().is_empty());
    let doubled = validate_codebook(&opt.scaled(2.0), false).unwrap();
    assert!(!doubled.power_ok);
    assert!(!doubled.is_valid());
}

#[test]
fn duplicates_and_negatives_are_reported() {
    let x0 = Mat::from_vec(1, 1, vec![1.0]).unwrap();
    let x1 = Mat::from_vec(1, 1, vec![-1.0]).unwrap();
    let c = Codebook::new(
        srcover::codebook::Family::Imported,
        Fading::Block,
        vec![x0.clone(), x0, x1.clone(), x1],
        vec![vec![0], vec![1], vec![2], vec![3]],
        0.0,
        Structure::General,
    )
    .unwrap();
    let r = validate_codebook(&c, false).unwrap();
    assert_eq!(r.duplicate_pairs, vec![(0, 1), (2, 3)]);
    assert_eq!(r.negative_entries, vec![(2, 0, 0), (3, 0, 0)]);
    assert!(r.power_ok);
    assert!(!r.is_valid());
}

#[test]
fn pam_examples() {
    let c = pam_product_constellation(2, 4).unwrap();
    assert_eq!(c.len(), 16);
    assert_eq!(c.mean_power(), 3.0);
    let c = pam_product_constellation(1, 3).unwrap();
    assert_eq!(c.points().iter().map(|p| p[0]).collect::<Vec<_>>(), (0..8).map(f64::from).collect::<Vec<_>>());
    assert_eq!(c.mean_power(), 3.5);
    assert_eq!(split_bits(5, 3), vec![2, 2, 1]);
    assert_eq!(pam_product_constellation(3, 5).unwrap().mean_power(), 3.5);
    assert_eq!(pam_product_constellation(3, 5).unwrap().min_distance(), 1.0);
}

#[test]
fn diophantine_one_dimension_is_pam() {
    for k in 1..=6 {
        let c = diophantine_constellation(1, k).unwrap();
        let expected: Vec<Vec<f64>> = (0..1u32 << k).map(|v| vec![f64::from(v)]).collect();
        assert_eq!(sorted_points(&c), expected);
    }
}

#[test]
fn diophantine_two_four_matches_listing() {
    let listed: Vec<Vec<f64>> = [
        [0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2], [3, 0], [0, 3],
        [1, 2], [2, 1], [4, 0], [0, 4], [1, 3], [3, 1], [2, 2], [5, 0],
    ]
    .iter()
    .map(|p| p.iter().map(|&v| f64::from(v)).collect())
    .collect();
    let c = diophantine_constellation(2, 4).unwrap();
    assert_eq!(sorted_points(&c), sort(listed));
    assert_eq!(c.mean_power(), 45.0 / 16.0);
}

#[test]
fn diophantine_three_five_matches_listing() {
    let listed: Vec<Vec<f64>> = [
        [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0],
        [1, 0, 1], [0, 1, 1], [3, 0, 0], [0, 3, 0], [0, 0, 3], [1, 2, 0], [1, 0, 2], [0, 1, 2],
        [0, 2, 1], [2, 1, 0], [2, 0, 1], [1, 1, 1], [4, 0, 0], [0, 4, 0], [0, 0, 4], [3, 1, 0],
        [3, 0, 1], [1, 3, 0], [1, 0, 3], [0, 1, 3], [0, 3, 1], [2, 2, 0], [2, 0, 2], [0, 2, 2],
    ]
    .iter()
    .map(|p| p.iter().map(|&v| f64::from(v)).collect())
    .collect();
    let c = diophantine_constellation(3, 5).unwrap();
    assert_eq!(sorted_points(&c), sort(listed));
}

#[test]
fn diophantine_four_six() {
    let c = diophantine_constellation(4, 6).unwrap();
    assert_eq!(c.len(), 64);
    assert!(c.points().contains(&vec![0.5; 4]));
    assert_eq!(c.min_distance_sq_exact(), (4, 4));
    // Level sizes 1, 4, 11, 24 and 24 of the 45 power-4 candidates.
    let mut levels = [0usize; 5];
    for p in c.points() {
        let s: f64 = p.iter().sum();
        levels[s.round() as usize] += 1;
    }
    assert_eq!(levels, [1, 4, 11, 24, 24]);
    assert_eq!(c.mean_power(), 194.0 / 64.0);
    assert!(c.mean_power() < pam_product_constellation(4, 6).unwrap().mean_power());
}

#[test]
fn diophantine_sweep() {
    for l in 1..=4 {
        for k in 1..=7 {
            let c = diophantine_constellation(l, k).unwrap();
            assert_eq!(c.len(), 1 << k);
            assert!((brute_min_distance(&c) - 1.0).abs() < 1e-12, "L={l} K={k}");
            let (num, den) = c.min_distance_sq_exact();
            assert_eq!(num, den);
            assert!(c.points().iter().flatten().all(|&x| x >= 0.0));
            assert!(c.mean_power() <= pam_product_constellation(l, k).unwrap().mean_power() + 1e-12);
        }
    }
}

#[test]
fn diophantine_caps() {
    assert!(diophantine_constellation(9, 3).is_err());
    assert!(diophantine_constellation(2, 13).is_err());
    assert!(diophantine_constellation(0, 3).is_err());
    assert_eq!(diophantine_constellation(8, 12).unwrap().len(), 4096);
}

#[test]
fn constellation_rejects_duplicates() {
    assert!(Constellation::from_grid(1, 1, vec![vec![0], vec![0]]).is_err());
}

#[test]
fn cstbc_examples() {
    let s = diophantine_constellation(2, 4).unwrap();
    let c = cstbc_from_constellation(&s, &OmegaWeights::uniform(1)).unwrap();
    let scale = 2.0 * 16.0 / 45.0;
    assert!((c.codeword(15).row(0)[0] - scale * s.points()[15][0]).abs() < 1e-15);
    assert!((c.mean_power() - 2.0).abs() < 1e-12);

    let ook = Constellation::from_grid(1, 1, vec![vec![0], vec![1]]).unwrap();
    let c = cstbc_from_constellation(&ook, &OmegaWeights::uniform(2)).unwrap();
    assert_eq!(c.codewords(), repetition_code(&[1], 2).unwrap().codewords());
}

#[test]
fn cstbc_equivalent_channel_factorizes() {
    let omega = OmegaWeights::new(vec![1.0, 4.0, 2.5]).unwrap();
    let s = diophantine_constellation(3, 4).unwrap();
    let c = cstbc_from_constellation(&s, &omega).unwrap();
    let h = Mat::from_vec(3, 2, vec![0.3, 1.7, 2.2, 0.1, 0.9, 0.4]).unwrap();
    for (k, p) in s.points().iter().enumerate() {
        let xh = c.codeword(k).matmul(&h).unwrap();
        // g_j = Σ_i scale Ω_i h_ij; XH = s gᵀ.
        let total: f64 = s.points().iter().flatten().sum();
        let sc = 3.0 * s.len() as f64 / (omega.total() * total);
        for l in 0..3 {
            for j in 0..2 {
                let g: f64 = (0..3).map(|i| sc * omega.omega()[i] * h[(i, j)]).sum();
                assert!((xh[(l, j)] - p[l] * g).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn golden_examples() {
    let c = golden_code(1, 1, &OmegaWeights::uniform(1)).unwrap();
    let kappa = 2.0 / 5f64.sqrt();
    // label (1, 0): slot symbols Φ and Φ−1.
    assert!((c.codeword(2)[(0, 0)] - kappa * GOLDEN_RATIO).abs() < 1e-15);
    assert!((c.codeword(2)[(1, 0)] - kappa * (GOLDEN_RATIO - 1.0)).abs() < 1e-15);
    assert!((c.mean_power() - 2.0).abs() < 1e-12);
    assert_eq!(c.fading(), Fading::Fast);
    assert_eq!(c.effective_apertures(), 2);

    let (f, g) = golden_design(&OmegaWeights::uniform(1));
    let v = 5f64.sqrt() / 10.0;
    assert!((f[(0, 0)] - v * (GOLDEN_RATIO - 1.0)).abs() < 1e-16);
    assert!((f[(0, 1)] - v * GOLDEN_RATIO).abs() < 1e-16);
    let sum: f64 = f.data().iter().chain(g.data()).sum();
    assert!((sum - 1.0).abs() < 1e-15);
    let (f, g) = golden_design(&OmegaWeights::new(vec![1.0, 2.0, 7.0]).unwrap());
    let sum: f64 = f.data().iter().chain(g.data()).sum();
    assert!((sum - 1.0).abs() < 1e-15);
    assert!((GOLDEN_RATIO * (GOLDEN_RATIO - 1.0) - 1.0).abs() < 1e-15);
}

#[test]
fn strc_examples() {
    let c = strc_code(1, 1).unwrap();
    let values: Vec<f64> = c.codewords().iter().map(|x| x[(0, 0)]).collect();
    assert_eq!(values, vec![0.0, 2.0 / 3.0, 1.0 / 3.0, 1.0]);
    for x in c.codewords() {
        assert!(x.data().iter().all(|&v| v == x[(0, 0)]));
    }
    assert!((c.mean_power() - 2.0).abs() < 1e-12);
    let c = strc_code(3, 2).unwrap();
    assert!((c.mean_power() - 2.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip() {
    let c = optimal_linear_code(&[2, 1], &OmegaWeights::new(vec![1.0, 3.0]).unwrap()).unwrap();
    let text = c.to_csv();
    assert!(text.starts_with("index,label,r1c1,r1c2,r2c1,r2c2\n"));
    assert!(text.contains("\n5,2;1,"));
    let back = Codebook::from_csv(&text, Fading::Block).unwrap();
    assert_eq!(back.codewords(), c.codewords());
    assert_eq!(back.labels(), c.labels());
    assert!(validate_codebook(&back, true).unwrap().is_valid());
    assert!(Codebook::from_csv("index,label,r1c2\n0,0,1\n", Fading::Block).is_err());
}

#[test]
fn constellation_csv() {
    let c = diophantine_constellation(2, 4).unwrap();
    let text = c.to_csv();
    assert_eq!(text.lines().count(), 17);
    assert!(text.starts_with("index,s1,s2\n0,0,0\n"));
}
