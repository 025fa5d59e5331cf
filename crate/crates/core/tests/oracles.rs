//! Independent oracles for the derived example values.

use std::collections::BTreeMap;
use std::sync::Arc;

use faer::{c64, Mat, Side};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use lamptree::percolation::{dense_ball_probability, extract_cluster, PercolationConfig};
use lamptree::rng::{McPlan, StreamRng};
use lamptree::spectral::{shift_profile, top_eigen_default, RootedShift};
use lamptree::tree::{ball_count, build_ball, forward_subtree, SubtreeMask, TreeBall};
use lamptree::walks::{census_probability, exact_return_prob, walk_range_census, WalkBudget};

/// Every closed walk on the explicit ball, no relabeling symmetry.
fn naive_census(d: u32, m: u32) -> BTreeMap<usize, BigUint> {
    let ball = build_ball(d, m / 2 + 1).unwrap();
    let mut visits = vec![0u32; ball.len()];
    let mut distinct = 1usize;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    visits[0] = 1;

    fn go(
        ball: &TreeBall,
        x: usize,
        left: u32,
        visits: &mut [u32],
        distinct: &mut usize,
        counts: &mut BTreeMap<usize, u64>,
    ) {
        if left == 0 {
            if x == 0 {
                *counts.entry(*distinct).or_default() += 1;
            }
            return;
        }
        let ys: Vec<usize> = ball.neighbors(x).collect();
        for y in ys {
            visits[y] += 1;
            if visits[y] == 1 {
                *distinct += 1;
            }
            go(ball, y, left - 1, visits, distinct, counts);
            if visits[y] == 1 {
                *distinct -= 1;
            }
            visits[y] -= 1;
        }
    }
    go(&ball, 0, m, &mut visits, &mut distinct, &mut counts);
    counts.into_iter().map(|(s, c)| (s, BigUint::from(c))).collect()
}

#[test]
fn census_matches_unreduced_enumeration() {
    for (d, m) in [(3, 2), (3, 4), (3, 6), (3, 8), (3, 10), (4, 6), (4, 8), (5, 6), (3, 7)] {
        let fast = walk_range_census(d, m, WalkBudget::default()).unwrap();
        assert_eq!(fast, naive_census(d, m), "d = {d}, m = {m}");
    }
}

/// `E⟨δ_o, P_ω^{2n} δ_o⟩` by summing over every configuration of `B(o, n)`.
fn configuration_average(d: u32, n: u32) -> BigRational {
    let ball = build_ball(d, n).unwrap();
    let len = ball.len();
    assert!(len <= 20);
    let mut total = BigInt::from(0);
    for bits in 0u32..(1 << len) {
        let open = |v: usize| bits >> v & 1 == 1;
        if !open(0) {
            continue;
        }
        // integer walk counts inside the open set
        let mut x = vec![0u64; len];
        x[0] = 1;
        for _ in 0..2 * n {
            let mut y = vec![0u64; len];
            for (v, out) in y.iter_mut().enumerate() {
                if open(v) {
                    *out = ball.neighbors(v).filter(|&w| open(w)).map(|w| x[w]).sum();
                }
            }
            x = y;
        }
        total += x[0];
    }
    let den = BigInt::from(d).pow(2 * n) << len;
    BigRational::new(total, den)
}

#[test]
fn exact_oracle_matches_configuration_average() {
    for (d, n) in [(3, 1), (3, 2), (4, 1), (4, 2), (5, 1)] {
        let e = exact_return_prob(d, n, WalkBudget::default()).unwrap();
        assert_eq!(e.exact.unwrap(), configuration_average(d, n), "d = {d}, n = {n}");
    }
}

#[test]
fn census_weights_reproduce_exact_value() {
    for n in 1..=6 {
        let census = walk_range_census(3, 2 * n, WalkBudget::default()).unwrap();
        let e = exact_return_prob(3, n, WalkBudget::default()).unwrap();
        assert_eq!(census_probability(3, 2 * n, &census), e.exact.unwrap());
    }
}

#[test]
fn ball_count_matches_distance_matrix() {
    let ball = Arc::new(build_ball(3, 5).unwrap());
    let mut rng = StreamRng::new(21, 0);
    for _ in 0..30 {
        let mask = SubtreeMask::random_growth(ball.clone(), 80, &mut rng);
        for &v in mask.order() {
            for r in 0..=2 {
                if !ball.ball_fits(v, r) {
                    continue;
                }
                let want = mask
                    .order()
                    .iter()
                    .filter(|&&w| ball.distance(v, w) <= r)
                    .count();
                assert_eq!(ball_count(&mask, v, r).unwrap(), want);
            }
        }
    }
}

#[test]
fn dense_ball_at_radius_one_is_seven_sixteenths() {
    // root open and at least one of three neighbors open: (1/2)(1 - 1/8)
    let exact = 0.5 * (1.0 - 0.125);
    assert_eq!(exact, 7.0 / 16.0);
    let est = dense_ball_probability(3, 1, 1.0, &McPlan::new(400_000, 12)).unwrap();
    assert!(est.ci_low <= exact && exact <= est.ci_high, "{est:?}");
    let tiny = dense_ball_probability(3, 3, 1e-9, &McPlan::new(100_000, 12)).unwrap();
    assert!((tiny.estimate - 0.5).abs() < 4.0 * tiny.tally.std_error());
    let impossible = dense_ball_probability(3, 2, 100.0, &McPlan::new(10_000, 12)).unwrap();
    assert_eq!(impossible.estimate, 0.0);
}

#[test]
fn trap_and_path_eigenvalues_match_tridiagonal_closed_forms() {
    let ball = Arc::new(build_ball(3, 8).unwrap());
    let trap = lamptree::KilledOperator::from_mask(&forward_subtree(&ball, 1).unwrap());
    let top = top_eigen_default(&trap).unwrap().top_eigenvalue;
    assert!((top - 2f64.sqrt() / 3.0).abs() < 1e-12);
    for len in [2usize, 3, 5, 9] {
        let path = SubtreeMask::path(ball.clone(), len).unwrap();
        let op = lamptree::KilledOperator::from_mask(&path);
        let want = 2.0 / 3.0 * (std::f64::consts::PI / (len as f64 + 1.0)).cos();
        assert!((top_eigen_default(&op).unwrap().top_eigenvalue - want).abs() < 1e-12);
    }
}

/// `λ_max(e^{iθ}Ŝ + e^{-iθ}Ŝᵀ)` by a dense complex Hermitian eigensolve.
fn dense_gauge_top(shift: &RootedShift, theta: f64) -> f64 {
    let s = shift.to_dense();
    let n = s.nrows();
    let phase = c64::new(theta.cos(), theta.sin());
    let h = Mat::from_fn(n, n, |i, j| phase * s[(i, j)] + phase.conj() * s[(j, i)]);
    h.self_adjoint_eigenvalues(Side::Lower)
        .unwrap()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn gauge_sweep_matches_complex_hermitian_solve() {
    let ball = Arc::new(build_ball(3, 6).unwrap());
    let mut rng = StreamRng::new(31, 0);
    for _ in 0..8 {
        let mask = SubtreeMask::random_growth(ball.clone(), 50, &mut rng);
        let profile = shift_profile(&mask, 2, 12).unwrap();
        let rooted = mask.rerooted(profile.root).unwrap();
        let shift = RootedShift::new(&rooted);
        for (&theta, &value) in profile.sweep_thetas.iter().zip(&profile.sweep_values) {
            assert!((dense_gauge_top(&shift, theta) - value).abs() < 1e-9);
        }
    }
}

#[test]
fn trap_event_frequency_matches_boundary_count() {
    let ball = Arc::new(build_ball(3, 2).unwrap());
    let mask = forward_subtree(&ball, 1).unwrap();
    let trap: Vec<usize> = mask.order().to_vec();
    // outer vertex boundary counted directly: o⁻ plus the b^{r+1} leaves below
    let boundary = (0..ball.len())
        .filter(|&v| !mask.contains(v) && ball.neighbors(v).any(|w| mask.contains(w)))
        .count();
    assert_eq!(boundary, 1 + 4);
    let p = 0.5f64.powi((trap.len() + boundary) as i32);
    assert_eq!(p, 1.0 / 256.0);

    let samples = 1_000_000u64;
    let mut rng = StreamRng::new(41, 0);
    let mut config = PercolationConfig::all_closed(&ball);
    let mut hits = 0u64;
    for _ in 0..samples {
        config.resample(&mut rng);
        if let Some(c) = extract_cluster(&config) {
            let mut v = c.vertices().to_vec();
            v.sort_unstable();
            hits += u64::from(v == trap);
        }
    }
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    let freq = hits as f64 / samples as f64;
    assert!((freq - p).abs() < 3.0 * sigma, "{freq} vs {p}");
    // leaving o⁻ out of the boundary would predict 1/128
    assert!((freq - 1.0 / 128.0).abs() > 10.0 * sigma);
}

#[test]
fn second_sphere_is_binomial_given_the_first() {
    // Z_2 | Z_1 = z ~ Bin(2z, 1/2) for d = 3; pooled Pearson statistic
    let ball = Arc::new(build_ball(3, 2).unwrap());
    let mut rng = StreamRng::new(51, 0);
    let mut config = PercolationConfig::all_closed(&ball);
    let mut table = [[0u64; 7]; 4];
    for _ in 0..100_000 {
        config.resample(&mut rng);
        if let Some(c) = extract_cluster(&config) {
            let z = lamptree::percolation::sphere_counts(&c);
            table[z[1] as usize][z[2] as usize] += 1;
        }
    }
    let mut chi2 = 0.0;
    let mut dof = 0;
    for (z, row) in table.iter().enumerate().skip(1) {
        let total: u64 = row.iter().sum();
        let sites = 2 * z;
        let mut binom = 1.0;
        for k in 0..=sites {
            if k > 0 {
                binom *= (sites - k + 1) as f64 / k as f64;
            }
            let expected = total as f64 * binom / 2f64.powi(sites as i32);
            chi2 += (row[k] as f64 - expected).powi(2) / expected;
        }
        dof += sites;
    }
    assert_eq!(dof, 12);
    // upper 0.1% point of chi-square with 12 degrees of freedom
    assert!(chi2 < 32.91, "chi2 = {chi2}");
}
