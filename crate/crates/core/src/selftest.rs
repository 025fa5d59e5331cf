//! A quick pass over the invariants of every module, for `lamptree selftest`.
//!
//! The integration tests run the same properties with more instances; these
//! versions finish in a few seconds.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::{
    kappa, optimize_trap_r, target_constant, upper_split, witness_rank_experiment,
};
use crate::percolation::{dense_ball_probability, extract_cluster, sphere_counts, PercolationConfig};
use crate::rng::{McPlan, StreamRng};
use crate::spectral::{
    dense_eigenvalues, eigen_count_above, radial_trap_vector, shift_profile, top_eigen_default,
    trap_eigenvalue, trap_root_mass, KilledOperator,
};
use crate::tree::{ball_size, build_ball, descendant_profile, forward_subtree, SubtreeMask};
use crate::walks::{chain_sim, exact_return_prob, mc_return_prob, walk_range_census, WalkBudget};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, &'static str, fn() -> Result<String, String>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn sphere_sizes() -> Result<String, String> {
    for d in 3..=6 {
        for radius in 0..=6 {
            let ball = lift(build_ball(d, radius))?;
            let spheres: usize = (0..=radius).map(|j| ball.sphere(j).len()).sum();
            ensure(spheres == ball.len(), || format!("d={d} R={radius}"))?;
            ensure(ball_size(d, radius) == Some(ball.len() as u128), || {
                format!("closed form d={d} R={radius}")
            })?;
        }
    }
    Ok("d 3..6, R 0..6".into())
}

fn forward_sizes() -> Result<String, String> {
    let ball = Arc::new(lift(build_ball(4, 5))?);
    for r in 0..=5 {
        let mask = lift(forward_subtree(&ball, r))?;
        ensure(mask.len() as u64 == (3u64.pow(r + 1) - 1) / 2, || format!("r={r}"))?;
    }
    Ok("d 4, r 0..5".into())
}

fn descendant_recursion() -> Result<String, String> {
    let ball = Arc::new(lift(build_ball(3, 7))?);
    let mut rng = StreamRng::new(1, 0);
    for _ in 0..20 {
        let mask = SubtreeMask::random_growth(ball.clone(), 60, &mut rng);
        let prof = descendant_profile(&mask, 4);
        for k in 0..4 {
            for &x in mask.order() {
                let sum: u64 = mask.mask_children(x).map(|c| prof[k][c]).sum();
                ensure(prof[k + 1][x] == sum, || format!("k={k} x={x}"))?;
            }
        }
    }
    Ok("20 masks".into())
}

fn trap_cluster() -> Result<String, String> {
    let ball = Arc::new(lift(build_ball(3, 4))?);
    let config = lift(PercolationConfig::trap_event(&ball, 3))?;
    let cluster = extract_cluster(&config).ok_or("root closed")?;
    let z = sphere_counts(&cluster);
    ensure(z[..4] == [1, 2, 4, 8] && z[4] == 0, || format!("{z:?}"))?;
    Ok("B_3 isolated".into())
}

fn dense_ball_small() -> Result<String, String> {
    let est = lift(dense_ball_probability(3, 1, 1.0, &McPlan::new(100_000, 7)))?;
    ensure(est.ci_low <= 0.4375 && 0.4375 <= est.ci_high, || {
        format!("{} [{}, {}]", est.estimate, est.ci_low, est.ci_high)
    })?;
    Ok(format!("{:.4}", est.estimate))
}

fn trap_closed_forms() -> Result<String, String> {
    for (d, r) in [(3, 4), (4, 3), (5, 2)] {
        let ball = Arc::new(lift(build_ball(d, r))?);
        let op = KilledOperator::from_mask(&lift(forward_subtree(&ball, r))?);
        let top = lift(top_eigen_default(&op))?;
        ensure((top.top_eigenvalue - trap_eigenvalue(d, r, 1)).abs() < 1e-10, || {
            format!("eigenvalue d={d} r={r}")
        })?;
        let mass = top.root_mass.ok_or("no root mass")?;
        ensure((mass - trap_root_mass(r, 1)).abs() < 1e-10, || format!("mass d={d} r={r}"))?;
        let u = radial_trap_vector(d, r);
        let b = f64::from(d - 1);
        let lam = 2.0 * b.sqrt() * (std::f64::consts::PI / f64::from(r + 2)).cos();
        for j in 0..=r as usize {
            let prev = if j == 0 { 0.0 } else { u[j - 1] };
            let next = if j == r as usize { 0.0 } else { b * u[j + 1] };
            ensure((prev + next - lam * u[j]).abs() < 1e-12, || format!("level {j}"))?;
        }
    }
    Ok("3 traps".into())
}

fn inertia_matches_dense() -> Result<String, String> {
    let ball = Arc::new(lift(build_ball(3, 8))?);
    let mut rng = StreamRng::new(2, 0);
    for i in 0..40 {
        let config = PercolationConfig::sample(&ball, &mut rng);
        let open: Vec<usize> = (0..ball.ball_len(5)).filter(|&v| config.is_open(v)).collect();
        if open.is_empty() {
            continue;
        }
        let op = lift(KilledOperator::from_vertices(&ball, &open, Some(0)))?;
        let ev = dense_eigenvalues(&op.to_dense());
        let e = 0.1 + 0.015 * f64::from(i);
        let c = eigen_count_above(&op, e);
        let want = ev.iter().filter(|&&l| l > c.shifted_threshold).count();
        ensure(c.count == want, || format!("trial {i}"))?;
        let neg = eigen_count_above(&op.negated(), e).count;
        ensure(neg == c.count, || format!("bipartite pairing, trial {i}"))?;
        ensure(ev.iter().all(|l| l.abs() <= crate::rho(3) + 1e-9), || "norm bound".into())?;
    }
    Ok("40 forests".into())
}

fn gauge_sweep() -> Result<String, String> {
    let ball = Arc::new(lift(build_ball(3, 6))?);
    let mut rng = StreamRng::new(3, 0);
    for _ in 0..5 {
        let mask = SubtreeMask::random_growth(ball.clone(), 40, &mut rng);
        let p = lift(shift_profile(&mask, 4, 32))?;
        let spread = p.sweep_spread().unwrap_or(0.0);
        let radius = p.sweep_radius().unwrap_or(0.0);
        ensure(spread < 1e-8, || format!("spread {spread}"))?;
        ensure((radius - p.numerical_radius).abs() < 1e-8, || "gauge identity".into())?;
        ensure(p.numerical_radius <= 1.0 + 1e-12, || "contraction".into())?;
    }
    Ok("5 masks, 32 angles".into())
}

fn exact_values() -> Result<String, String> {
    let p2 = lift(exact_return_prob(3, 1, WalkBudget::default()))?;
    let p4 = lift(exact_return_prob(3, 2, WalkBudget::default()))?;
    ensure(p2.exact == Some(BigRational::new(BigInt::from(1), BigInt::from(12))), || "p_2".into())?;
    ensure(p4.exact == Some(BigRational::new(BigInt::from(1), BigInt::from(36))), || "p_4".into())?;
    let census = lift(walk_range_census(3, 4, WalkBudget::default()))?;
    let counts: Vec<(usize, u32)> = census
        .iter()
        .map(|(&s, c)| (s, u32::try_from(c).unwrap_or(0)))
        .collect();
    ensure(counts == [(2, 3), (3, 12)], || format!("{counts:?}"))?;
    Ok("p_2 = 1/12, p_4 = 1/36".into())
}

fn log_convexity() -> Result<String, String> {
    let p: Vec<BigRational> = (0..=5)
        .map(|n| lift(exact_return_prob(3, n, WalkBudget::default())).map(|e| e.exact.unwrap()))
        .collect::<Result<_, _>>()?;
    for n in 1..5 {
        ensure(&p[n + 1] * &p[n - 1] >= &p[n] * &p[n], || format!("n={n}"))?;
    }
    Ok("n 1..4".into())
}

fn estimators_agree() -> Result<String, String> {
    let mc = lift(mc_return_prob(3, 1, &McPlan::new(100_000, 4)))?;
    let chain = lift(chain_sim(3, 1, &McPlan::new(200_000, 4)))?;
    let exact = 1.0 / 12.0;
    ensure((mc.value - exact).abs() < 4.0 * mc.std_error, || format!("mc {}", mc.value))?;
    ensure((chain.value - exact).abs() < 4.0 * chain.std_error, || {
        format!("chain {}", chain.value)
    })?;
    Ok(format!("mc {:.5}, chain {:.5}", mc.value, chain.value))
}

fn sandwich() -> Result<String, String> {
    for n in 2..=5u32 {
        let p = lift(exact_return_prob(3, n, WalkBudget::default()))?.exact.unwrap();
        let lower = lift(optimize_trap_r(3, u64::from(n)))?.bound.log_value;
        let log_p = crate::walks::ln_rational(&p);
        ensure(lower <= log_p, || format!("lower n={n}"))?;
        ensure(log_p <= 2.0 * f64::from(n) * crate::rho(3).ln(), || format!("upper n={n}"))?;
        let split = lift(upper_split(3, u64::from(n), 0.5, 0.0))?;
        ensure(log_p <= split.log_total, || format!("split n={n}"))?;
    }
    Ok("n 2..5".into())
}

fn kappa_identity() -> Result<String, String> {
    for d in 3..=8 {
        let k = kappa(d);
        let t = target_constant(d);
        ensure((2.0 * k * k - t).abs() <= 4.0 * f64::EPSILON * t, || format!("d={d}"))?;
    }
    Ok("d 3..8".into())
}

fn witness_rank() -> Result<String, String> {
    let rep = lift(witness_rank_experiment(3, 4, 6, 2, 0.9, 0.05, &McPlan::new(100, 5)))?;
    ensure(rep.violations().count() == 0, || "rank implication violated".into())?;
    ensure(rep.dense_mismatches().count() == 0, || "dense recount differs".into())?;
    Ok(format!("{} samples, hypothesis on {}", rep.rows.len(), rep.hypothesis_count()))
}

const CHECKS: &[Check] = &[
    ("tree-core", "sphere sizes", sphere_sizes),
    ("tree-core", "forward subtree sizes", forward_sizes),
    ("tree-core", "descendant recursion", descendant_recursion),
    ("percolation", "trap event cluster", trap_cluster),
    ("percolation", "dense ball at r=1", dense_ball_small),
    ("spectral", "trap closed forms", trap_closed_forms),
    ("spectral", "inertia against dense", inertia_matches_dense),
    ("spectral", "gauge sweep", gauge_sweep),
    ("walks", "exact values", exact_values),
    ("walks", "log-convexity", log_convexity),
    ("walks", "estimator agreement", estimators_agree),
    ("bounds", "sandwich", sandwich),
    ("bounds", "kappa identity", kappa_identity),
    ("bounds", "witness rank", witness_rank),
];

/// Runs every check; a panic inside one is reported as a failure.
pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(module, name, check)| {
            let outcome = std::panic::catch_unwind(check)
                .unwrap_or_else(|_| Err("panicked".to_string()));
            let (passed, detail) = match outcome {
                Ok(s) => (true, s),
                Err(s) => (false, s),
            };
            CheckResult {
                module,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_check_passes() {
        for c in super::run_all() {
            assert!(c.passed, "{} / {}: {}", c.module, c.name, c.detail);
        }
    }
}
