//! Percolation Monte Carlo for `p_{2n}(e, e) = E⟨δ_o, P_ω^{2n} δ_o⟩`.
//!
//! Since `P_ω` is symmetric, `⟨δ_o, P^{2n} δ_o⟩ = ‖P^n δ_o‖²`, so each sample
//! needs `n` sparse products on the root cluster explored to distance `n`.

use std::sync::Arc;

use super::{EstimateMethod, ReturnProbEstimate};
use crate::error::{Error, Result};
use crate::percolation::{extract_cluster_at, PercolationConfig};
use crate::rng::McPlan;
use crate::stats::Moments;
use crate::tree::build_ball;

/// `⟨δ_o, P_ω^{2n} δ_o⟩` for one configuration; zero when the root is closed.
/// Only vertices within distance `n` of the root are read.
pub fn percolation_moment(config: &PercolationConfig, n: u32) -> f64 {
    let Some(cluster) = extract_cluster_at(config, 0, n) else {
        return 0.0;
    };
    let w = 1.0 / f64::from(config.ball().degree());
    let len = cluster.len();
    let mut x = vec![0.0; len];
    let mut y = vec![0.0; len];
    x[cluster.root()] = 1.0;
    for _ in 0..n {
        for (i, out) in y.iter_mut().enumerate() {
            *out = w * cluster.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.iter().map(|v| v * v).sum()
}

pub fn mc_return_prob(d: u32, n: u32, plan: &McPlan) -> Result<ReturnProbEstimate> {
    crate::check_degree(d)?;
    if plan.samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            message: "need at least one sample".into(),
        });
    }
    let ball = Arc::new(build_ball(d, n)?);
    let moments = plan.run(Moments::default, |rng, _first, count, acc| {
        let mut config = PercolationConfig::all_closed(&ball);
        for _ in 0..count {
            config.resample(rng);
            acc.push(percolation_moment(&config, n));
        }
    })?;
    let value = moments.mean();
    Ok(ReturnProbEstimate {
        d,
        n,
        value,
        log_value: value.ln(),
        std_error: moments.std_error(),
        method: EstimateMethod::PercolationMc,
        samples: plan.samples,
        seed: Some(plan.seed),
        exact: None,
        ci: None,
    })
}
