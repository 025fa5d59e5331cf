//! The spectral split of the upper bound.
//!
//! Split `p_{2n} = ∫ λ^{2n} dν` at `|λ| = ρ_d (1 - δ)`: the inner part is at
//! most `ρ^{2n} e^{-2nδ}` and the outer part at most `ρ^{2n}` times the tail
//! mass `ν{|λ| >= ρ(1 - δ)}`.

use std::sync::Arc;

use super::correction::kappa;
use crate::error::{Error, Result};
use crate::percolation::{extract_cluster, PercolationConfig};
use crate::rng::{McPlan, Merge};
use crate::spectral::{dense_eigen, KilledOperator};
use crate::stats::{log_add_exp, Moments};
use crate::tree::build_ball;

/// `δ_n = ((κ_d - 2η) / ln n)²`, with `η = κ_d / 8` when not given.
pub fn delta_n(d: u32, n: u64, eta: Option<f64>) -> f64 {
    let k = kappa(d);
    let eta = eta.unwrap_or(k / 8.0);
    ((k - 2.0 * eta) / (n as f64).ln()).powi(2)
}

/// `ln` of the hypothesized tail `exp(-c · exp((κ_d - η) / √δ))`.
pub fn hypothesized_log_tail(d: u32, delta: f64, c: f64, eta: f64) -> f64 {
    -c * ((kappa(d) - eta) / delta.sqrt()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperSplit {
    pub d: u32,
    pub n: u64,
    pub delta: f64,
    /// `2n ln ρ_d`.
    pub log_rho_power: f64,
    /// `2n ln ρ_d - 2nδ`.
    pub log_i1: f64,
    /// `2n ln ρ_d + ln(tail)`.
    pub log_i2: f64,
    pub log_total: f64,
}

impl UpperSplit {
    /// `2nδ`, the gain of the inner part over `ρ^{2n}`.
    pub fn i1_log_correction(&self) -> f64 {
        self.log_rho_power - self.log_i1
    }
}

/// Both halves of the split for a caller-supplied `ln(tail mass)`
/// (`-inf` for a zero tail).
pub fn upper_split(d: u32, n: u64, delta: f64, log_tail: f64) -> Result<UpperSplit> {
    crate::check_degree(d)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("need 0 < delta < 1, got {delta}"),
        });
    }
    if log_tail > 0.0 || log_tail.is_nan() {
        return Err(Error::InvalidParameter {
            name: "tail_mass",
            message: format!("tail mass must lie in [0, 1], got exp({log_tail})"),
        });
    }
    let nf = n as f64;
    let log_rho_power = 2.0 * nf * crate::rho(d).ln();
    let log_i1 = log_rho_power - 2.0 * nf * delta;
    let log_i2 = log_rho_power + log_tail;
    Ok(UpperSplit {
        d,
        n,
        delta,
        log_rho_power,
        log_i1,
        log_i2,
        log_total: log_add_exp(log_i1, log_i2),
    })
}

/// Empirical `ν{|λ| >= ρ_d (1 - δ)}` from root clusters on `B(o, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailEstimate {
    pub d: u32,
    pub radius: u32,
    pub delta: f64,
    pub mass: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Samples whose cluster reached the arena boundary.
    pub truncated_samples: u64,
}

impl TailEstimate {
    /// Set when any contributing cluster touched the boundary, so the value
    /// is a finite-volume quantity.
    pub fn truncated(&self) -> bool {
        self.truncated_samples > 0
    }
}

#[derive(Default)]
struct TailAcc {
    mass: Moments,
    truncated: u64,
}

impl Merge for TailAcc {
    fn merge(&mut self, other: Self) {
        self.mass.merge(other.mass);
        self.truncated += other.truncated;
    }
}

pub fn spectral_tail_estimate(d: u32, radius: u32, delta: f64, plan: &McPlan) -> Result<TailEstimate> {
    crate::check_degree(d)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("need 0 <= delta < 1, got {delta}"),
        });
    }
    let ball = Arc::new(build_ball(d, radius)?);
    let edge = crate::rho(d) * (1.0 - delta);
    let acc = plan.run(TailAcc::default, |rng, _first, count, acc| {
        let mut config = PercolationConfig::all_closed(&ball);
        for _ in 0..count {
            config.resample(rng);
            let Some(cluster) = extract_cluster(&config) else {
                acc.mass.push(0.0);
                continue;
            };
            acc.truncated += u64::from(cluster.truncated_at_boundary());
            let op = KilledOperator::from_cluster(&cluster).expect("cluster is nonempty");
            let (values, vectors) = dense_eigen(&op.to_dense());
            let root = op.root().expect("root is a member");
            let mass: f64 = values
                .iter()
                .enumerate()
                .filter(|(_, l)| l.abs() >= edge)
                .map(|(i, _)| vectors[(root, i)].powi(2))
                .sum();
            acc.mass.push(mass);
        }
    })?;
    Ok(TailEstimate {
        d,
        radius,
        delta,
        mass: acc.mass.mean(),
        std_error: acc.mass.std_error(),
        samples: plan.samples,
        truncated_samples: acc.truncated,
    })
}
