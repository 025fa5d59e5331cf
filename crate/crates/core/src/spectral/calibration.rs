//! Empirical frontier for the small-power / numerical-radius implication.
//!
//! For a contraction `S`, small `‖S^m‖` forces `w(S) <= 1 - γ / m²` for some
//! `γ`, but only existence of the constants is known. This module tabulates
//! `(‖S^m‖, w(S), m)` over random subtree families and reports, per `m` and
//! per cutoff `ε`, the smallest observed `γ̂ = m² (1 - w(S))` among samples
//! with `‖S^m‖ <= ε`. The numbers are empirical.

use std::sync::Arc;

use rand::Rng;

use super::shift::shift_profile;
use crate::error::Result;
use crate::percolation::{extract_cluster, PercolationConfig};
use crate::rng::StreamRng;
use crate::tree::{build_ball, forward_subtree, SubtreeMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskFamily {
    RandomGrowth,
    Path,
    ForwardTrap,
    PercolationCluster,
}

impl MaskFamily {
    pub const ALL: [MaskFamily; 4] = [
        MaskFamily::RandomGrowth,
        MaskFamily::Path,
        MaskFamily::ForwardTrap,
        MaskFamily::PercolationCluster,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MaskFamily::RandomGrowth => "random-growth",
            MaskFamily::Path => "path",
            MaskFamily::ForwardTrap => "forward-trap",
            MaskFamily::PercolationCluster => "percolation-cluster",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRow {
    pub family: MaskFamily,
    pub sample: u64,
    pub n_vertices: usize,
    pub m: u32,
    pub shift_power_norm: f64,
    pub numerical_radius: f64,
    /// `m² (1 - w(S))`.
    pub gamma_hat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierPoint {
    pub m: u32,
    pub epsilon: f64,
    /// Smallest `γ̂` over samples with `‖S^m‖ <= ε`, if any.
    pub gamma_min: Option<f64>,
    pub support: usize,
}

fn sample_mask(
    family: MaskFamily,
    ball: &Arc<crate::tree::TreeBall>,
    rng: &mut StreamRng,
) -> Result<SubtreeMask> {
    let radius = ball.radius();
    Ok(match family {
        MaskFamily::RandomGrowth => {
            let target = rng.gen_range(2..=ball.len().min(300));
            SubtreeMask::random_growth(ball.clone(), target, rng)
        }
        MaskFamily::Path => {
            let len = rng.gen_range(2..=radius as usize + 1);
            SubtreeMask::path(ball.clone(), len)?
        }
        MaskFamily::ForwardTrap => forward_subtree(ball, rng.gen_range(1..=radius))?,
        MaskFamily::PercolationCluster => loop {
            let config = PercolationConfig::sample(ball, rng);
            if let Some(cluster) = extract_cluster(&config) {
                if cluster.len() >= 2 {
                    let mut member = vec![false; ball.len()];
                    cluster.vertices().iter().for_each(|&v| member[v] = true);
                    break SubtreeMask::new(ball.clone(), member, 0)?;
                }
            }
        },
    })
}

/// `samples` masks per family on `B(o, radius)` in `T_d`, one row per `m`.
pub fn calibrate_numerical_radius(
    d: u32,
    radius: u32,
    m_values: &[u32],
    samples: u64,
    seed: u64,
) -> Result<Vec<CalibrationRow>> {
    let ball = Arc::new(build_ball(d, radius)?);
    let k_max = m_values.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for (fi, family) in MaskFamily::ALL.into_iter().enumerate() {
        let mut rng = StreamRng::new(seed, fi as u64);
        for sample in 0..samples {
            let mask = sample_mask(family, &ball, &mut rng)?;
            let profile = shift_profile(&mask, k_max, 0)?;
            for &m in m_values {
                rows.push(CalibrationRow {
                    family,
                    sample,
                    n_vertices: mask.len(),
                    m,
                    shift_power_norm: profile.norm(m as usize),
                    numerical_radius: profile.numerical_radius,
                    gamma_hat: f64::from(m * m) * (1.0 - profile.numerical_radius),
                });
            }
        }
    }
    Ok(rows)
}

pub fn calibration_frontier(rows: &[CalibrationRow], eps_grid: &[f64]) -> Vec<FrontierPoint> {
    let mut ms: Vec<u32> = rows.iter().map(|r| r.m).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut out = Vec::new();
    for m in ms {
        for &epsilon in eps_grid {
            let hits: Vec<f64> = rows
                .iter()
                .filter(|r| r.m == m && r.shift_power_norm <= epsilon)
                .map(|r| r.gamma_hat)
                .collect();
            out.push(FrontierPoint {
                m,
                epsilon,
                gamma_min: hits.iter().copied().reduce(f64::min),
                support: hits.len(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_reproducible_and_contractive() {
        let a = calibrate_numerical_radius(3, 6, &[2, 4], 3, 17).unwrap();
        let b = calibrate_numerical_radius(3, 6, &[2, 4], 3, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4 * 3 * 2);
        for row in &a {
            assert!(row.numerical_radius <= 1.0 + 1e-12);
            assert!(row.shift_power_norm <= 1.0 + 1e-12);
        }
        let frontier = calibration_frontier(&a, &[0.5, 1.0]);
        assert_eq!(frontier.len(), 4);
        let full = frontier.iter().find(|p| p.m == 2 && p.epsilon == 1.0).unwrap();
        assert_eq!(full.support, 12);
    }
}
