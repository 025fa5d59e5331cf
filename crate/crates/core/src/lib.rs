//! Numerical laboratory for the switch–walk–switch lamplighter walk with
//! `Z_2` lamps over the `d`-regular tree.
//!
//! The return probability of the walk equals the averaged root moment of the
//! killed transition operator of Bernoulli(1/2) site percolation. This crate
//! evaluates that identity from several directions:
//!
//! * [`walks`]: exact range-weighted walk sums, percolation Monte Carlo and a
//!   direct chain simulator,
//! * [`percolation`]: configurations, root clusters, sphere counts and dense-ball
//!   witness sets,
//! * [`spectral`]: killed operators on finite subtrees, top eigenpairs,
//!   inertia counting, trap spectra and rooted-shift norms,
//! * [`bounds`]: the trap lower bound, the spectral split of the upper bound,
//!   the `n / log² n` correction functional and the witness rank experiment.
//!
//! Everything is built on [`tree::TreeBall`], a breadth-first arena for a
//! ball of the tree.

pub mod bounds;
pub mod error;
pub mod percolation;
pub mod rng;
pub mod selftest;
pub mod spectral;
pub mod stats;
pub mod tree;
pub mod walks;

pub use error::{Error, Result};
pub use percolation::{ClusterGraph, PercolationConfig, WitnessSet};
pub use rng::{McPlan, StreamRng};
pub use spectral::{KilledOperator, ShiftProfile, SpectralReport};
pub use tree::{SubtreeMask, TreeBall};
pub use walks::{EstimateMethod, ReturnProbEstimate};

/// `b = d - 1`, the forward branching number.
#[inline]
pub fn branching(d: u32) -> u32 {
    d - 1
}

/// Spectral radius `2 sqrt(d-1) / d` of simple random walk on the `d`-regular tree.
#[inline]
pub fn rho(d: u32) -> f64 {
    2.0 * f64::from(d - 1).sqrt() / f64::from(d)
}

/// Every library operation, by name. The CLI keeps a registry mapping each
/// of these to exactly one subcommand.
pub const OPERATIONS: &[&str] = &[
    "build_ball",
    "forward_subtree",
    "ball_count",
    "descendant_counts",
    "sample_config",
    "extract_cluster",
    "sphere_counts",
    "dense_ball_probability",
    "witness_set",
    "assemble_killed",
    "top_eigen",
    "trap_spectrum",
    "eigen_count_above",
    "shift_profile",
    "sparse_ball_certificate",
    "calibrate_numerical_radius",
    "exact_return_prob",
    "mc_return_prob",
    "chain_sim",
    "walk_range_census",
    "trap_bound",
    "optimize_trap_r",
    "correction_curve",
    "upper_split",
    "spectral_tail_estimate",
    "witness_rank_experiment",
    "selftest",
];

pub(crate) fn check_degree(d: u32) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter {
            name: "d",
            message: format!("degree must be at least 3, got {d}"),
        });
    }
    Ok(())
}
