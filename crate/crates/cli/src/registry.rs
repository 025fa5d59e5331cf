//! Which subcommand reaches each library operation.

use crate::Command;

pub const SUBCOMMANDS: &[&str] = &[
    "exact",
    "mc",
    "chainsim",
    "trap",
    "optimize-trap",
    "spectrum",
    "shift",
    "certificate",
    "dense-prob",
    "witness-rank",
    "correction",
    "upper-split",
    "selftest",
];

pub const COMMANDS: &[Command] = &[
    Command::Exact,
    Command::Mc,
    Command::Chainsim,
    Command::Trap,
    Command::OptimizeTrap,
    Command::Spectrum,
    Command::Shift,
    Command::Certificate,
    Command::DenseProb,
    Command::WitnessRank,
    Command::Correction,
    Command::UpperSplit,
    Command::Selftest,
];

/// `(operation, subcommand)` for every entry of [`lamptree::OPERATIONS`].
pub const REGISTRY: &[(&str, &str)] = &[
    ("build_ball", "spectrum"),
    ("forward_subtree", "spectrum"),
    ("sample_config", "spectrum"),
    ("extract_cluster", "spectrum"),
    ("sphere_counts", "spectrum"),
    ("assemble_killed", "spectrum"),
    ("top_eigen", "spectrum"),
    ("eigen_count_above", "spectrum"),
    ("ball_count", "certificate"),
    ("descendant_counts", "certificate"),
    ("sparse_ball_certificate", "certificate"),
    ("dense_ball_probability", "dense-prob"),
    ("witness_set", "witness-rank"),
    ("witness_rank_experiment", "witness-rank"),
    ("trap_spectrum", "trap"),
    ("trap_bound", "trap"),
    ("optimize_trap_r", "optimize-trap"),
    ("shift_profile", "shift"),
    ("calibrate_numerical_radius", "shift"),
    ("exact_return_prob", "exact"),
    ("walk_range_census", "exact"),
    ("mc_return_prob", "mc"),
    ("chain_sim", "chainsim"),
    ("correction_curve", "correction"),
    ("upper_split", "upper-split"),
    ("spectral_tail_estimate", "upper-split"),
    ("selftest", "selftest"),
];

pub fn subcommand_for(operation: &str) -> Option<&'static str> {
    REGISTRY
        .iter()
        .find(|(op, _)| *op == operation)
        .map(|(_, s)| *s)
}
