//! Closed-form bounds and the experiments that test them.
//!
//! All probabilities are carried as natural logarithms: the trap cost
//! `2^{-3b^{r+1}}` underflows a double already at `b = 2, r = 9`.

pub mod correction;
pub mod trap;
pub mod upper;
pub mod witness;

pub use correction::{
    correction_curve, correction_functional, kappa, target_constant, CorrectionOptions,
    CorrectionPoint, CorrectionSource,
};
pub use trap::{optimize_trap_r, prescribed_trap_depth, trap_bound, TrapBound, TrapOptimum};
pub use upper::{
    delta_n, hypothesized_log_tail, spectral_tail_estimate, upper_split, TailEstimate, UpperSplit,
};
pub use witness::{witness_rank_experiment, WitnessReport, WitnessRow};
