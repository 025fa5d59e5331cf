//! Return probabilities of the switch–walk–switch lamplighter walk.
//!
//! With lamp parameter 1/2, a closed base walk `γ` of length `m` contributes
//! `d^{-m} 2^{-|range γ|}`, which is also `E⟨δ_o, P_ω^m δ_o⟩` for Bernoulli(1/2)
//! site percolation. [`exact`] sums the walks, [`mc`] averages the percolation
//! moment and [`chain`] runs the lamplighter chain itself.

pub mod chain;
pub mod exact;
pub mod mc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

pub use chain::{chain_sim, LamplighterState};
pub use exact::{exact_return_prob, walk_range_census, WalkBudget, DEFAULT_NODE_BUDGET};
pub use mc::{mc_return_prob, percolation_moment};
pub use exact::census_probability;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    ExactWalkSum,
    PercolationMc,
    ChainSim,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::ExactWalkSum => "exact-walk-sum",
            EstimateMethod::PercolationMc => "percolation-mc",
            EstimateMethod::ChainSim => "chain-sim",
        }
    }
}

/// `p_{2n}(e, e)` from one of the three engines.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnProbEstimate {
    pub d: u32,
    /// Half the walk length.
    pub n: u32,
    pub value: f64,
    /// Natural log of `value`, computed without underflow for the exact method.
    pub log_value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
    pub samples: u64,
    pub seed: Option<u64>,
    /// Exact rational value (exact method only).
    pub exact: Option<BigRational>,
    /// Wilson interval (chain simulation only).
    pub ci: Option<(f64, f64)>,
}

impl ReturnProbEstimate {
    /// `|value - other| / sqrt(se² + se_other²)`, infinite when both are exact and differ.
    pub fn z_distance(&self, other: &ReturnProbEstimate) -> f64 {
        let diff = (self.value - other.value).abs();
        let se = self.std_error.hypot(other.std_error);
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational (`-inf` at zero).
pub fn ln_rational(q: &BigRational) -> f64 {
    if q.numer().sign() == num_bigint::Sign::NoSign {
        return f64::NEG_INFINITY;
    }
    let num = q.numer().abs().to_biguint().expect("nonnegative");
    let den = q.denom().abs().to_biguint().expect("nonnegative");
    ln_biguint(&num) - ln_biguint(&den)
}
