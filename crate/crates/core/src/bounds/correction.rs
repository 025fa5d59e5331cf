//! The correction functional `L(n) = -ln(p_{2n} / ρ_d^{2n}) · ln² n / n`.

use std::f64::consts::{PI, SQRT_2};

use super::trap::optimize_trap_r;
use crate::error::{Error, Result};
use crate::rng::McPlan;
use crate::walks::{exact_return_prob, mc_return_prob, WalkBudget};

/// `κ_d = (π / √2) ln b`.
pub fn kappa(d: u32) -> f64 {
    PI / SQRT_2 * f64::from(d - 1).ln()
}

/// `π² (ln b)²`, the limit of `L(n)`.
pub fn target_constant(d: u32) -> f64 {
    let lb = f64::from(d - 1).ln();
    PI * PI * lb * lb
}

/// `L(n)` from `ln p_{2n}`.
pub fn correction_functional(d: u32, n: u64, log_p: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    -(log_p - 2.0 * nf * crate::rho(d).ln()) * ln_n * ln_n / nf
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorrectionSource {
    Exact,
    Mc,
    TrapBound,
    TheoremTarget,
}

impl CorrectionSource {
    pub const ALL: [CorrectionSource; 4] = [
        CorrectionSource::Exact,
        CorrectionSource::Mc,
        CorrectionSource::TrapBound,
        CorrectionSource::TheoremTarget,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CorrectionSource::Exact => "exact",
            CorrectionSource::Mc => "mc",
            CorrectionSource::TrapBound => "trap-bound",
            CorrectionSource::TheoremTarget => "theorem-target",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionPoint {
    pub n: u64,
    pub source: CorrectionSource,
    /// `None` when the estimate is zero (censored Monte Carlo cell).
    pub l: Option<f64>,
    /// `ln p̂_{2n}`; `-inf` when censored.
    pub log_value: f64,
}

impl CorrectionPoint {
    pub fn censored(&self) -> bool {
        self.l.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionOptions {
    pub budget: WalkBudget,
    pub plan: McPlan,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self {
            budget: WalkBudget::default(),
            plan: McPlan::new(100_000, 0),
        }
    }
}

/// `L(n)` for every `(n, source)` pair, in source-major order.
pub fn correction_curve(
    d: u32,
    n_list: &[u64],
    sources: &[CorrectionSource],
    opts: &CorrectionOptions,
) -> Result<Vec<CorrectionPoint>> {
    crate::check_degree(d)?;
    let mut out = Vec::new();
    for &source in sources {
        for &n in n_list {
            if n < 2 {
                return Err(Error::InvalidParameter {
                    name: "n",
                    message: format!("the correction functional needs n >= 2, got {n}"),
                });
            }
            let log_value = match source {
                CorrectionSource::Exact | CorrectionSource::Mc => {
                    let half = u32::try_from(n).map_err(|_| Error::InvalidParameter {
                        name: "n",
                        message: format!("{n} is out of range for walk engines"),
                    })?;
                    if source == CorrectionSource::Exact {
                        exact_return_prob(d, half, opts.budget)?.log_value
                    } else {
                        mc_return_prob(d, half, &opts.plan)?.log_value
                    }
                }
                CorrectionSource::TrapBound => optimize_trap_r(d, n)?.bound.log_value,
                CorrectionSource::TheoremTarget => {
                    let nf = n as f64;
                    let ln_n = nf.ln();
                    2.0 * nf * crate::rho(d).ln() - target_constant(d) * nf / (ln_n * ln_n)
                }
            };
            let l = log_value
                .is_finite()
                .then(|| correction_functional(d, n, log_value));
            out.push(CorrectionPoint {
                n,
                source,
                l,
                log_value,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_identity() {
        for d in 3..=10 {
            let k = kappa(d);
            let t = target_constant(d);
            assert!((2.0 * k * k - t).abs() <= 4.0 * f64::EPSILON * t);
        }
        assert!((target_constant(3) - 4.741_881_18).abs() < 1e-8);
    }

    #[test]
    fn target_source_returns_target() {
        let pts =
            correction_curve(3, &[100, 10_000], &[CorrectionSource::TheoremTarget], &Default::default())
                .unwrap();
        for p in pts {
            assert!((p.l.unwrap() - target_constant(3)).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_point_at_four() {
        let pts = correction_curve(3, &[4], &[CorrectionSource::Exact], &Default::default()).unwrap();
        let p8 = exact_return_prob(3, 4, WalkBudget::default()).unwrap();
        let want = -(p8.value / crate::rho(3).powi(8)).ln() * 4f64.ln().powi(2) / 4.0;
        assert!((pts[0].l.unwrap() - want).abs() < 1e-12);
        assert!(want >= 0.0);
    }

    #[test]
    fn zero_mc_estimate_is_censored() {
        let opts = CorrectionOptions {
            budget: WalkBudget::default(),
            plan: McPlan::new(1, 3),
        };
        // one sample: either the root is closed (censored) or a finite value
        let pts = correction_curve(3, &[2], &[CorrectionSource::Mc], &opts).unwrap();
        assert_eq!(pts[0].censored(), pts[0].log_value == f64::NEG_INFINITY);
    }
}
