use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// `8 (r+2)^{-3} · 2^{-3 b^{r+1}} · (ρ_d cos(π/(r+2)))^{2n}`, a lower bound
/// for `p_{2n}(e, e)`, with its three factors kept apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapBound {
    pub d: u32,
    pub r: u32,
    pub n: u64,
    /// `ln 8 - 3 ln(r + 2)`.
    pub log_prefactor: f64,
    /// `-3 b^{r+1} ln 2`.
    pub log_trap_cost: f64,
    /// `2n ln(ρ_d cos(π/(r+2)))`.
    pub log_spectral: f64,
    pub log_value: f64,
}

impl TrapBound {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

pub fn trap_bound(d: u32, r: u32, n: u64) -> Result<TrapBound> {
    crate::check_degree(d)?;
    if r < 1 {
        return Err(Error::InvalidParameter {
            name: "r",
            message: "trap depth must be at least 1".into(),
        });
    }
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            message: "walk half-length must be at least 1".into(),
        });
    }
    let b = f64::from(d - 1);
    let rf = f64::from(r);
    let log_prefactor = 8f64.ln() - 3.0 * (rf + 2.0).ln();
    let log_trap_cost = -3.0 * b.powf(rf + 1.0) * LN_2;
    let lambda = crate::rho(d) * (PI / (rf + 2.0)).cos();
    let log_spectral = 2.0 * n as f64 * lambda.ln();
    Ok(TrapBound {
        d,
        r,
        n,
        log_prefactor,
        log_trap_cost,
        log_spectral,
        log_value: log_prefactor + log_trap_cost + log_spectral,
    })
}

/// `⌊log_b n - 3 log_b ln n⌋`, possibly below 1 for small `n`.
pub fn prescribed_trap_depth(d: u32, n: u64) -> i64 {
    let lb = f64::from(d - 1).ln();
    let nf = n as f64;
    ((nf.ln() - 3.0 * nf.ln().ln()) / lb).floor() as i64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapOptimum {
    pub r_star: u32,
    pub bound: TrapBound,
    /// Largest depth scanned, `max(1, ⌈2 log_b n⌉)`.
    pub r_max: u32,
    pub prescribed_r: i64,
    /// Bound at the prescribed depth, when that depth is at least 1.
    pub prescribed: Option<TrapBound>,
}

/// Exhaustive maximization of the trap bound over `1 <= r <= ⌈2 log_b n⌉`.
pub fn optimize_trap_r(d: u32, n: u64) -> Result<TrapOptimum> {
    crate::check_degree(d)?;
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            message: format!("need n >= 2, got {n}"),
        });
    }
    let lb = f64::from(d - 1).ln();
    let r_max = ((2.0 * (n as f64).ln() / lb).ceil() as u32).max(1);
    let mut best = trap_bound(d, 1, n)?;
    for r in 2..=r_max {
        let t = trap_bound(d, r, n)?;
        if t.log_value > best.log_value {
            best = t;
        }
    }
    let prescribed_r = prescribed_trap_depth(d, n);
    let prescribed = if prescribed_r >= 1 {
        Some(trap_bound(d, prescribed_r as u32, n)?)
    } else {
        None
    };
    Ok(TrapOptimum {
        r_star: best.r,
        bound: best,
        r_max,
        prescribed_r,
        prescribed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_trap() {
        let t = trap_bound(3, 1, 1).unwrap();
        let want = 8.0 / 27.0 * 2f64.powi(-12) * (2.0 / 9.0);
        assert!((t.value() - want).abs() < 1e-12 * want);
        assert!((t.value() - 1.607e-5).abs() < 1e-8);
        assert!(t.value() <= 1.0 / 12.0);
    }

    #[test]
    fn log_form_survives_underflow() {
        let t = trap_bound(3, 12, 1_000_000_000_000).unwrap();
        assert!(t.log_value.is_finite());
        assert_eq!(t.value(), 0.0);
    }

    #[test]
    fn spectral_term_dominates() {
        let r = 3;
        let lambda = (crate::rho(4) * (PI / 5.0).cos()).ln();
        let t = trap_bound(4, r, 1 << 40).unwrap();
        assert!((t.log_value / (2.0 * (1u64 << 40) as f64) - lambda).abs() < 1e-10);
    }

    #[test]
    fn optimum_beats_prescribed_depth() {
        for n in [2, 10, 1000, 1_000_000, 1_000_000_000] {
            let o = optimize_trap_r(3, n).unwrap();
            assert!(o.r_star >= 1 && o.r_star <= o.r_max);
            if let Some(p) = o.prescribed {
                assert!(o.bound.log_value >= p.log_value);
            }
        }
        assert_eq!(prescribed_trap_depth(3, 1_000_000), 8);
    }
}
