//! Eigenvalue counting by Sylvester inertia on forests.
//!
//! For a tree matrix `M = P - E I`, eliminating leaves toward the root
//! creates no fill-in: the pivot of a vertex is its diagonal entry minus
//! `w² / pivot(c)` summed over its children. The number of positive pivots is
//! the number of eigenvalues above `E`.

use super::operator::KilledOperator;

/// Relative downward shift applied to the threshold so that eigenvalues
/// landing exactly on it are counted.
pub const TIE_EPSILON: f64 = 1e-12;

/// Replacement for an exactly zero pivot.
const ZERO_PIVOT: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenCount {
    /// `#{λ : λ > E'}` with `E'` the shifted threshold, i.e. eigenvalues `>= E`
    /// up to the tie tolerance.
    pub count: usize,
    /// Pivots that came out exactly zero and were perturbed.
    pub zero_pivots: usize,
    pub shifted_threshold: f64,
}

/// Number of eigenvalues `>= e`, counting ties within
/// `TIE_EPSILON · max(|e|, ‖P‖ bound)`.
pub fn eigen_count_above(op: &KilledOperator, e: f64) -> EigenCount {
    let b = f64::from(op.degree() - 1);
    let norm_bound = op.weight().abs() * 2.0 * b.sqrt();
    let shifted = e - TIE_EPSILON * e.abs().max(norm_bound);
    inertia_above(op, shifted)
}

/// Positive pivots of `P - t I`, with exact zero pivots nudged positive.
fn inertia_above(op: &KilledOperator, shifted: f64) -> EigenCount {
    let w2 = op.weight() * op.weight();
    let n = op.dim();
    let mut pivot = vec![-shifted; n];
    let mut zero_pivots = 0;
    let mut count = 0;
    for i in (0..n).rev() {
        if pivot[i] == 0.0 {
            pivot[i] = ZERO_PIVOT;
            zero_pivots += 1;
        }
        if pivot[i] > 0.0 {
            count += 1;
        }
        if let Some(p) = op.tree_parent(i) {
            pivot[p] -= w2 / pivot[i];
        }
    }
    EigenCount {
        count,
        zero_pivots,
        shifted_threshold: shifted,
    }
}

/// `#{|λ| >= e}` for `e > 0`, as the count above `e` for `P` and for `-P`.
pub fn two_sided_count(op: &KilledOperator, e: f64) -> usize {
    eigen_count_above(op, e).count + eigen_count_above(&op.negated(), e).count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dense_eigenvalues;
    use crate::tree::{build_ball, SubtreeMask};
    use std::sync::Arc;

    #[test]
    fn star_counts() {
        let ball = Arc::new(build_ball(3, 1).unwrap());
        let star = KilledOperator::from_mask(&SubtreeMask::full(ball));
        assert_eq!(eigen_count_above(&star, 0.5).count, 1);
        // zero eigenvalues sit exactly on E = 0
        assert_eq!(eigen_count_above(&star, 0.0).count, 3);
        assert_eq!(eigen_count_above(&star, crate::rho(3) + 1e-9).count, 0);
        assert_eq!(eigen_count_above(&star, -crate::rho(3)).count, 4);
        assert_eq!(two_sided_count(&star, 0.5), 2);
    }

    #[test]
    fn agrees_with_dense_on_full_ball() {
        let ball = Arc::new(build_ball(3, 4).unwrap());
        let op = KilledOperator::from_mask(&SubtreeMask::full(ball));
        let ev = dense_eigenvalues(&op.to_dense());
        for k in -20..=20 {
            let e = 0.045 * f64::from(k) + 0.0013;
            let want = ev.iter().filter(|&&l| l >= e).count();
            assert_eq!(eigen_count_above(&op, e).count, want, "E = {e}");
        }
    }

    #[test]
    fn exact_zero_pivot_is_flagged() {
        // path of 3 has eigenvalues ±√2/3 and 0; at t = 0 every leaf pivot is exactly 0
        let ball = Arc::new(build_ball(3, 2).unwrap());
        let path = KilledOperator::from_mask(&SubtreeMask::path(ball, 3).unwrap());
        let raw = inertia_above(&path, 0.0);
        assert!(raw.zero_pivots >= 1);
        assert_eq!(raw.count, 2);
        let res = eigen_count_above(&path, 0.0);
        assert_eq!(res.zero_pivots, 0);
        assert_eq!(res.count, 2);
    }
}
