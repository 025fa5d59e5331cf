use super::eigen::{top_eigen_default, SpectralReport};
use super::operator::KilledOperator;
use crate::error::{Error, Result};
use crate::tree::{ball_count, SubtreeMask, Vertex};

/// Both sides of the sparse-ball estimate for one subtree. The implication
/// itself is never asserted here.
#[derive(Clone, Debug)]
pub struct SparseBallCertificate {
    pub r: u32,
    pub a: f64,
    pub delta: f64,
    pub n_vertices: usize,
    /// `max_v |T ∩ B(v, r)|` and a vertex attaining it.
    pub max_ball_count: usize,
    pub argmax: Vertex,
    /// `max_ball_count / b^r`.
    pub max_ball_density: f64,
    pub top: SpectralReport,
    /// `ρ_d (1 - δ)`.
    pub threshold: f64,
    /// `max_ball_count < a b^r`.
    pub hypothesis: bool,
    /// `sup σ(P_T) < ρ_d (1 - δ)`.
    pub conclusion: bool,
}

/// `r_δ = ⌊(π/√2 - η) / √δ⌋`.
pub fn sparse_ball_radius(delta: f64, eta: f64) -> u32 {
    ((std::f64::consts::PI / 2f64.sqrt() - eta) / delta.sqrt())
        .floor()
        .max(0.0) as u32
}

pub fn sparse_ball_certificate(
    mask: &SubtreeMask,
    delta: f64,
    r: u32,
    a: f64,
) -> Result<SparseBallCertificate> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("delta must lie in [0, 1), got {delta}"),
        });
    }
    let mut max_ball_count = 0;
    let mut argmax = mask.root();
    for &v in mask.order() {
        let c = ball_count(mask, v, r)?;
        if c > max_ball_count {
            max_ball_count = c;
            argmax = v;
        }
    }
    let b = f64::from(mask.ball().branching());
    let br = b.powi(r as i32);
    let top = top_eigen_default(&KilledOperator::from_mask(mask))?;
    let threshold = crate::rho(mask.ball().degree()) * (1.0 - delta);
    Ok(SparseBallCertificate {
        r,
        a,
        delta,
        n_vertices: mask.len(),
        max_ball_count,
        argmax,
        max_ball_density: max_ball_count as f64 / br,
        hypothesis: (max_ball_count as f64) < a * br,
        conclusion: top.top_eigenvalue < threshold,
        threshold,
        top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_ball, forward_subtree};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn full_forward_tree_is_dense() {
        let ball = Arc::new(build_ball(3, 6).unwrap());
        let mask = forward_subtree(&ball, 3).unwrap();
        let c = sparse_ball_certificate(&mask, 0.05, 3, 0.99).unwrap();
        assert!(c.max_ball_density >= 1.0);
        assert!(!c.hypothesis);
    }

    #[test]
    fn path_closed_forms() {
        let ball = Arc::new(build_ball(3, 12).unwrap());
        let n = 7;
        let path = SubtreeMask::path(ball, n).unwrap();
        let r = 2;
        let c = sparse_ball_certificate(&path, 0.05, r, 2.0).unwrap();
        assert_eq!(c.max_ball_count, 2 * r as usize + 1);
        assert!((c.max_ball_density - 5.0 / 4.0).abs() < 1e-15);
        let eig = (2.0 / 3.0) * (PI / (n as f64 + 1.0)).cos();
        assert!((c.top.top_eigenvalue - eig).abs() < 1e-12);
        assert!(c.hypothesis && c.conclusion);
    }

    #[test]
    fn trap_at_its_own_radius_is_dense() {
        let r = 3;
        let ball = Arc::new(build_ball(3, 2 * r).unwrap());
        let trap = forward_subtree(&ball, r).unwrap();
        // |B_r ∩ B(o, r)| = (b^{r+1} - 1)/(b - 1) = 15 against b^r = 8
        let at_density = sparse_ball_certificate(&trap, 0.01, r, 15.0 / 8.0).unwrap();
        assert_eq!(at_density.max_ball_count, 15);
        assert!(!at_density.hypothesis);
        let loose = sparse_ball_certificate(&trap, 0.01, r, 2.0).unwrap();
        assert!(loose.hypothesis);
    }

    #[test]
    fn refuses_without_margin() {
        let ball = Arc::new(build_ball(3, 3).unwrap());
        let trap = forward_subtree(&ball, 3).unwrap();
        assert!(matches!(
            sparse_ball_certificate(&trap, 0.1, 2, 1.0),
            Err(Error::InsufficientMargin { .. })
        ));
    }

    #[test]
    fn radius_formula() {
        assert_eq!(sparse_ball_radius(0.01, 0.0), 22);
        assert_eq!(sparse_ball_radius(0.25, 0.5), 3);
    }
}
