//! The rooted weighted shift of a subtree.
//!
//! Root the subtree so that every vertex has at most `b` children and
//! weight vertex `x` by `m(x) = b^{-|x|}`. The shift `(S g)(x) = g(parent x)`
//! is a contraction on `ℓ²(T, m)`, and `A_T` is unitarily equivalent to
//! `√b (S + S*)`. In the unweighted basis `h = m^{1/2} g` the shift is
//! `b^{-1/2}` times the parent-to-child incidence, which is what
//! [`RootedShift`] stores.

use std::f64::consts::PI;

use faer::Mat;
use rand::Rng;

use super::eigen::{lanczos_top, top_eigen, LanczosOptions, SpectralReport, DEFAULT_TOL};
use super::operator::KilledOperator;
use crate::error::Result;
use crate::rng::StreamRng;
use crate::tree::{descendant_profile, SubtreeMask, Vertex};

pub const DEFAULT_THETA_GRID: usize = 1024;

/// Shift in local breadth-first indices of a rooted mask.
#[derive(Clone, Debug)]
pub struct RootedShift {
    parent: Vec<Option<usize>>,
    children_offsets: Vec<usize>,
    children: Vec<usize>,
    scale: f64,
}

impl RootedShift {
    pub fn new(mask: &SubtreeMask) -> Self {
        let order = mask.order();
        let mut local = vec![usize::MAX; mask.ball().len()];
        for (i, &v) in order.iter().enumerate() {
            local[v] = i;
        }
        let parent: Vec<Option<usize>> = order
            .iter()
            .map(|&v| mask.mask_parent(v).map(|p| local[p]))
            .collect();
        let mut children_offsets = vec![0];
        let mut children = Vec::new();
        for &v in order {
            children.extend(mask.mask_children(v).map(|c| local[c]));
            children_offsets.push(children.len());
        }
        let b = f64::from(mask.ball().branching());
        Self {
            parent,
            children_offsets,
            children,
            scale: 1.0 / b.sqrt(),
        }
    }

    pub fn dim(&self) -> usize {
        self.parent.len()
    }

    fn kids(&self, i: usize) -> &[usize] {
        &self.children[self.children_offsets[i]..self.children_offsets[i + 1]]
    }

    /// `y = Ŝ x`: each vertex receives its parent's value.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.parent[i].map_or(0.0, |p| self.scale * x[p]);
        }
    }

    /// `y = Ŝᵀ x`: each vertex collects its children.
    pub fn apply_adjoint(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.scale * self.kids(i).iter().map(|&c| x[c]).sum::<f64>();
        }
    }

    /// Real embedding of `H_θ = e^{iθ}Ŝ + e^{-iθ}Ŝᵀ`: with `X = cos θ (Ŝ + Ŝᵀ)`
    /// and `Y = sin θ (Ŝ - Ŝᵀ)`, the block matrix `[[X, -Y], [Y, X]]` acting
    /// on `[u; v]` has the spectrum of `H_θ` with every eigenvalue doubled.
    pub fn apply_gauge_embedding(&self, theta: f64, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        let (c, s) = (theta.cos(), theta.sin());
        let (u, v) = x.split_at(n);
        let mut su = vec![0.0; n];
        let mut stu = vec![0.0; n];
        let mut sv = vec![0.0; n];
        let mut stv = vec![0.0; n];
        self.apply(u, &mut su);
        self.apply_adjoint(u, &mut stu);
        self.apply(v, &mut sv);
        self.apply_adjoint(v, &mut stv);
        let (top, bottom) = y.split_at_mut(n);
        for i in 0..n {
            let xu = c * (su[i] + stu[i]);
            let yu = s * (su[i] - stu[i]);
            let xv = c * (sv[i] + stv[i]);
            let yv = s * (sv[i] - stv[i]);
            top[i] = xu - yv;
            bottom[i] = yu + xv;
        }
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                m[(i, *p)] = self.scale;
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct ShiftProfile {
    /// Root used for the shift (ambient index).
    pub root: Vertex,
    pub b: u32,
    /// `‖S^k‖² = max_x D_k(x) / b^k` for `k = 0..=K`.
    pub norms_sq: Vec<f64>,
    /// `w(S) = ‖A_T‖ / (2√b)` through the gauge identity.
    pub numerical_radius: f64,
    /// Top eigenpair of `P_T` behind `numerical_radius`.
    pub top: SpectralReport,
    pub sweep_thetas: Vec<f64>,
    /// `λ_max(e^{iθ}S + e^{-iθ}S*)` on the grid.
    pub sweep_values: Vec<f64>,
}

impl ShiftProfile {
    /// Half the largest swept eigenvalue: the direct numerical-radius estimate.
    pub fn sweep_radius(&self) -> Option<f64> {
        self.sweep_values
            .iter()
            .copied()
            .reduce(f64::max)
            .map(|m| m / 2.0)
    }

    /// Max minus min of the swept eigenvalues.
    pub fn sweep_spread(&self) -> Option<f64> {
        let max = self.sweep_values.iter().copied().reduce(f64::max)?;
        let min = self.sweep_values.iter().copied().reduce(f64::min)?;
        Some(max - min)
    }

    pub fn norm(&self, k: usize) -> f64 {
        self.norms_sq[k].sqrt()
    }
}

/// Shift norms for `k <= k_max`, the numerical radius through the gauge
/// identity, and (for `theta_grid > 0`) the direct sweep of
/// `λ_max(e^{iθ}S + e^{-iθ}S*)` over `θ = 2πi / theta_grid`.
///
/// The mask is rerooted at [`SubtreeMask::shift_root`] first.
pub fn shift_profile(mask: &SubtreeMask, k_max: u32, theta_grid: usize) -> Result<ShiftProfile> {
    let root = mask.shift_root();
    let rooted = if root == mask.root() {
        mask.clone()
    } else {
        mask.rerooted(root)?
    };
    let b = rooted.ball().branching();
    let profile = descendant_profile(&rooted, k_max);
    let norms_sq = profile
        .iter()
        .enumerate()
        .map(|(k, dk)| {
            let max = rooted.order().iter().map(|&v| dk[v]).max().unwrap_or(0);
            max as f64 / f64::from(b).powi(k as i32)
        })
        .collect();

    let op = KilledOperator::from_mask(&rooted);
    let top = top_eigen(&op, DEFAULT_TOL, LanczosOptions::default().max_matvecs)?;
    let d = f64::from(rooted.ball().degree());
    let numerical_radius = d * top.top_eigenvalue / (2.0 * f64::from(b).sqrt());

    let shift = RootedShift::new(&rooted);
    let n = shift.dim();
    let mut sweep_thetas = Vec::with_capacity(theta_grid);
    let mut sweep_values = Vec::with_capacity(theta_grid);
    let opts = LanczosOptions {
        tol: 1e-11,
        max_matvecs: 50_000,
        basis: 60,
    };
    let mut rng = StreamRng::new(0x5eed_0f_5b1f7, 0);
    let noise: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut start = noise.clone();
    for i in 0..theta_grid {
        let theta = 2.0 * PI * i as f64 / theta_grid as f64;
        let pair = lanczos_top(
            2 * n,
            |x, y| shift.apply_gauge_embedding(theta, x, y),
            start,
            opts,
        )?;
        sweep_thetas.push(theta);
        sweep_values.push(pair.value);
        // warm start from the neighboring angle, with a little noise so the
        // doubled eigenspace is not missed
        start = pair
            .vector
            .iter()
            .zip(&noise)
            .map(|(v, e)| v + 1e-3 * e)
            .collect();
    }

    Ok(ShiftProfile {
        root,
        b,
        norms_sq,
        numerical_radius,
        top,
        sweep_thetas,
        sweep_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_ball, forward_subtree};
    use std::sync::Arc;

    #[test]
    fn full_forward_tree_has_unit_powers() {
        let ball = Arc::new(build_ball(3, 6).unwrap());
        let mask = forward_subtree(&ball, 6).unwrap();
        let p = shift_profile(&mask, 3, 0).unwrap();
        // x at depth <= 3 has the full b^3 descendants
        assert!(p.norms_sq.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn path_powers_decay() {
        let ball = Arc::new(build_ball(3, 6).unwrap());
        let path = SubtreeMask::path(ball, 6).unwrap();
        let p = shift_profile(&path, 3, 0).unwrap();
        assert!((p.norms_sq[3] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn two_vertex_path_radius() {
        let ball = Arc::new(build_ball(3, 1).unwrap());
        let path = SubtreeMask::path(ball, 2).unwrap();
        let p = shift_profile(&path, 1, 16).unwrap();
        let want = (PI / 3.0).cos() / 2f64.sqrt();
        assert!((p.numerical_radius - want).abs() < 1e-12);
        assert!((p.sweep_radius().unwrap() - want).abs() < 1e-9);
        assert!(p.sweep_spread().unwrap() < 1e-9);
    }

    #[test]
    fn embedding_is_symmetric() {
        let ball = Arc::new(build_ball(3, 3).unwrap());
        let mask = forward_subtree(&ball, 3).unwrap();
        let s = RootedShift::new(&mask);
        let n = 2 * s.dim();
        let mut m = Mat::<f64>::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            s.apply_gauge_embedding(0.7, &e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        assert!((&m - m.transpose()).norm_max() < 1e-15);
    }
}
