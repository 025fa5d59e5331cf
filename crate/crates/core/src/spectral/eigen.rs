use faer::{Mat, Side};
use rand::Rng;

use super::operator::KilledOperator;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Components up to this size are solved densely.
pub const DENSE_LIMIT: usize = 400;

/// Default residual tolerance `‖P v - λ v‖ / ‖v‖`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Seed of the fixed pseudo-random Lanczos start vectors.
const START_SEED: u64 = 0x1a9c_7e11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMethod {
    /// Single vertex or edgeless component.
    Trivial,
    Dense,
    Lanczos,
}

impl EigenMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EigenMethod::Trivial => "trivial",
            EigenMethod::Dense => "dense",
            EigenMethod::Lanczos => "lanczos",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub dimension: usize,
    pub top_eigenvalue: f64,
    /// Top eigenvector in local operator indices, unit norm, positive at its
    /// largest entry.
    pub vector: Vec<f64>,
    /// `|<δ_root, v>|²` when the root is a member.
    pub root_mass: Option<f64>,
    pub residual: f64,
    /// Matrix-vector products (Lanczos) or 1 for a dense solve.
    pub iterations: usize,
    pub method: EigenMethod,
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_matvecs: usize,
    /// Krylov basis size before an explicit restart.
    pub basis: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_matvecs: 20_000,
            basis: 80,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn dense_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigensolve converges");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues and unit eigenvectors (as columns) of a dense
/// symmetric matrix.
pub fn dense_eigen(m: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigensolve converges");
    let n = m.nrows();
    let values = (0..n).map(|i| evd.S()[i]).collect();
    (values, evd.U().to_owned())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Largest eigenpair of a symmetric operator given by `matvec`, by Lanczos
/// with full reorthogonalization and explicit restarts from the current
/// Ritz vector.
///
/// Lanczos is invariant under `P -> P + c I`, so the `±λ` pairing of
/// bipartite spectra needs no shift here: the Ritz values approximate the top
/// of the spectrum directly.
pub fn lanczos_top<F>(n: usize, mut matvec: F, start: Vec<f64>, opts: LanczosOptions) -> Result<EigenPair>
where
    F: FnMut(&[f64], &mut [f64]),
{
    assert_eq!(start.len(), n);
    let m_max = opts.basis.clamp(1, n.max(1));
    let mut x = start;
    let nx = norm(&x);
    assert!(nx > 0.0, "start vector must be nonzero");
    scale(&mut x, 1.0 / nx);
    let mut w = vec![0.0; n];
    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;

    loop {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut spread = 0.0f64;
        for j in 0..m_max {
            matvec(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            spread = spread.max(a.abs()).max(beta.last().copied().unwrap_or(0.0));
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    axpy(-c, q, &mut w);
                }
            }
            let b = norm(&w);
            if j + 1 == m_max || b <= 1e-14 * spread.max(f64::MIN_POSITIVE) {
                break;
            }
            beta.push(b);
            let mut next = w.clone();
            scale(&mut next, 1.0 / b);
            basis.push(next);
        }

        let k = alpha.len();
        let t = Mat::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let (_, vectors) = dense_eigen(&t);
        let top = k - 1;
        x.iter_mut().for_each(|v| *v = 0.0);
        for (i, q) in basis.iter().enumerate() {
            axpy(vectors[(i, top)], q, &mut x);
        }
        let nx = norm(&x);
        scale(&mut x, 1.0 / nx);

        matvec(&x, &mut w);
        matvecs += 1;
        let rayleigh = dot(&x, &w);
        axpy(-rayleigh, &x, &mut w);
        let residual = norm(&w);
        best_residual = best_residual.min(residual);
        if residual <= opts.tol {
            return Ok(EigenPair {
                value: rayleigh,
                vector: x,
                residual,
                matvecs,
            });
        }
        if matvecs >= opts.max_matvecs {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: best_residual,
            });
        }
    }
}

fn random_start(n: usize, salt: u64) -> Vec<f64> {
    let mut rng = StreamRng::new(START_SEED, salt);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn orient(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if pivot < 0.0 {
        scale(v, -1.0);
    }
}

/// Top eigenpair of a killed operator, solved per connected component.
///
/// Components of at most [`DENSE_LIMIT`] vertices use a dense symmetric
/// eigensolve; larger ones use [`lanczos_top`] with residual tolerance `tol`.
/// Among components whose top eigenvalues tie to `1e-12`, the one holding
/// the root wins, so `root_mass` is the root's weight in that eigenvector.
pub fn top_eigen(op: &KilledOperator, tol: f64, max_iter: usize) -> Result<SpectralReport> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    let root_component = op.root().and_then(|r| op.components().position(|c| c.contains(&r)));

    let mut best: Option<(f64, usize, Vec<f64>, usize, EigenMethod)> = None;
    for (ci, range) in op.components().enumerate() {
        let size = range.len();
        let (value, vector, iterations, method) = if size == 1 {
            (0.0, vec![1.0], 0, EigenMethod::Trivial)
        } else if size <= DENSE_LIMIT {
            let (values, vectors) = dense_eigen(&op.component_dense(&range));
            let v: Vec<f64> = (0..size).map(|i| vectors[(i, size - 1)]).collect();
            (values[size - 1], v, 1, EigenMethod::Dense)
        } else {
            let opts = LanczosOptions {
                tol,
                max_matvecs: max_iter,
                ..LanczosOptions::default()
            };
            let pair = lanczos_top(
                size,
                |x, y| op.apply_component(&range, x, y),
                random_start(size, ci as u64),
                opts,
            )?;
            (pair.value, pair.vector, pair.matvecs, EigenMethod::Lanczos)
        };
        let replace = match &best {
            None => true,
            Some((bv, bc, ..)) => {
                value > bv + 1e-12
                    || ((value - bv).abs() <= 1e-12
                        && Some(ci) == root_component
                        && Some(*bc) != root_component)
            }
        };
        if replace {
            best = Some((value, ci, vector, iterations, method));
        }
    }

    let (value, ci, comp_vec, iterations, method) = best.expect("at least one component");
    let range = op.components().nth(ci).expect("component index");
    let mut vector = vec![0.0; n];
    vector[range.clone()].copy_from_slice(&comp_vec);
    orient(&mut vector);
    let mut pv = vec![0.0; n];
    op.apply(&vector, &mut pv);
    axpy(-value, &vector, &mut pv);
    let residual = norm(&pv);
    if residual > tol && method != EigenMethod::Lanczos {
        // dense solves sit at machine precision; anything else is a bug upstream
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    let root_mass = op.root().map(|r| vector[r] * vector[r]);
    Ok(SpectralReport {
        dimension: n,
        top_eigenvalue: value,
        vector,
        root_mass,
        residual,
        iterations,
        method,
    })
}

pub fn top_eigen_default(op: &KilledOperator) -> Result<SpectralReport> {
    top_eigen(op, DEFAULT_TOL, LanczosOptions::default().max_matvecs)
}
