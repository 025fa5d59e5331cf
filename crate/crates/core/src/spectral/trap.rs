//! Radial spectrum of the forward trap `B_r`.
//!
//! On radial functions of `B_r` the adjacency operator acts as
//! `(A f)_j = f_{j-1} + b f_{j+1}`. With `g_j = b^{j/2} f_j` this becomes a
//! symmetric tridiagonal matrix with zero diagonal and off-diagonal `√b`, so
//! the killed operator restricted to radial functions is the
//! `(r + 1) × (r + 1)` tridiagonal with off-diagonal `√b / d`.

use std::f64::consts::PI;

use faer::Mat;

use super::eigen::dense_eigen;

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct TrapSpectrum {
    pub d: u32,
    pub r: u32,
    /// Radial eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Root weight `g_0²` of each normalized radial eigenvector, same order.
    pub root_masses: Vec<f64>,
}

/// `ρ_d cos(kπ / (r + 2))`, `1 <= k <= r + 1`.
pub fn trap_eigenvalue(d: u32, r: u32, k: u32) -> f64 {
    crate::rho(d) * (f64::from(k) * PI / f64::from(r + 2)).cos()
}

/// `2 sin²(kπ / (r + 2)) / (r + 2)`.
pub fn trap_root_mass(r: u32, k: u32) -> f64 {
    let s = (f64::from(k) * PI / f64::from(r + 2)).sin();
    2.0 * s * s / f64::from(r + 2)
}

/// Level values `u_j = b^{-j/2} sin((j + 1)θ)`, `θ = π / (r + 2)`, of the
/// positive radial eigenvector of `A_{B_r}`.
pub fn radial_trap_vector(d: u32, r: u32) -> Vec<f64> {
    let b = f64::from(d - 1);
    let theta = PI / f64::from(r + 2);
    (0..=r)
        .map(|j| b.powf(-f64::from(j) / 2.0) * (f64::from(j + 1) * theta).sin())
        .collect()
}

/// Full radial spectrum by a numerical eigensolve of the reduced tridiagonal.
pub fn trap_spectrum(d: u32, r: u32) -> Result<TrapSpectrum> {
    crate::check_degree(d)?;
    let n = r as usize + 1;
    let off = f64::from(d - 1).sqrt() / f64::from(d);
    let t = Mat::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { off } else { 0.0 });
    let (values, vectors) = dense_eigen(&t);
    Ok(TrapSpectrum {
        d,
        r,
        eigenvalues: values.iter().rev().copied().collect(),
        root_masses: (0..n).rev().map(|i| vectors[(0, i)].powi(2)).collect(),
    })
}
