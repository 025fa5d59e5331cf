//! Spectra of killed transition operators on finite subtrees and clusters.
//!
//! On a forest the killed operator `P = A / d` is a weighted tree matrix, so
//! eigenvalue counts follow from a fill-in-free leaf-to-root elimination
//! ([`eigen_count_above`]), spectra are symmetric under negation, and the
//! top eigenvalue of each connected component is simple.

mod calibration;
mod certificate;
mod eigen;
mod inertia;
mod operator;
mod shift;
mod trap;

pub use calibration::{
    calibrate_numerical_radius, calibration_frontier, CalibrationRow, FrontierPoint, MaskFamily,
};
pub use certificate::{sparse_ball_certificate, sparse_ball_radius, SparseBallCertificate};
pub use eigen::{
    dense_eigen, dense_eigenvalues, lanczos_top, top_eigen, top_eigen_default, EigenMethod, EigenPair,
    LanczosOptions, SpectralReport, DEFAULT_TOL, DENSE_LIMIT,
};
pub use inertia::{eigen_count_above, two_sided_count, EigenCount, TIE_EPSILON};
pub use operator::KilledOperator;
pub use shift::{shift_profile, RootedShift, ShiftProfile, DEFAULT_THETA_GRID};
pub use trap::{radial_trap_vector, trap_eigenvalue, trap_root_mass, trap_spectrum, TrapSpectrum};
