//! Numerical building blocks shared by the physics modules.

mod eigen;
mod fit;
mod quadrature;
mod root;

pub use eigen::{eig_hermitian, ComplexMatrix, EigenSystem};
pub use fit::{fit_loglog, FitResult};
pub use quadrature::integrate_closed;
pub use root::solve_scalar;

pub use num_complex::Complex64;

/// Relative tolerance with a unit absolute floor: `tol * (1 + scale)`.
#[inline]
pub(crate) fn floored(tol: f64, scale: f64) -> f64 {
    tol * (1.0 + scale.abs())
}
