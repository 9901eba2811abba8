//! Special-function and numerical-analysis kernels shared by the physics modules.

mod diff;
mod poly;
mod quadrature;

pub use diff::{nth_derivative, nth_log_derivative, Derivative, FiniteDifferenceScheme, StencilKind};
pub use poly::{double_factorial, hermite_poly, legendre_poly};
pub use quadrature::{integrate_2d_adaptive, QuadratureKind, QuadratureRule};
