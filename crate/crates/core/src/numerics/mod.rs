//! Special functions and quadrature primitives shared by the link model.

mod bessel;
mod laguerre;
mod quadrature;

pub use bessel::{bessel_j, bessel_j_sequence};
pub use bessel::MAX_ORDER as BESSEL_MAX_ORDER;
pub use laguerre::{laguerre, Laguerre, MAX_ORDER as LAGUERRE_MAX_ORDER};
pub use quadrature::{gauss_legendre, periodic_trapezoid, QuadratureRule};

pub(crate) use laguerre::factorial;

/// Upper tail of the standard normal, `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}
