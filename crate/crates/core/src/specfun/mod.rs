//! Special functions for partial-wave work: spherical Bessel/Neumann/Hankel
//! functions, Legendre polynomials, spherical harmonics, Gaunt coefficients
//! and angular quadrature.

pub mod angular;
pub mod bessel;
pub mod gaunt;
pub mod harmonics;

pub use angular::AngularGrid;
pub use bessel::{
    bessel_j, bessel_j_array, bessel_y, bessel_y_array, hankel_plus, hankel_plus_array,
    L_MAX_SUPPORTED,
};
pub use gaunt::{gaunt, Wigner};
pub use harmonics::{legendre, legendre_all, lm_index, ylm, ylm_all};
