//! Numerical building blocks for two- and few-center quantum scattering.
//!
//! The crate computes phase shifts, off-shell partial-wave t-matrices,
//! free-resolvent kernels and structure constants, and assembles them into
//! multiple-scattering matrix elements such as
//! `<k1| t_j R0 t_h |k2>` evaluated both by direct momentum-space quadrature
//! and by the on-shell structure-constant sum.
//!
//! Units follow `hbar^2 / 2m = 1`, so the free Hamiltonian is `p^2` and the
//! on-shell energy is `E = k0^2`. Plane waves are normalized as
//! `<x|k> = (2 pi)^{-3/2} exp(i k.x)`.
//!
//! The crate is `no_std` and only needs `alloc`; all IO lives in the
//! companion `onshell` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod greens;
pub mod linalg;
pub mod lippmann;
pub mod multiscatter;
pub mod potentials;
pub mod quadrature;
pub mod radial;
pub mod specfun;
pub mod vec3;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use vec3::Vec3;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
