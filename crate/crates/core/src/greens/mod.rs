//! Free resolvent, the two-center kernel `K~(z)` and structure constants.

mod schatten;
mod structconst;

pub use schatten::{
    schatten4_blocks, schatten4_kernel, schatten4_norm, GridOrders, KtildeDiscretization,
    SchattenEstimate, SchattenRoute, REFINEMENT_TOL,
};
pub use structconst::{lm_of, structure_constants, PointCheck, StructureConstantMatrix};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::potentials::Scatterer;
use crate::{Error, Result, Vec3, I};

/// Spectral parameter `z = k0^2 + i eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub k0: f64,
    pub eps: f64,
}

impl ComplexEnergy {
    pub fn new(k0: f64, eps: f64) -> Result<Self> {
        if !(k0 > 0.0) || !k0.is_finite() {
            return Err(Error::domain(
                "ComplexEnergy",
                alloc::format!("k0 = {k0} must be positive"),
            ));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::domain(
                "ComplexEnergy",
                alloc::format!("eps = {eps} must be nonnegative"),
            ));
        }
        Ok(Self { k0, eps })
    }

    /// The boundary value `k0^2 + i0`.
    pub fn on_shell(k0: f64) -> Result<Self> {
        Self::new(k0, 0.0)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.k0 * self.k0, self.eps)
    }

    pub fn energy(&self) -> f64 {
        self.k0 * self.k0
    }

    /// `sqrt(z)` on the sheet with `Im sqrt(z) >= 0`.
    pub fn sqrt_z(&self) -> Complex64 {
        let s = self.z().sqrt();
        if s.im < 0.0 {
            -s
        } else {
            s
        }
    }

    pub fn is_on_shell(&self) -> bool {
        self.eps == 0.0
    }
}

/// `<x|R0(z)|y> = -exp(i sqrt(z) r) / (4 pi r)`, `r = |x - y|`.
pub fn r0_kernel(z: &ComplexEnergy, x: Vec3, y: Vec3) -> Result<Complex64> {
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(Error::singular("r0_kernel", "x = y"));
    }
    Ok(-(I * z.sqrt_z() * r).exp() / (4.0 * core::f64::consts::PI * r))
}

/// `phi_j(x) exp(i sqrt(z) r) / (4 pi i r) phi_h(y)`.
pub fn ktilde_kernel(
    j: &Scatterer,
    h: &Scatterer,
    z: &ComplexEnergy,
    x: Vec3,
    y: Vec3,
) -> Result<Complex64> {
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(Error::singular("ktilde_kernel", "x = y"));
    }
    let pj = j.phi_at(x);
    let ph = h.phi_at(y);
    if pj == Complex64::new(0.0, 0.0) || ph == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(pj * ph * (I * z.sqrt_z() * r).exp() / (4.0 * core::f64::consts::PI * I * r))
}
