//! Central potential models, their square-root factorization and
//! integrability diagnostics.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::quadrature::adaptive;
use crate::{Error, Result, Vec3};

/// `|V|` below this value counts as outside the potential.
pub const TAIL_THRESHOLD: f64 = 1e-12;

/// Spherically symmetric potential in units where `hbar^2 / 2m = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `v0` for `r <= a`, zero outside.
    SquareWell { v0: f64, a: f64 },
    /// `v0 exp(-r^2 / a^2)`.
    Gaussian { v0: f64, a: f64 },
    /// `v0 exp(-r / a)`.
    Exponential { v0: f64, a: f64 },
    /// `v0 min(1/r, 1/rc) exp(-r / a)`: a Coulomb core capped at `r = rc`.
    TruncatedCoulomb { v0: f64, a: f64, rc: f64 },
}

/// Extent of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Compact {
        radius: f64,
    },
    /// Infinite tail; `|V| < TAIL_THRESHOLD` beyond `effective_radius`.
    Decaying {
        effective_radius: f64,
    },
}

impl Potential {
    pub fn zero() -> Self {
        Potential::SquareWell { v0: 0.0, a: 1.0 }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Potential::SquareWell { .. } => "square_well",
            Potential::Gaussian { .. } => "gaussian",
            Potential::Exponential { .. } => "exponential",
            Potential::TruncatedCoulomb { .. } => "truncated_coulomb",
        }
    }

    pub fn strength(&self) -> f64 {
        match *self {
            Potential::SquareWell { v0, .. }
            | Potential::Gaussian { v0, .. }
            | Potential::Exponential { v0, .. }
            | Potential::TruncatedCoulomb { v0, .. } => v0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.strength() == 0.0
    }

    /// The same shape with strength multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match *self {
            Potential::SquareWell { v0, a } => Potential::SquareWell { v0: v0 * lambda, a },
            Potential::Gaussian { v0, a } => Potential::Gaussian { v0: v0 * lambda, a },
            Potential::Exponential { v0, a } => Potential::Exponential { v0: v0 * lambda, a },
            Potential::TruncatedCoulomb { v0, a, rc } => Potential::TruncatedCoulomb {
                v0: v0 * lambda,
                a,
                rc,
            },
        }
    }

    /// Checks the shape parameters.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Potential::SquareWell { v0, a }
            | Potential::Gaussian { v0, a }
            | Potential::Exponential { v0, a } => v0.is_finite() && a > 0.0 && a.is_finite(),
            Potential::TruncatedCoulomb { v0, a, rc } => {
                v0.is_finite() && a > 0.0 && a.is_finite() && rc > 0.0 && rc.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                "potential",
                alloc::format!("invalid parameters {self:?}"),
            ))
        }
    }

    /// `V(r)`; exactly zero outside a compact support.
    pub fn evaluate(&self, r: f64) -> f64 {
        match *self {
            Potential::SquareWell { v0, a } => {
                if r <= a {
                    v0
                } else {
                    0.0
                }
            }
            Potential::Gaussian { v0, a } => v0 * (-(r * r) / (a * a)).exp(),
            Potential::Exponential { v0, a } => v0 * (-r / a).exp(),
            Potential::TruncatedCoulomb { v0, a, rc } => v0 * (-r / a).exp() / r.max(rc),
        }
    }

    /// Mean of the one-sided limits at `r`; differs from [`Self::evaluate`]
    /// only at a jump of `V`.
    pub fn jump_average(&self, r: f64) -> f64 {
        match *self {
            Potential::SquareWell { v0, a } if r == a => 0.5 * v0,
            _ => self.evaluate(r),
        }
    }

    /// `phi(r)` with `phi^2 = V`; `+i sqrt|V|` where `V < 0`.
    pub fn phi(&self, r: f64) -> Complex64 {
        let v = self.evaluate(r);
        if v >= 0.0 {
            Complex64::new(v.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-v).sqrt())
        }
    }

    pub fn support(&self) -> Support {
        match *self {
            Potential::SquareWell { v0, a } => Support::Compact {
                radius: if v0 == 0.0 { 0.0 } else { a },
            },
            _ => Support::Decaying {
                effective_radius: self.tail_radius(),
            },
        }
    }

    /// Radius beyond which the potential is treated as zero.
    pub fn effective_radius(&self) -> f64 {
        match self.support() {
            Support::Compact { radius } => radius,
            Support::Decaying { effective_radius } => effective_radius,
        }
    }

    fn tail_radius(&self) -> f64 {
        let v0 = self.strength().abs();
        if v0 <= TAIL_THRESHOLD {
            return 0.0;
        }
        let ratio = (v0 / TAIL_THRESHOLD).ln();
        match *self {
            Potential::SquareWell { a, .. } => a,
            Potential::Gaussian { a, .. } => a * ratio.sqrt(),
            Potential::Exponential { a, .. } => a * ratio,
            Potential::TruncatedCoulomb { .. } => {
                let excess = |r: f64| self.evaluate(r).abs() - TAIL_THRESHOLD;
                let mut lo = 0.0;
                let mut hi = 1.0;
                while excess(hi) > 0.0 {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if excess(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-14 * hi {
                        break;
                    }
                }
                hi
            }
        }
    }

    /// Radii where `V` or its derivative is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Potential::SquareWell { a, .. } => alloc::vec![a],
            Potential::TruncatedCoulomb { rc, .. } => alloc::vec![rc],
            _ => Vec::new(),
        }
    }

    /// Range parameter used to scale integration steps.
    pub fn range(&self) -> f64 {
        match *self {
            Potential::SquareWell { a, .. }
            | Potential::Gaussian { a, .. }
            | Potential::Exponential { a, .. } => a,
            Potential::TruncatedCoulomb { a, rc, .. } => a.min(4.0 * rc).max(rc),
        }
    }

    /// `int |V| d^3x` and `(int V^2 d^3x)^{1/2}` over the effective support.
    pub fn rollnik_check(&self) -> Result<RollnikDiagnostics> {
        let radius = self.effective_radius();
        if radius == 0.0 {
            return Ok(RollnikDiagnostics {
                l1_norm: 0.0,
                l2_norm: 0.0,
                admissible: true,
            });
        }
        let mut breaks = self.breakpoints();
        // Resolve the bulk of decaying tails before the far cutoff.
        let scale = self.range();
        let mut b = scale;
        while b < radius {
            breaks.push(b);
            b *= 2.0;
        }
        let l1 = adaptive(
            |r| self.evaluate(r).abs() * r * r,
            0.0,
            radius,
            &breaks,
            0.0,
            1e-13,
        )
        .map_err(|e| e.context("rollnik_check l1"))?;
        let l2 = adaptive(
            |r| self.evaluate(r).powi(2) * r * r,
            0.0,
            radius,
            &breaks,
            0.0,
            1e-13,
        )
        .map_err(|e| e.context("rollnik_check l2"))?;
        let l1_norm = 4.0 * PI * l1.value;
        let l2_norm = (4.0 * PI * l2.value).sqrt();
        let admissible = l1_norm.is_finite() && l2_norm.is_finite();
        Ok(RollnikDiagnostics {
            l1_norm,
            l2_norm,
            admissible,
        })
    }
}

/// Integrability of a potential: both norms finite means the sandwiched free
/// resolvent is a well-defined compact kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollnikDiagnostics {
    pub l1_norm: f64,
    pub l2_norm: f64,
    pub admissible: bool,
}

/// A potential centered at `center`: `V_j(x) = Phi(x - center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub center: Vec3,
    pub potential: Potential,
}

impl Scatterer {
    pub fn new(center: Vec3, potential: Potential) -> Self {
        Self { center, potential }
    }

    /// Gap between the effective supports of two scatterers; negative when
    /// they overlap.
    pub fn gap(&self, other: &Scatterer) -> f64 {
        (other.center - self.center).norm()
            - self.potential.effective_radius()
            - other.potential.effective_radius()
    }

    pub fn phi_at(&self, x: Vec3) -> Complex64 {
        self.potential.phi((x - self.center).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let well = Potential::SquareWell { v0: -1.0, a: 1.0 };
        assert_eq!(well.evaluate(0.5), -1.0);
        assert_eq!(well.evaluate(2.0), 0.0);
        let g = Potential::Gaussian { v0: -1.0, a: 1.0 };
        assert!((g.evaluate(1.0) + (-1.0f64).exp()).abs() < 1e-16);
        let c = Potential::TruncatedCoulomb {
            v0: -1.0,
            a: 1.0,
            rc: 0.1,
        };
        assert_eq!(c.evaluate(0.0), -10.0);
        assert_eq!(well.support(), Support::Compact { radius: 1.0 });
    }

    #[test]
    fn phi_branches() {
        let p = Potential::SquareWell { v0: -1.0, a: 1.0 };
        assert_eq!(p.phi(0.2), Complex64::new(0.0, 1.0));
        assert_eq!(p.phi(3.0), Complex64::new(0.0, 0.0));
        let q = Potential::SquareWell { v0: 4.0, a: 1.0 };
        assert_eq!(q.phi(0.2), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn phi_squares_to_v_on_dense_grid() {
        let kinds = [
            Potential::SquareWell { v0: -1.3, a: 1.0 },
            Potential::Gaussian { v0: 2.0, a: 0.7 },
            Potential::Exponential { v0: -0.4, a: 1.5 },
            Potential::TruncatedCoulomb {
                v0: -1.0,
                a: 1.0,
                rc: 0.1,
            },
        ];
        for p in kinds {
            for i in 0..2000 {
                let r = i as f64 * 0.005;
                let v = p.evaluate(r);
                let phi2 = p.phi(r).powi(2);
                assert!((phi2.re - v).abs() <= 4.0 * f64::EPSILON * v.abs() && phi2.im == 0.0);
            }
        }
    }

    #[test]
    fn rollnik_closed_forms() {
        let well = Potential::SquareWell { v0: -1.0, a: 1.0 }
            .rollnik_check()
            .unwrap();
        assert!((well.l1_norm - 4.0 * PI / 3.0).abs() < 1e-8);
        assert!((well.l2_norm - (4.0 * PI / 3.0f64).sqrt()).abs() < 1e-8);
        assert!(well.admissible);
        let g = Potential::Gaussian { v0: -1.0, a: 1.0 }
            .rollnik_check()
            .unwrap();
        assert!((g.l1_norm - PI.powf(1.5)).abs() < 1e-8);
        // int e^{-2 r^2} d^3x = (pi/2)^{3/2}
        assert!((g.l2_norm - (PI / 2.0).powf(1.5).sqrt()).abs() < 1e-8);
        let e = Potential::Exponential { v0: -2.0, a: 0.5 }
            .rollnik_check()
            .unwrap();
        assert!((e.l1_norm - 8.0 * PI * 2.0 * 0.125).abs() < 1e-8);
        let c = Potential::TruncatedCoulomb {
            v0: -1.0,
            a: 1.0,
            rc: 1e-3,
        }
        .rollnik_check()
        .unwrap();
        assert!(c.admissible && c.l2_norm.is_finite());
        // Coulomb core: 4 pi int_0^inf r e^{-r} dr = 4 pi, minus the capped piece.
        assert!((c.l1_norm - 4.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn attractive_profiles_are_monotone() {
        for p in [
            Potential::Gaussian { v0: -1.0, a: 1.0 },
            Potential::Exponential { v0: -1.0, a: 2.0 },
        ] {
            let mut prev = p.evaluate(0.0);
            for i in 1..500 {
                let v = p.evaluate(i as f64 * 0.02);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn effective_radius_meets_threshold() {
        for p in [
            Potential::Gaussian { v0: -1.0, a: 1.0 },
            Potential::Exponential { v0: 3.0, a: 0.5 },
            Potential::TruncatedCoulomb {
                v0: -1.0,
                a: 1.0,
                rc: 0.1,
            },
        ] {
            let r = p.effective_radius();
            assert!(p.evaluate(r).abs() <= 1.0001 * TAIL_THRESHOLD);
            assert!(p.evaluate(0.99 * r).abs() > TAIL_THRESHOLD);
        }
        assert_eq!(Potential::zero().effective_radius(), 0.0);
    }
}
