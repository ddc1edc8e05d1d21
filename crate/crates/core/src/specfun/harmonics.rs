//! Legendre polynomials and complex spherical harmonics.
//!
//! Phase convention: Condon–Shortley,
//! `Y_lm(theta, phi) = (-1)^m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta) e^{i m phi}`
//! for `m >= 0` with `P_l^m` free of the `(-1)^m` factor, and
//! `Y_{l,-m} = (-1)^m conj(Y_lm)`. Every other module (Gaunt coefficients,
//! structure constants) relies on this convention.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::{Error, Result, Vec3};

/// Flat index of `(l, m)` in arrays ordered `l = 0.., m = -l..=l`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// `P_0(x) ..= P_lmax(x)`.
pub fn legendre_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = x;
    }
    for l in 1..lmax {
        let lf = l as f64;
        p[l + 1] = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
    }
    p
}

pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_all(l, x)[l]
}

/// Orthonormal associated Legendre functions `Pbar_l^m(x)`, `l = m..=lmax`,
/// for `m >= 0`, including the Condon–Shortley phase, normalized so that
/// `2 pi * int_{-1}^{1} Pbar_l^m(x)^2 dx = 1`.
pub fn assoc_legendre_normalized(lmax: usize, m: usize, x: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sin_theta;
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    out.push(pmm);
    if lmax == m {
        return out;
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
    out.push(cur);
    for l in m + 2..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b =
            (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `Y_lm` of a (not necessarily normalized) nonzero direction.
pub fn ylm(l: usize, m: i64, direction: Vec3) -> Result<Complex64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::domain(
            "ylm",
            alloc::format!("|m| = {} > l = {l}", m.abs()),
        ));
    }
    let (c, phi) = direction.polar();
    Ok(ylm_polar(l, m, c, phi))
}

pub(crate) fn ylm_polar(l: usize, m: i64, cos_theta: f64, phi: f64) -> Complex64 {
    let ma = m.unsigned_abs() as usize;
    let p = assoc_legendre_normalized(l, ma, cos_theta)[l - ma];
    let y = Complex64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        y
    } else if ma % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// All `Y_lm` up to `lmax`, indexed by [`lm_index`].
pub fn ylm_all(lmax: usize, direction: Vec3) -> Vec<Complex64> {
    let (c, phi) = direction.polar();
    ylm_all_polar(lmax, c, phi)
}

pub(crate) fn ylm_all_polar(lmax: usize, cos_theta: f64, phi: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)];
    for m in 0..=lmax {
        let p = assoc_legendre_normalized(lmax, m, cos_theta);
        let phase = Complex64::from_polar(1.0, m as f64 * phi);
        for l in m..=lmax {
            let y = phase * p[l - m];
            out[lm_index(l, m as i64)] = y;
            if m > 0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out[lm_index(l, -(m as i64))] = y.conj() * sign;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        let y00 = ylm(0, 0, Vec3::new(0.3, -0.2, 0.9)).unwrap();
        assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-16 && y00.im == 0.0);
        let y10 = ylm(1, 0, Vec3::Z).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        // Y_11 = -sqrt(3/8pi) sin(theta) e^{i phi}
        let d = Vec3::new(1.0, 1.0, 0.0);
        let y11 = ylm(1, 1, d).unwrap();
        let expect = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt(), PI / 4.0);
        assert!((y11 - expect).norm() < 1e-15);
        let y1m1 = ylm(1, -1, d).unwrap();
        assert!((y1m1 - (-expect.conj())).norm() < 1e-15);
        assert!(ylm(1, 2, d).is_err());
    }

    #[test]
    fn addition_theorem() {
        let a = Vec3::new(0.2, 0.5, -0.7).unit();
        let b = Vec3::new(-0.9, 0.1, 0.3).unit();
        let lmax = 12;
        let ya = ylm_all(lmax, a);
        let yb = ylm_all(lmax, b);
        let p = legendre_all(lmax, a.dot(b));
        for l in 0..=lmax {
            let s: Complex64 = (-(l as i64)..=l as i64)
                .map(|m| ya[lm_index(l, m)] * yb[lm_index(l, m)].conj())
                .sum();
            let expect = (2 * l + 1) as f64 / (4.0 * PI) * p[l];
            assert!((s - expect).norm() < 1e-13, "l={l}");
        }
    }
}
