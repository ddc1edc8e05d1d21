//! Two-center expansion of the free outgoing Green's function.
//!
//! For `x` near center `j` (origin) and `y` near center `h` at `R`,
//!
//! `-exp(ik|x-y|) / (4 pi |x-y|)
//!     = sum_{LL'} j_l(k|x|) Y_L(x^) g_{L;L'}(k,R) j_l'(k|y-R|) conj(Y_L'((y-R)^))`
//!
//! whenever `|x| + |y - R| < |R|`, with
//!
//! `g_{L1;L2} = -4 pi i k sum_L i^{l1-l2-l} C(L, L2; L1) h_l^(+)(k|R|) conj(Y_L(R^))`
//!
//! and `C(A, B; C) = int Y_A Y_B conj(Y_C)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::linalg::CMatrix;
use crate::specfun::bessel::{bessel_j_array, hankel_plus_array, L_MAX_SUPPORTED};
use crate::specfun::gaunt::Wigner;
use crate::specfun::harmonics::{lm_index, ylm_all};
use crate::{Error, Result, Vec3, I};

/// `g_{lm;l'm'}(k0, R)` for `l, l' <= lmax`, indexed by [`lm_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstantMatrix {
    pub k0: f64,
    pub r: Vec3,
    pub lmax: usize,
    pub entries: CMatrix,
}

/// Expansion and closed form at one point pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub expansion: Complex64,
    pub closed_form: Complex64,
    pub rel_error: f64,
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn structure_constants(k0: f64, r: Vec3, lmax: usize) -> Result<StructureConstantMatrix> {
    if !(k0 > 0.0) {
        return Err(Error::domain(
            "structure_constants",
            alloc::format!("k0 = {k0} must be positive"),
        ));
    }
    let dist = r.norm();
    if !(dist > 0.0) {
        return Err(Error::domain(
            "structure_constants",
            "separation must be nonzero",
        ));
    }
    if 2 * lmax > L_MAX_SUPPORTED {
        return Err(Error::domain(
            "structure_constants",
            alloc::format!("lmax = {lmax} exceeds {}", L_MAX_SUPPORTED / 2),
        ));
    }
    let lsum = 2 * lmax;
    let h = hankel_plus_array(lsum, k0 * dist)?;
    let y = ylm_all(lsum, r.unit());
    let w = Wigner::new(lsum);
    let n = (lmax + 1) * (lmax + 1);
    let mut entries = CMatrix::zeros(n, n);
    let pref = -4.0 * PI * I * k0;
    for l1 in 0..=lmax {
        for m1 in -(l1 as i64)..=(l1 as i64) {
            for l2 in 0..=lmax {
                for m2 in -(l2 as i64)..=(l2 as i64) {
                    let mm = m1 - m2;
                    let lo = ((l1 as i64 - l2 as i64).unsigned_abs() as usize)
                        .max(mm.unsigned_abs() as usize);
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut l = lo + (l1 + l2 + lo) % 2;
                    while l <= l1 + l2 {
                        let c = w.gaunt(l, mm, l2, m2, l1, m1);
                        if c != 0.0 {
                            let phase = i_pow(l1 as i64 - l2 as i64 - l as i64);
                            acc += phase * c * h[l] * y[lm_index(l, mm)].conj();
                        }
                        l += 2;
                    }
                    entries[(lm_index(l1, m1), lm_index(l2, m2))] = pref * acc;
                }
            }
        }
    }
    Ok(StructureConstantMatrix {
        k0,
        r,
        lmax,
        entries,
    })
}

impl StructureConstantMatrix {
    pub fn get(&self, l: usize, m: i64, lp: usize, mp: i64) -> Complex64 {
        self.entries[(lm_index(l, m), lm_index(lp, mp))]
    }

    /// Truncated expansion at `x` (relative to center `j`) and `y_rel = y - R`
    /// (relative to center `h`).
    pub fn expansion(&self, x: Vec3, y_rel: Vec3) -> Result<Complex64> {
        let ja = bessel_j_array(self.lmax, self.k0 * x.norm())?;
        let jb = bessel_j_array(self.lmax, self.k0 * y_rel.norm())?;
        let ya = ylm_all(self.lmax, x.unit());
        let yb = ylm_all(self.lmax, y_rel.unit());
        let n = ya.len();
        let left: Vec<Complex64> = (0..n).map(|i| ja[l_of(i)] * ya[i]).collect();
        let right: Vec<Complex64> = (0..n).map(|i| jb[l_of(i)] * yb[i].conj()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, &la) in left.iter().enumerate() {
            let row = self.entries.row(a);
            let s: Complex64 = row.iter().zip(&right).map(|(g, r)| g * r).sum();
            acc += la * s;
        }
        Ok(acc)
    }

    /// Compares the expansion with `-exp(ik|x-y|)/(4 pi |x-y|)` at a point pair
    /// given in the frame of center `j`.
    pub fn check_point(&self, x: Vec3, y: Vec3) -> Result<PointCheck> {
        let y_rel = y - self.r;
        if x.norm() + y_rel.norm() >= self.r.norm() {
            return Err(Error::ConvergenceRegion(alloc::format!(
                "|x| + |y - R| = {} >= |R| = {}",
                x.norm() + y_rel.norm(),
                self.r.norm()
            )));
        }
        let d = (x - y).norm();
        let closed_form = -(I * self.k0 * d).exp() / (4.0 * PI * d);
        let expansion = self.expansion(x, y_rel)?;
        let rel_error = (expansion - closed_form).norm() / closed_form.norm();
        Ok(PointCheck {
            expansion,
            closed_form,
            rel_error,
        })
    }

    /// `(l, m, l', m', g)` rows in index order.
    pub fn rows(&self) -> Vec<(usize, i64, usize, i64, Complex64)> {
        let n = self.entries.rows();
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            let (l1, m1) = lm_of(a);
            for b in 0..n {
                let (l2, m2) = lm_of(b);
                out.push((l1, m1, l2, m2, self.entries[(a, b)]));
            }
        }
        out
    }
}

fn l_of(index: usize) -> usize {
    let mut l = (index as f64).sqrt() as usize;
    while l * l > index {
        l -= 1;
    }
    while (l + 1) * (l + 1) <= index {
        l += 1;
    }
    l
}

/// Inverse of [`lm_index`].
pub fn lm_of(index: usize) -> (usize, i64) {
    let l = l_of(index);
    (l, index as i64 - (l * l + l) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for i in 0..500 {
            let (l, m) = lm_of(i);
            assert_eq!(lm_index(l, m), i);
        }
    }

    #[test]
    fn monopole_entry() {
        let r = Vec3::new(0.3, -1.2, 2.0);
        let g = structure_constants(1.7, r, 3).unwrap();
        let d = r.norm();
        let expect = -(I * 1.7 * d).exp() / d;
        assert!((g.get(0, 0, 0, 0) - expect).norm() < 1e-14);
    }

    #[test]
    fn axial_selection_rule() {
        let g = structure_constants(1.0, Vec3::new(0.0, 0.0, 4.0), 6).unwrap();
        for (l1, m1, l2, m2, v) in g.rows() {
            if m1 != m2 {
                assert_eq!(v, Complex64::new(0.0, 0.0), "({l1},{m1};{l2},{m2})");
            }
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(structure_constants(1.0, Vec3::ZERO, 2).is_err());
        assert!(structure_constants(-1.0, Vec3::Z, 2).is_err());
        assert!(structure_constants(1.0, Vec3::Z, 90).is_err());
        let g = structure_constants(1.0, Vec3::new(0.0, 0.0, 2.0), 2).unwrap();
        assert!(matches!(
            g.check_point(Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.0, 0.0, 3.6)),
            Err(Error::ConvergenceRegion(_))
        ));
    }
}
