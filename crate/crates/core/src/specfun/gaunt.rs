//! Wigner 3j symbols and Gaunt coefficients for integer angular momenta.
//!
//! The 3j symbol uses the Racah sum evaluated in log space. Gaunt
//! coefficients follow the harmonic convention of [`super::harmonics`]:
//! `gaunt(l1,m1; l2,m2; l3,m3) = int Y_{l1 m1} Y_{l2 m2} conj(Y_{l3 m3}) dOmega`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Log-factorial table shared by 3j and Gaunt evaluations.
#[derive(Debug, Clone)]
pub struct Wigner {
    ln_fact: Vec<f64>,
}

impl Wigner {
    /// Table valid for all angular momenta up to `jmax` (sum of three).
    pub fn new(jmax: usize) -> Self {
        let n = 3 * jmax + 2;
        let mut ln_fact = Vec::with_capacity(n + 1);
        ln_fact.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).ln();
            ln_fact.push(acc);
        }
        Self { ln_fact }
    }

    fn lf(&self, n: i64) -> f64 {
        self.ln_fact[n as usize]
    }

    fn ensure(&self, total: i64) {
        assert!(
            (total as usize) < self.ln_fact.len(),
            "Wigner table too small for j1+j2+j3 = {total}"
        );
    }

    /// `(j1 j2 j3; m1 m2 m3)` for integer arguments.
    pub fn three_j(&self, j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
        if m1 + m2 + m3 != 0 || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
            return 0.0;
        }
        if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
            return 0.0;
        }
        self.ensure(j1 + j2 + j3 + 1);
        if m1 == 0 && m2 == 0 {
            return self.three_j_zero(j1, j2, j3);
        }
        let ln_delta = self.lf(j1 + j2 - j3) + self.lf(j1 - j2 + j3) + self.lf(-j1 + j2 + j3)
            - self.lf(j1 + j2 + j3 + 1);
        let ln_pref = 0.5
            * (ln_delta
                + self.lf(j1 + m1)
                + self.lf(j1 - m1)
                + self.lf(j2 + m2)
                + self.lf(j2 - m2)
                + self.lf(j3 + m3)
                + self.lf(j3 - m3));
        let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
        let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
        if kmin > kmax {
            return 0.0;
        }
        let logs: Vec<f64> = (kmin..=kmax)
            .map(|k| {
                ln_pref
                    - (self.lf(k)
                        + self.lf(j3 - j2 + k + m1)
                        + self.lf(j3 - j1 + k - m2)
                        + self.lf(j1 + j2 - j3 - k)
                        + self.lf(j1 - k - m1)
                        + self.lf(j2 - k + m2))
            })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (i, lg) in logs.iter().enumerate() {
            let k = kmin + i as i64;
            let term = (lg - top).exp();
            sum += if k % 2 == 0 { term } else { -term };
        }
        let sign = if (j1 - j2 - m3).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        sign * sum * top.exp()
    }

    /// `(j1 j2 j3; 0 0 0)` from its closed product form.
    fn three_j_zero(&self, j1: i64, j2: i64, j3: i64) -> f64 {
        let total = j1 + j2 + j3;
        if total % 2 != 0 {
            return 0.0;
        }
        let g = total / 2;
        let ln_delta = self.lf(j1 + j2 - j3) + self.lf(j1 - j2 + j3) + self.lf(-j1 + j2 + j3)
            - self.lf(total + 1);
        let ln = 0.5 * ln_delta + self.lf(g) - self.lf(g - j1) - self.lf(g - j2) - self.lf(g - j3);
        let sign = if g % 2 == 0 { 1.0 } else { -1.0 };
        sign * ln.exp()
    }

    /// Gaunt coefficient without domain checks; selection rules give exact zeros.
    pub fn gaunt(&self, l1: usize, m1: i64, l2: usize, m2: i64, l3: usize, m3: i64) -> f64 {
        // Canonical argument order makes the exchange and m -> -m symmetries
        // hold bit-for-bit.
        let (l1, m1, l2, m2) = if (l1, m1) > (l2, m2) {
            (l2, m2, l1, m1)
        } else {
            (l1, m1, l2, m2)
        };
        let (m1, m2, m3) = if m3 < 0 || (m3 == 0 && m1 < 0) {
            (-m1, -m2, -m3)
        } else {
            (m1, m2, m3)
        };
        let (j1, j2, j3) = (l1 as i64, l2 as i64, l3 as i64);
        if m3 != m1 + m2 || (j1 + j2 + j3) % 2 != 0 || j3 < (j1 - j2).abs() || j3 > j1 + j2 {
            return 0.0;
        }
        let pref = (((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1)) as f64 / (4.0 * PI)).sqrt();
        let sign = if m3.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sign * pref * self.three_j(j1, j2, j3, 0, 0, 0) * self.three_j(j1, j2, j3, m1, m2, -m3)
    }
}

/// `int Y_{l1 m1} Y_{l2 m2} conj(Y_{l3 m3}) dOmega`.
pub fn gaunt(l1: usize, m1: i64, l2: usize, m2: i64, l3: usize, m3: i64) -> Result<f64> {
    for (l, m) in [(l1, m1), (l2, m2), (l3, m3)] {
        if m.unsigned_abs() as usize > l {
            return Err(Error::domain(
                "gaunt",
                alloc::format!("|m| = {} > l = {l}", m.abs()),
            ));
        }
    }
    Ok(Wigner::new(l1.max(l2).max(l3)).gaunt(l1, m1, l2, m2, l3, m3))
}
