//! Spherical Bessel, Neumann and outgoing Hankel functions of real argument.
//!
//! `j_l` uses upward recurrence when `x >= l` and Miller's downward recurrence
//! (normalized by `sum (2l+1) j_l^2 = 1`) otherwise. `y_l` is always computed
//! upward, which is stable for the irregular solution. The outgoing Hankel
//! function is `h_l^(+) = j_l + i y_l`, so `h_0^(+)(x) = -i e^{ix} / x`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Largest order accepted by the Bessel and harmonic routines.
pub const L_MAX_SUPPORTED: usize = 160;

fn check_order(op: &'static str, l: usize) -> Result<()> {
    if l > L_MAX_SUPPORTED {
        return Err(Error::domain(
            op,
            alloc::format!("order {l} exceeds {L_MAX_SUPPORTED}"),
        ));
    }
    Ok(())
}

/// `j_0 ..= j_lmax` at `x >= 0`.
pub fn bessel_j_array(lmax: usize, x: f64) -> Result<Vec<f64>> {
    check_order("bessel_j", lmax)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j", alloc::format!("x = {x}")));
    }
    let mut out = vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let (s, c) = x.sin_cos();
    if x >= lmax as f64 {
        out[0] = s / x;
        if lmax >= 1 {
            out[1] = s / (x * x) - c / x;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return Ok(out);
    }
    if x < 1e-3 {
        // Series: j_l(x) = x^l/(2l+1)!! [1 - x^2/(2(2l+3)) + x^4/(8(2l+3)(2l+5))].
        let mut lead = 1.0;
        for (l, o) in out.iter_mut().enumerate() {
            if l > 0 {
                lead *= x / (2 * l + 1) as f64;
            }
            let a = (2 * l + 3) as f64;
            let b = (2 * l + 5) as f64;
            *o = lead * (1.0 - x * x / (2.0 * a) + x.powi(4) / (8.0 * a * b));
        }
        return Ok(out);
    }
    let start = lmax + 20 + (40.0 * (lmax as f64).max(x)).sqrt() as usize;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut tail = vec![0.0; start + 1];
    tail[start] = cur;
    for l in (1..=start).rev() {
        let prev = (2 * l + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        tail[l - 1] = cur;
        if cur.abs() > 1e250 {
            for v in tail[l - 1..].iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            cur *= 1e-250;
        }
    }
    let big = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let norm: f64 = tail
        .iter()
        .enumerate()
        .map(|(l, v)| (2 * l + 1) as f64 * (v / big) * (v / big))
        .sum();
    let mut scale = 1.0 / (big * norm.sqrt());
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let sign_ref = if j0.abs() > j1.abs() {
        (j0, tail[0])
    } else {
        (j1, tail[1])
    };
    if sign_ref.0 * sign_ref.1 < 0.0 {
        scale = -scale;
    }
    for l in 0..=lmax {
        out[l] = tail[l] * scale;
    }
    Ok(out)
}

/// `y_0 ..= y_lmax` at `x > 0`.
pub fn bessel_y_array(lmax: usize, x: f64) -> Result<Vec<f64>> {
    check_order("bessel_y", lmax)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::singular("bessel_y", alloc::format!("x = {x}")));
    }
    let (s, c) = x.sin_cos();
    let mut out = vec![0.0; lmax + 1];
    out[0] = -c / x;
    if lmax >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for l in 1..lmax {
        out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        if !out[l + 1].is_finite() {
            return Err(Error::Overflow {
                op: "bessel_y",
                detail: alloc::format!("y_{} at x = {x}", l + 1),
            });
        }
    }
    Ok(out)
}

pub fn bessel_j(l: usize, x: f64) -> Result<f64> {
    Ok(bessel_j_array(l, x)?[l])
}

pub fn bessel_y(l: usize, x: f64) -> Result<f64> {
    Ok(bessel_y_array(l, x)?[l])
}

/// Outgoing spherical Hankel function `h_l^(+)(x) = j_l(x) + i y_l(x)`.
pub fn hankel_plus(l: usize, x: f64) -> Result<Complex64> {
    if x == 0.0 {
        return Err(Error::singular("hankel_plus", "x = 0"));
    }
    let j = bessel_j(l, x)?;
    let y = bessel_y(l, x)?;
    Ok(Complex64::new(j, y))
}

/// `h_0^(+) ..= h_lmax^(+)` at `x > 0`.
pub fn hankel_plus_array(lmax: usize, x: f64) -> Result<Vec<Complex64>> {
    if x == 0.0 {
        return Err(Error::singular("hankel_plus", "x = 0"));
    }
    let j = bessel_j_array(lmax, x)?;
    let y = bessel_y_array(lmax, x)?;
    Ok(j.into_iter()
        .zip(y)
        .map(|(a, b)| Complex64::new(a, b))
        .collect())
}

/// Derivatives `f_l'(x)` from a table `f_0 ..= f_{lmax+1}` of a spherical
/// Bessel-type function: `f_l' = l/x f_l - f_{l+1}`.
pub fn derivative_from_table(table: &[f64], x: f64) -> Vec<f64> {
    (0..table.len() - 1)
        .map(|l| l as f64 / x * table[l] - table[l + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(0, PI).unwrap().abs() < 1e-16);
        let x = 1.0f64;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        assert!((bessel_j(1, 1.0).unwrap() - j1).abs() < 1e-15);
        assert!((bessel_j(1, 1.0).unwrap() - 0.301_168_678_939_756_8).abs() < 1e-15);
        for x in [0.01, 0.7, 3.0, 25.0] {
            let h = hankel_plus(0, x).unwrap();
            assert!((h.norm() - 1.0 / x).abs() < 1e-14 / x);
        }
        let x = PI / 2.0;
        let expect = -crate::I * Complex64::new(0.0, x).exp() / x;
        assert!((hankel_plus(0, x).unwrap() - expect).norm() < 1e-15);
        let x = 10.0f64;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        let y1 = -x.cos() / (x * x) - x.sin() / x;
        assert!((hankel_plus(1, 10.0).unwrap() - Complex64::new(j1, y1)).norm() < 1e-15);
    }

    #[test]
    fn downward_and_upward_agree_near_switch() {
        // Evaluate l = 10 both ways around x = 10.
        let a = bessel_j_array(10, 10.0).unwrap()[10];
        let b = bessel_j_array(11, 10.0).unwrap()[10];
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn small_argument_series() {
        let j = bessel_j_array(5, 1e-4).unwrap();
        assert!((j[0] - (1e-4f64).sin() / 1e-4).abs() < 1e-15);
        assert!((j[5] / (1e-20 / 10395.0) - 1.0).abs() < 1e-8);
        let j = bessel_j_array(3, 2e-3).unwrap();
        let x = 2e-3f64;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        assert!((j[1] - j1).abs() < 1e-12);
    }

    #[test]
    fn y_overflow_is_reported() {
        assert!(matches!(bessel_y(150, 1e-3), Err(Error::Overflow { .. })));
        assert!(bessel_j(200, 1.0).is_err());
        assert!(matches!(hankel_plus(0, 0.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn wronskian_and_recurrence() {
        let lmax = 20;
        let mut x = 0.1;
        while x <= 100.0 {
            let j = bessel_j_array(lmax + 1, x).unwrap();
            let y = bessel_y_array(lmax + 1, x).unwrap();
            let dj = derivative_from_table(&j, x);
            let dy = derivative_from_table(&y, x);
            for l in 0..=lmax {
                let w = j[l] * dy[l] - dj[l] * y[l];
                let target = 1.0 / (x * x);
                let scale = (j[l] * dy[l]).abs().max((dj[l] * y[l]).abs()).max(target);
                assert!(
                    (w - target).abs() <= 1e-10 * scale,
                    "l={l} x={x}: {w} vs {target}"
                );
                if l >= 1 {
                    let f = (2 * l + 1) as f64 / x;
                    let rj = j[l - 1] + j[l + 1] - f * j[l];
                    let sj = j[l - 1].abs().max(j[l + 1].abs()).max((f * j[l]).abs());
                    assert!(
                        rj.abs() <= 1e-9 * sj.max(1e-300),
                        "j recurrence l={l} x={x}"
                    );
                    let ry = y[l - 1] + y[l + 1] - f * y[l];
                    let sy = y[l - 1].abs().max(y[l + 1].abs()).max((f * y[l]).abs());
                    assert!(ry.abs() <= 1e-9 * sy, "y recurrence l={l} x={x}");
                }
            }
            x *= 1.37;
        }
    }
}
