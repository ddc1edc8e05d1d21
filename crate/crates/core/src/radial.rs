//! Radial Schrödinger solver: phase shifts and on-shell partial-wave
//! amplitudes.
//!
//! The regular solution of `u'' = [l(l+1)/r^2 + V(r) - k^2] u` is integrated
//! outward with Numerov's method, segment by segment between the
//! potential's breakpoints. The phase shift then follows from
//!
//! `tan eta = -k int_0^R j_l(kr) V(r) u(r) r dr / A`,
//!
//! where `A` normalizes `u/r` to `j_l - tan(eta) y_l` at the matching radius
//! `R`. This keeps full relative precision for tiny phase shifts, unlike plain
//! log-derivative matching.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::potentials::Potential;
use crate::specfun::bessel::{bessel_j_array, bessel_y_array, derivative_from_table};
use crate::{Error, Result, I};

/// Step-size and matching controls for [`phase_shift_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    /// Largest Numerov step.
    pub max_step: f64,
    /// Upper bound on `h * sqrt(|local wave number^2|)`.
    pub max_phase_step: f64,
    /// Matching radius; `None` picks `1.25 * effective radius` (at least `range`).
    pub r_match: Option<f64>,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            max_step: 2e-3,
            max_phase_step: 0.02,
            r_match: None,
        }
    }
}

/// Phase shift `eta_l(k)` reduced to `(-pi/2, pi/2]`.
pub fn phase_shift(p: &Potential, l: usize, k: f64) -> Result<f64> {
    phase_shift_with(p, l, k, &RadialOptions::default())
}

pub fn phase_shift_with(p: &Potential, l: usize, k: f64, opts: &RadialOptions) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain(
            "phase_shift",
            alloc::format!("k = {k} must be positive"),
        ));
    }
    p.validate()?;
    if p.is_zero() {
        return Ok(0.0);
    }
    let support = p.effective_radius();
    let r_match = match opts.r_match {
        Some(r) if r < support => {
            return Err(Error::Config(alloc::format!(
                "matching radius {r} lies inside the effective support {support}"
            )))
        }
        Some(r) => r,
        None => (1.25 * support).max(support + p.range()),
    };
    let tan_eta = tan_phase(p, l, k, r_match, opts)?;
    let eta = tan_eta.atan();
    Ok(if eta <= -PI / 2.0 { eta + PI } else { eta })
}

/// Running state of the outward integration.
struct Outward {
    r: f64,
    u: f64,
    du: f64,
    /// `int j_l(kr) V u r dr` accumulated so far.
    overlap: f64,
}

fn tan_phase(p: &Potential, l: usize, k: f64, r_match: f64, opts: &RadialOptions) -> Result<f64> {
    let ll = (l * (l + 1)) as f64;
    let v0 = p.evaluate(0.0);

    // Series start u = r^{l+1} (1 + c r^2) close to the origin.
    let c2 = (v0 - k * k) / (2.0 * (2 * l + 3) as f64);
    let mut scale_len = p.range().min(1.0 / k).min(r_match);
    if v0 != 0.0 {
        scale_len = scale_len.min(1.0 / v0.abs().sqrt());
    }
    if let Some(&b) = p.breakpoints().iter().find(|&&b| b > 0.0) {
        scale_len = scale_len.min(b);
    }
    let r0 = 1e-3 * scale_len;
    let lp = l as i32;
    let u0 = r0.powi(lp + 1) * (1.0 + c2 * r0 * r0);
    let du0 = r0.powi(lp) * ((l + 1) as f64 + (l + 3) as f64 * c2 * r0 * r0);
    let mut state = Outward {
        r: r0,
        u: 1.0,
        du: du0 / u0,
        overlap: 0.0,
    };
    // The overlap integrand vanishes like r^{2l+2} near the origin.
    state.overlap = bessel_j_array(l, k * r0)?[l] * v0 * r0 * r0 / (2 * l + 3) as f64;

    // Doubling segments near the origin, then the potential's breakpoints.
    let mut edges: Vec<f64> = Vec::new();
    let mut r = 2.0 * r0;
    while r < 0.5 * scale_len {
        edges.push(r);
        r *= 2.0;
    }
    edges.extend(
        p.breakpoints()
            .into_iter()
            .filter(|&b| b > r0 && b < r_match),
    );
    edges.push(r_match);

    let mut seg_start = r0;
    for &seg_end in &edges {
        let v_max = sample_max_abs(p, seg_start, seg_end);
        let f_max = ll / (seg_start * seg_start) + v_max + k * k;
        let h = opts.max_step.min(opts.max_phase_step / f_max.sqrt());
        // Split where the solution can grow by more than about e^200.
        let pieces = ((seg_end - seg_start) * (ll / (seg_start * seg_start) + v_max).sqrt() / 200.0)
            .ceil()
            .max(1.0) as usize;
        let width = (seg_end - seg_start) / pieces as f64;
        for piece in 0..pieces {
            let a = seg_start + width * piece as f64;
            let b = if piece + 1 == pieces {
                seg_end
            } else {
                a + width
            };
            let mut n = ((b - a) / h).ceil() as usize;
            n = n.max(8);
            if n % 2 == 1 {
                n += 1;
            }
            integrate_segment(p, l, k, &mut state, a, b, n)?;
        }
        seg_start = seg_end;
    }

    // Normalization from the Wronskian with y_l at r_match.
    let r = state.r;
    let x = k * r;
    let yt = bessel_y_array(l + 1, x)?;
    let dy = derivative_from_table(&yt, x)[l];
    let rad = state.u / r;
    let drad = (state.du - rad) / r;
    let amp = x * x * (k * rad * dy - drad * yt[l]) / k;
    if !amp.is_finite() || amp == 0.0 || !state.overlap.is_finite() {
        return Err(Error::NonConvergence {
            op: "phase_shift",
            residual: amp.abs(),
        });
    }
    Ok(-k * state.overlap / amp)
}

fn sample_max_abs(p: &Potential, a: f64, b: f64) -> f64 {
    (0..=64)
        .map(|i| one_sided(p, a + (b - a) * i as f64 / 64.0, a, b).abs())
        .fold(0.0, f64::max)
}

/// `V(r)` for `r` in `[a, b]`, taking limits from inside the interval at the
/// end points so jumps at breakpoints are seen from the correct side.
fn one_sided(p: &Potential, r: f64, a: f64, b: f64) -> f64 {
    let tiny = 4.0 * f64::EPSILON * b;
    p.evaluate(r.clamp(a + tiny, b - tiny))
}

/// Integrates from `state.r == a` to `b` in `n` equal Numerov steps, updating
/// `u`, `u'` and the overlap integral (composite Simpson).
fn integrate_segment(
    p: &Potential,
    l: usize,
    k: f64,
    state: &mut Outward,
    a: f64,
    b: f64,
    n: usize,
) -> Result<()> {
    let ll = (l * (l + 1)) as f64;
    let h = (b - a) / n as f64;
    let node_r = |i: usize| if i == n { b } else { a + h * i as f64 };
    let node_v = |i: usize| one_sided(p, node_r(i), a, b);
    let f = |r: f64, v: f64| ll / (r * r) + v - k * k;
    let mut us = Vec::with_capacity(n + 1);
    us.push(state.u);
    us.push(rk4_step(
        &|r| f(r, one_sided(p, r, a, b)),
        state.u,
        state.du,
        a,
        h,
    ));
    let g = |i: usize| h * h * f(node_r(i), node_v(i)) / 12.0;
    let mut g_prev = g(0);
    let mut g_cur = g(1);
    for i in 1..n {
        let g_next = g(i + 1);
        let un = (2.0 * (1.0 + 5.0 * g_cur) * us[i] - (1.0 - g_prev) * us[i - 1]) / (1.0 - g_next);
        us.push(un);
        g_prev = g_cur;
        g_cur = g_next;
    }
    let big = us.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !big.is_finite() {
        return Err(Error::NonConvergence {
            op: "phase_shift",
            residual: f64::INFINITY,
        });
    }

    // Simpson over the segment for int j_l(kr) V u r dr.
    let mut acc = 0.0;
    for (i, &u) in us.iter().enumerate() {
        let r = node_r(i);
        let v = node_v(i);
        if v == 0.0 {
            continue;
        }
        let j = bessel_j_array(l, k * r)?[l];
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * j * v * u * r;
    }
    acc *= h / 3.0;

    // Sixth-order one-sided derivative at the segment end.
    let d = [-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0];
    let du = if n >= 6 {
        -(0..7).map(|i| d[i] * us[n - i]).sum::<f64>() / (60.0 * h)
    } else {
        (us[n] - us[n - 1]) / h
    };
    // Keep the growing solution inside floating-point range.
    let rescale = if big > 1e100 { 1.0 / big } else { 1.0 };
    state.overlap = (state.overlap + acc) * rescale;
    state.u = us[n] * rescale;
    state.du = du * rescale;
    state.r = b;
    Ok(())
}

/// One step of size `h` for `u'' = f(r) u` from `(u, u')` at `a`, using RK4
/// sub-steps.
fn rk4_step(f: &impl Fn(f64) -> f64, u: f64, du: f64, a: f64, h: f64) -> f64 {
    const SUB: usize = 64;
    let s = h / SUB as f64;
    let (mut y, mut dy, mut r) = (u, du, a);
    for _ in 0..SUB {
        let k1y = dy;
        let k1d = f(r) * y;
        let k2y = dy + 0.5 * s * k1d;
        let k2d = f(r + 0.5 * s) * (y + 0.5 * s * k1y);
        let k3y = dy + 0.5 * s * k2d;
        let k3d = f(r + 0.5 * s) * (y + 0.5 * s * k2y);
        let k4y = dy + s * k3d;
        let k4d = f(r + s) * (y + s * k3y);
        y += s / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += s / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        r += s;
    }
    y
}

/// On-shell partial-wave amplitude `t_lm(k0) = -sin(eta) e^{i eta} / k0`.
pub fn onshell_t_lm(eta: f64, k0: f64) -> Complex64 {
    -(eta.sin()) * (I * eta).exp() / k0
}

/// Phase shifts of one potential on a momentum list, with branches made
/// continuous in `k` starting from the zero branch at the largest momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftTable {
    pub potential: Potential,
    pub momenta: Vec<f64>,
    /// `entries[l][i]` is `eta_l(momenta[i])`.
    pub entries: Vec<Vec<f64>>,
}

impl PhaseShiftTable {
    pub fn build(potential: Potential, lmax: usize, momenta: &[f64]) -> Result<Self> {
        let mut momenta = momenta.to_vec();
        momenta.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut entries = Vec::with_capacity(lmax + 1);
        for l in 0..=lmax {
            let mut etas = momenta
                .iter()
                .map(|&k| phase_shift(&potential, l, k))
                .collect::<Result<Vec<f64>>>()?;
            unwrap_from_top(&mut etas);
            entries.push(etas);
        }
        Ok(Self {
            potential,
            momenta,
            entries,
        })
    }

    pub fn get(&self, l: usize, i: usize) -> f64 {
        self.entries[l][i]
    }
}

/// Shifts each entry by a multiple of pi so consecutive values (walking down
/// from the last one) differ by less than pi/2.
fn unwrap_from_top(values: &mut [f64]) {
    for i in (0..values.len().saturating_sub(1)).rev() {
        let target = values[i + 1];
        let shift = ((target - values[i]) / PI).round();
        values[i] += shift * PI;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onshell_formula() {
        assert_eq!(onshell_t_lm(0.0, 1.7), Complex64::new(0.0, 0.0));
        assert!((onshell_t_lm(PI / 2.0, 1.0) + I).norm() < 1e-15);
        let t = onshell_t_lm(0.3, 2.0);
        let expect = -(0.3f64).sin() * Complex64::from_polar(1.0, 0.3) / 2.0;
        assert!((t - expect).norm() < 1e-16);
    }

    #[test]
    fn free_particle_has_no_shift() {
        for l in 0..4 {
            assert_eq!(phase_shift(&Potential::zero(), l, 1.3).unwrap(), 0.0);
        }
    }

    #[test]
    fn matching_radius_inside_support_is_rejected() {
        let p = Potential::SquareWell { v0: -1.0, a: 1.0 };
        let opts = RadialOptions {
            r_match: Some(0.5),
            ..Default::default()
        };
        assert!(matches!(
            phase_shift_with(&p, 0, 1.0, &opts),
            Err(Error::Config(_))
        ));
        assert!(phase_shift(&p, 0, 0.0).is_err());
    }

    #[test]
    fn unwrap_keeps_continuity() {
        let mut v = [0.1, 0.2 - PI, 0.3 - PI, 0.25];
        unwrap_from_top(&mut v);
        assert!((v[0] - (0.1 + PI)).abs() < 1e-15 || (v[0] - 0.1).abs() < 1e-15);
        assert!(v.windows(2).all(|w| (w[0] - w[1]).abs() < PI / 2.0));
    }
}
