//! Partial-wave Lippmann–Schwinger equation in momentum space.
//!
//! With `<k|V|k'> = sum_lm V_l(k,k') Y_lm(k^) conj(Y_lm(k'^))` the partial-wave
//! kernel is
//!
//! `V_l(p,q) = (2/pi) int_0^inf j_l(pr) V(r) j_l(qr) r^2 dr`
//!
//! and the off-shell amplitude solves
//!
//! `t_l(p,p') = V_l(p,p') + int_0^inf q^2 V_l(p,q) t_l(q,p') / (z - q^2) dq`.
//!
//! On shell this convention gives `t_l(k0,k0; k0^2+i0) = (2/pi) * t_lm(k0)` with
//! `t_lm(k0) = -sin(eta_l) e^{i eta_l} / k0`; see [`CONVENTION`].
//!
//! The equation is solved by Nyström discretization on a [`MomentumGrid`]
//! augmented with the on-shell momentum `k0`. For `eps > 0` the extra point
//! has zero weight. For `eps = 0` the principal value is handled by
//! subtracting the on-shell numerator, which turns the extra point into the
//! analytic counter-term plus the `-i pi k0 / 2` pole contribution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::greens::ComplexEnergy;
use crate::linalg::{CMatrix, Lu};
use crate::potentials::Potential;
use crate::quadrature::{adaptive, composite, panels};
use crate::specfun::bessel::bessel_j_array;
use crate::{Error, Result, I};

/// Ratio `t_l(k0,k0; k0^2+i0) / t_lm(k0)` between the momentum-space partial
/// wave and the on-shell amplitude.
pub const CONVENTION: f64 = 2.0 / PI;

/// Pivot threshold (relative) below which the Nyström system counts as singular.
const POLE_TOL: f64 = 1e-12;

/// `V_l(p1, p2)` by adaptive quadrature over the effective support.
pub fn vl_kernel(p: &Potential, l: usize, p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::domain(
            "vl_kernel",
            alloc::format!("momenta ({p1}, {p2}) must be positive"),
        ));
    }
    if p.is_zero() {
        return Ok(0.0);
    }
    let r_max = p.effective_radius();
    let mut breaks = p.breakpoints();
    // Break at every half period of the faster oscillation.
    let period = PI / (p1 + p2);
    let n = ((r_max / period) as usize).min(2000);
    breaks.extend((1..n).map(|i| r_max * i as f64 / n as f64));
    let mut err = None;
    let res = adaptive(
        |r| {
            let a = bessel_j_array(l, p1 * r);
            let b = bessel_j_array(l, p2 * r);
            match (a, b) {
                (Ok(a), Ok(b)) => a[l] * p.evaluate(r) * b[l] * r * r,
                (Err(e), _) | (_, Err(e)) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        0.0,
        r_max,
        &breaks,
        1e-15,
        1e-12,
    )
    .map_err(|e| e.context("vl_kernel"))?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CONVENTION * res.value)
}

/// Layout parameters for [`MomentumGrid::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Upper cutoff of the momentum integral.
    pub p_max: f64,
    /// Gauss–Legendre nodes per panel.
    pub per_panel: usize,
    /// Smallest panel next to `k0`; panels double in width moving away.
    pub gamma: f64,
    /// Widest allowed panel.
    pub max_width: f64,
}

impl GridSpec {
    /// Panel layout suited to `z = k0^2 + i eps_min` and a potential of range
    /// `range`.
    pub fn for_energy(k0: f64, eps_min: f64, p_max: f64, range: f64) -> Self {
        let gamma = if eps_min > 0.0 {
            (eps_min / (2.0 * k0)).min(0.1 * k0)
        } else {
            0.1 * k0
        };
        Self {
            p_max,
            per_panel: 10,
            gamma,
            max_width: (PI / range.max(1e-3)).min(2.0),
        }
    }
}

/// Composite Gauss–Legendre map of `[0, p_max]` with panels graded towards
/// `k0`. `k0` is always a panel edge, so it is never a node.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub k0: f64,
    pub p_max: f64,
    pub spec: GridSpec,
}

impl MomentumGrid {
    pub fn new(k0: f64, spec: GridSpec) -> Result<Self> {
        if !(k0 > 0.0) || !(spec.p_max > 1.5 * k0) || spec.per_panel == 0 || !(spec.gamma > 0.0) {
            return Err(Error::domain(
                "MomentumGrid",
                alloc::format!("need 0 < k0 = {k0} < p_max / 1.5 = {}", spec.p_max / 1.5),
            ));
        }
        let w = spec.max_width;
        // Left of k0: widths gamma, 2 gamma, ... until half-way to the origin.
        let mut left = vec![k0];
        let mut width = spec.gamma;
        while left.last().unwrap() - width > 0.5 * k0 && width < w {
            left.push(left.last().unwrap() - width);
            width *= 2.0;
        }
        let rest = *left.last().unwrap();
        let count = (rest / w).ceil().max(1.0) as usize;
        for i in (0..count).rev() {
            left.push(rest * i as f64 / count as f64);
        }
        left.reverse();
        // Right of k0: the same grading, then panels no wider than max_width
        // (or a fifth of the momentum, whichever is larger).
        let mut edges = left;
        let mut width = spec.gamma;
        let mut edge = k0;
        while edge < spec.p_max {
            let step = if width < w { width } else { w.max(0.2 * edge) };
            edge = (edge + step).min(spec.p_max);
            if spec.p_max - edge < 0.25 * step {
                edge = spec.p_max;
            }
            edges.push(edge);
            width *= 2.0;
        }
        let rule = composite(&edges, spec.per_panel);
        Ok(Self {
            nodes: rule.nodes,
            weights: rule.weights,
            k0,
            p_max: spec.p_max,
            spec,
        })
    }

    /// Same layout with twice the nodes per panel.
    pub fn refined(&self) -> Result<Self> {
        let spec = GridSpec {
            per_panel: 2 * self.spec.per_panel,
            ..self.spec
        };
        Self::new(self.k0, spec)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Grid nodes followed by `k0`.
    pub fn augmented(&self) -> Vec<f64> {
        let mut m = self.nodes.clone();
        m.push(self.k0);
        m
    }
}

/// Smallest cutoff (from a geometric scan, capped at `cap`) beyond which
/// `|V_l(p, k0)|` stays below `tol` for all `l <= lmax`. Returns the cutoff and
/// the largest kernel value seen at or beyond it.
pub fn suggest_p_max(
    p: &Potential,
    lmax: usize,
    k0: f64,
    tol: f64,
    cap: f64,
) -> Result<(f64, f64)> {
    if p.is_zero() {
        return Ok(((4.0 * k0).min(cap).max(2.0 * k0), 0.0));
    }
    let envelope = |q: f64| -> Result<f64> {
        // Sample a window to step over zeros of the oscillating kernel.
        let mut m = 0.0f64;
        for s in [1.0, 1.07, 1.15, 1.24, 1.33] {
            for l in 0..=lmax {
                m = m.max(vl_kernel(p, l, q * s, k0)?.abs());
            }
        }
        Ok(m)
    };
    let mut q = (4.0 * k0).max(4.0 / p.range());
    while q < cap {
        let e = envelope(q)?;
        if e < tol {
            return Ok((q, e));
        }
        q *= 1.4;
    }
    Ok((cap, envelope(cap)?))
}

/// Real symmetric matrices `V_l(p_a, p_b)` for `l = 0..=lmax` on a set of momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrices {
    pub momenta: Vec<f64>,
    /// `values[l][a * n + b]`.
    pub values: Vec<Vec<f64>>,
}

impl KernelMatrices {
    /// Evaluates every `V_l` with one fixed composite radial rule, resolving
    /// the fastest oscillation `j_l(p_max r)^2`.
    pub fn build(p: &Potential, lmax: usize, momenta: &[f64]) -> Result<Self> {
        let n = momenta.len();
        let mut values = vec![vec![0.0; n * n]; lmax + 1];
        if p.is_zero() || n == 0 {
            return Ok(Self {
                momenta: momenta.to_vec(),
                values,
            });
        }
        let top = momenta.iter().cloned().fold(0.0, f64::max);
        let r_max = p.effective_radius();
        let width = (2.5 / top).min(0.5 * p.range()).min(0.25);
        let rule = panels(0.0, r_max, &p.breakpoints(), width, 16);
        let m = rule.len();
        // jt[(l * n + a) * m + i] = j_l(p_a r_i)
        let mut jt = vec![0.0; (lmax + 1) * n * m];
        for (a, &pa) in momenta.iter().enumerate() {
            for (i, &r) in rule.nodes.iter().enumerate() {
                let js = bessel_j_array(lmax, pa * r)?;
                for (l, &j) in js.iter().enumerate() {
                    jt[(l * n + a) * m + i] = j;
                }
            }
        }
        let wv: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&r, &w)| CONVENTION * w * r * r * p.evaluate(r))
            .collect();
        for (l, out) in values.iter_mut().enumerate() {
            let block = &jt[l * n * m..(l + 1) * n * m];
            let mut scaled = vec![0.0; m];
            for a in 0..n {
                let ja = &block[a * m..(a + 1) * m];
                for i in 0..m {
                    scaled[i] = ja[i] * wv[i];
                }
                for b in a..n {
                    let jb = &block[b * m..(b + 1) * m];
                    let s: f64 = scaled.iter().zip(jb).map(|(x, y)| x * y).sum();
                    out[a * n + b] = s;
                    out[b * n + a] = s;
                }
            }
        }
        Ok(Self {
            momenta: momenta.to_vec(),
            values,
        })
    }

    pub fn lmax(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, l: usize, a: usize, b: usize) -> f64 {
        self.values[l][a * self.momenta.len() + b]
    }
}

/// `t_l(p, p'; z)` on `grid ∪ {k0}`. Index `grid.len()` is the on-shell point.
#[derive(Debug, Clone, PartialEq)]
pub struct OffshellTable {
    pub l: usize,
    pub z: ComplexEnergy,
    pub momenta: Vec<f64>,
    pub values: CMatrix,
}

impl OffshellTable {
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn onshell_index(&self) -> usize {
        self.momenta.len() - 1
    }

    /// `t_l(k0, k0; z)`.
    pub fn onshell(&self) -> Complex64 {
        let i = self.onshell_index();
        self.values[(i, i)]
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.values[(a, b)]
    }

    /// Index of a stored momentum. Only table momenta are accepted, up to a
    /// relative rounding slack of `1e-12`.
    pub fn index_of(&self, p: f64) -> Result<usize> {
        let close = |q: f64| (q - p).abs() <= 1e-12 * p.abs();
        let k = self.onshell_index();
        if close(self.momenta[k]) {
            return Ok(k);
        }
        let pos = self.momenta[..k].partition_point(|&q| q < p);
        for i in [pos.wrapping_sub(1), pos] {
            if i < k && close(self.momenta[i]) {
                return Ok(i);
            }
        }
        Err(Error::OffGrid(p))
    }

    pub fn value(&self, p: f64, q: f64) -> Result<Complex64> {
        Ok(self.values[(self.index_of(p)?, self.index_of(q)?)])
    }
}

/// Solves for `t_l(p, p'; z)` on `grid ∪ {k0}`.
pub fn solve_offshell_t(
    p: &Potential,
    l: usize,
    z: &ComplexEnergy,
    grid: &MomentumGrid,
) -> Result<OffshellTable> {
    check_energy(z, grid)?;
    let kernels = KernelMatrices::build(p, l, &grid.augmented())?;
    solve_with_kernels(&kernels, l, z, grid)
}

fn check_energy(z: &ComplexEnergy, grid: &MomentumGrid) -> Result<()> {
    if z.k0 != grid.k0 {
        return Err(Error::precondition(
            "solve_offshell_t",
            alloc::format!("grid built for k0 = {} but z has k0 = {}", grid.k0, z.k0),
        ));
    }
    Ok(())
}

/// Nyström weights `D_i` such that the integral term becomes
/// `sum_i V(p, q_i) D_i t(q_i, p')` over the augmented grid.
fn resolvent_weights(z: &ComplexEnergy, grid: &MomentumGrid) -> Vec<Complex64> {
    let k0 = grid.k0;
    let mut d: Vec<Complex64> = Vec::with_capacity(grid.len() + 1);
    if z.eps > 0.0 {
        let zz = z.z();
        for (&q, &w) in grid.nodes.iter().zip(&grid.weights) {
            d.push(w * q * q / (zz - q * q));
        }
        d.push(Complex64::new(0.0, 0.0));
    } else {
        let k2 = k0 * k0;
        let mut counter = 0.0;
        for (&q, &w) in grid.nodes.iter().zip(&grid.weights) {
            d.push(Complex64::new(w * q * q / (k2 - q * q), 0.0));
            counter -= w * k2 / (k2 - q * q);
        }
        let pm = grid.p_max;
        let pv_tail = k0 * ((pm + k0) / (pm - k0)).ln() / 2.0;
        d.push(Complex64::new(counter + pv_tail, 0.0) - I * (PI * k0 / 2.0));
    }
    d
}

/// Solves on a grid whose augmented kernel matrices were built beforehand
/// (they do not depend on `eps`).
pub fn solve_with_kernels(
    kernels: &KernelMatrices,
    l: usize,
    z: &ComplexEnergy,
    grid: &MomentumGrid,
) -> Result<OffshellTable> {
    check_energy(z, grid)?;
    let momenta = grid.augmented();
    let n = momenta.len();
    if kernels.momenta != momenta || l > kernels.lmax() {
        return Err(Error::precondition(
            "solve_offshell_t",
            "kernel matrices do not match the grid",
        ));
    }
    let v = CMatrix::from_fn(n, n, |a, b| Complex64::new(kernels.get(l, a, b), 0.0));
    if v.max_abs() == 0.0 {
        return Ok(OffshellTable {
            l,
            z: *z,
            momenta,
            values: v,
        });
    }
    let d = resolvent_weights(z, grid);
    let a = CMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        delta - v[(i, j)] * d[j]
    });
    let lu = Lu::factor(a, POLE_TOL)?;
    let mut values = lu.solve_matrix(&v);
    // Symmetrize away roundoff; the exact discrete solution is symmetric.
    let t = values.clone();
    values = CMatrix::from_fn(n, n, |i, j| 0.5 * (t[(i, j)] + t[(j, i)]));
    Ok(OffshellTable {
        l,
        z: *z,
        momenta,
        values,
    })
}
