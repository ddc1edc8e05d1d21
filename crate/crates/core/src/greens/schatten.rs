//! Schatten-4 norm of the two-center kernel
//! `K~(z)(x, y) = phi_j(x) exp(i sqrt(z)|x-y|) / (4 pi i |x-y|) phi_h(y)`.
//!
//! Two discretizations are available.
//!
//! * Direct: product grids (radial Gauss × polar Gauss × uniform azimuth)
//!   sharing a polar axis along the separation, so the weighted kernel matrix
//!   is block-circulant in the azimuth and splits into Fourier blocks `B_m`
//!   with `||K||_4^4 = sum_m ||B_m^* B_m||_F^2`. Overlapping pairs use one grid
//!   about the midpoint; the integrable diagonal singularity is replaced by its
//!   integral over a ball of the cell's volume.
//! * Partial wave (disjoint supports, `eps = 0`): with the two-center expansion
//!   of the Green's function, `||K||_4 = ||Da^{1/2} g Db^{1/2}||_4` where
//!   `Da_l = int |V_j| j_l(kr)^2 r^2 dr`. The axial blocks `g^(m)` are obtained
//!   by projecting the closed-form Green's function onto spheres around the
//!   two centers, which avoids Gaunt sums at high `l`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::ComplexEnergy;
use crate::linalg::{fft, CMatrix};
use crate::potentials::Scatterer;
use crate::quadrature::{gauss_legendre, panels, Rule};
use crate::specfun::bessel::{bessel_j_array, L_MAX_SUPPORTED};
use crate::specfun::harmonics::assoc_legendre_normalized;
use crate::{Error, Result, I};

/// Relative change between a norm and its refinement above which the
/// estimate is rejected.
pub const REFINEMENT_TOL: f64 = 0.05;

/// Relative potential level below which a grid may be truncated.
const PHI_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenRoute {
    Direct,
    PartialWave,
}

/// Node counts for the direct discretization (per scatterer or shared grid).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOrders {
    pub n_radial: usize,
    pub n_theta: usize,
    /// Power of two.
    pub n_phi: usize,
}

impl GridOrders {
    /// Modest default resolving the wavelength `2 pi / k` over a region of
    /// radius `extent`.
    pub fn for_problem(k: f64, extent: f64) -> Self {
        let waves = k * extent / PI;
        let n_radial = (8.0 * ((waves + 1.0) / 2.0).ceil()).max(8.0) as usize;
        let n_theta = ((1.5 * waves).ceil() as usize + 6).max(8);
        let n_phi = (2 * n_theta).next_power_of_two().max(16);
        Self {
            n_radial,
            n_theta,
            n_phi,
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_radial: 2 * self.n_radial,
            n_theta: 2 * self.n_theta,
            n_phi: 2 * self.n_phi,
        }
    }
}

/// A pair `(j, h)`, a spectral parameter and the grid used to discretize
/// `K~(z)` on their supports.
#[derive(Debug, Clone, PartialEq)]
pub struct KtildeDiscretization {
    pub j: Scatterer,
    pub h: Scatterer,
    pub z: ComplexEnergy,
    pub route: SchattenRoute,
    pub orders: GridOrders,
    /// Resolution level of the partial-wave route (0 = base).
    pub level: usize,
}

/// A Schatten-norm value together with its refinement check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenEstimate {
    pub value: f64,
    pub refined: f64,
    /// `|refined - value| / refined` (0 when both vanish).
    pub delta: f64,
    pub route: SchattenRoute,
}

fn support_radius(s: &Scatterer) -> f64 {
    s.potential.effective_radius()
}

/// Radius beyond which `|phi| < PHI_FLOOR * max |phi|`.
fn phi_radius(s: &Scatterer) -> f64 {
    let p = &s.potential;
    let outer = support_radius(s);
    let peak = (0..=400)
        .map(|i| p.evaluate(outer * i as f64 / 400.0).abs())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let level = PHI_FLOOR * PHI_FLOOR * peak;
    let mut r = outer;
    let step = outer / 400.0;
    while r > step && p.evaluate(r - step).abs() < level {
        r -= step;
    }
    r.min(outer)
}

impl KtildeDiscretization {
    /// Picks the partial-wave route for well separated pairs on the real
    /// axis and the direct grid otherwise.
    pub fn new(j: Scatterer, h: Scatterer, z: ComplexEnergy) -> Self {
        let dist = (h.center - j.center).norm();
        let gap = dist - support_radius(&j) - support_radius(&h);
        let route = if z.eps == 0.0 && gap > 0.05 * dist {
            SchattenRoute::PartialWave
        } else {
            SchattenRoute::Direct
        };
        let extent = if j.gap(&h) > 0.0 {
            phi_radius(&j).max(phi_radius(&h))
        } else {
            0.5 * dist + phi_radius(&j).max(phi_radius(&h))
        };
        let orders = GridOrders::for_problem(z.sqrt_z().norm(), extent);
        Self {
            j,
            h,
            z,
            route,
            orders,
            level: 0,
        }
    }

    pub fn with_route(mut self, route: SchattenRoute) -> Self {
        self.route = route;
        self
    }

    pub fn with_orders(mut self, orders: GridOrders) -> Self {
        self.orders = orders;
        self
    }

    pub fn refined(&self) -> Self {
        Self {
            orders: self.orders.doubled(),
            level: self.level + 1,
            ..self.clone()
        }
    }

    /// Norm at this resolution only.
    pub fn evaluate(&self) -> Result<f64> {
        if self.j.potential.is_zero() || self.h.potential.is_zero() {
            return Ok(0.0);
        }
        match self.route {
            SchattenRoute::Direct => direct_norm(self),
            SchattenRoute::PartialWave => partial_wave_norm(self),
        }
    }
}

/// `||K~(z)||_4` with a refinement check; fails with [`Error::Refinement`] if
/// the refined value moves by more than [`REFINEMENT_TOL`].
pub fn schatten4_norm(d: &KtildeDiscretization) -> Result<SchattenEstimate> {
    let value = d.evaluate()?;
    let refined = d.refined().evaluate()?;
    let delta = if refined == 0.0 && value == 0.0 {
        0.0
    } else {
        (refined - value).abs() / refined.abs()
    };
    if !(delta <= REFINEMENT_TOL) {
        return Err(Error::Refinement {
            coarse: value,
            refined,
        });
    }
    Ok(SchattenEstimate {
        value,
        refined,
        delta,
        route: d.route,
    })
}

/// `(sum_b ||B_b^* B_b||_F^2 * mult_b)^{1/4}` for a block-diagonal operator.
pub fn schatten4_blocks(blocks: &[(CMatrix, f64)]) -> f64 {
    blocks
        .iter()
        .map(|(b, mult)| mult * b.gram().frobenius_sq())
        .sum::<f64>()
        .powf(0.25)
}

/// Schatten-4 norm of the integral operator with kernel `kernel(x_a, y_b)`
/// discretized on weighted point sets.
pub fn schatten4_kernel(
    kernel: impl Fn(usize, usize) -> Complex64,
    x_weights: &[f64],
    y_weights: &[f64],
) -> f64 {
    let a = CMatrix::from_fn(x_weights.len(), y_weights.len(), |i, j| {
        kernel(i, j) * (x_weights[i] * y_weights[j]).sqrt()
    });
    schatten4_blocks(&[(a, 1.0)])
}

/// Ring of grid points sharing radius and polar angle about the common axis.
#[derive(Debug, Clone, Copy)]
struct Ring {
    /// Axial coordinate.
    zc: f64,
    /// Distance from the axis.
    rho: f64,
    /// Quadrature weight of one point on the ring.
    weight: f64,
    phi: Complex64,
    /// Identifier shared by coincident rings of a common grid.
    id: usize,
}

fn rings_about(
    center_z: f64,
    radial: &Rule,
    n_theta: usize,
    n_phi: usize,
    amp: impl Fn(f64, f64) -> Complex64,
) -> Vec<Ring> {
    let gl = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::new();
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        for (&mu, &wm) in gl.nodes.iter().zip(&gl.weights) {
            let zc = center_z + r * mu;
            let rho = r * (1.0 - mu * mu).max(0.0).sqrt();
            let id = out.len();
            out.push(Ring {
                zc,
                rho,
                weight: wr * r * r * wm * dphi,
                phi: amp(zc, rho),
                id,
            });
        }
    }
    out
}

fn radial_rule(radius: f64, breaks: &[f64], n: usize) -> Rule {
    let per_panel = 8usize;
    let count = n.div_ceil(per_panel).max(1);
    panels(
        0.0,
        radius,
        breaks,
        radius / count as f64 * 1.0000001,
        per_panel,
    )
}

/// `int_{|y| < rho} exp(i s |y|) / (4 pi i |y|) dy`.
fn self_cell(s: Complex64, rho: f64) -> Complex64 {
    let x = s * rho;
    let integral = if x.norm() < 1e-3 {
        rho * rho / 2.0 + I * s * rho * rho * rho / 3.0
    } else {
        (I * x).exp() * (rho / (I * s) + 1.0 / (s * s)) - 1.0 / (s * s)
    };
    integral / I
}

fn direct_norm(d: &KtildeDiscretization) -> Result<f64> {
    let GridOrders {
        n_radial,
        n_theta,
        n_phi,
    } = d.orders;
    if !n_phi.is_power_of_two() || n_theta == 0 || n_radial == 0 {
        return Err(Error::Config(alloc::format!(
            "invalid grid orders {:?}",
            d.orders
        )));
    }
    let sep = d.h.center - d.j.center;
    let dist = sep.norm();
    // Axial coordinates: j at 0, h at dist.
    let pot_j = d.j.potential;
    let pot_h = d.h.potential;
    let amp_j = |zc: f64, rho: f64| pot_j.phi((zc * zc + rho * rho).sqrt());
    let amp_h = |zc: f64, rho: f64| pot_h.phi(((zc - dist) * (zc - dist) + rho * rho).sqrt());
    let shared = d.j.gap(&d.h) <= 0.0;
    let (xs, ys) = if shared {
        let mid = 0.5 * dist;
        let radius = mid + phi_radius(&d.j).max(phi_radius(&d.h));
        let rule = radial_rule(radius, &[], n_radial);
        let all = rings_about(mid, &rule, n_theta, n_phi, |_, _| Complex64::new(0.0, 0.0));
        let xs: Vec<Ring> = all
            .iter()
            .map(|r| Ring {
                phi: amp_j(r.zc, r.rho),
                ..*r
            })
            .collect();
        let ys: Vec<Ring> = all
            .iter()
            .map(|r| Ring {
                phi: amp_h(r.zc, r.rho),
                ..*r
            })
            .collect();
        (xs, ys)
    } else {
        let rj = radial_rule(phi_radius(&d.j), &pot_j.breakpoints(), n_radial);
        let rh = radial_rule(phi_radius(&d.h), &pot_h.breakpoints(), n_radial);
        let offset = usize::MAX / 2;
        let xs = rings_about(0.0, &rj, n_theta, n_phi, amp_j);
        let ys: Vec<Ring> = rings_about(dist, &rh, n_theta, n_phi, amp_h)
            .into_iter()
            .map(|r| Ring {
                id: r.id + offset,
                ..r
            })
            .collect();
        (xs, ys)
    };
    let keep = |rs: Vec<Ring>| -> Vec<Ring> {
        let peak = rs.iter().fold(0.0f64, |m, r| m.max(r.phi.norm()));
        rs.into_iter()
            .filter(|r| r.phi.norm() > PHI_FLOOR * peak)
            .collect()
    };
    let xs = keep(xs);
    let ys = keep(ys);
    let s = d.z.sqrt_z();
    let half = n_phi / 2;
    let mut blocks: Vec<CMatrix> = (0..=half)
        .map(|_| CMatrix::zeros(xs.len(), ys.len()))
        .collect();
    let dphi = 2.0 * PI / n_phi as f64;
    let cos_table: Vec<f64> = (0..n_phi).map(|i| (dphi * i as f64).cos()).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n_phi];
    for (a, x) in xs.iter().enumerate() {
        for (b, y) in ys.iter().enumerate() {
            let pref = x.phi * y.phi * (x.weight * y.weight).sqrt() / (4.0 * PI * I);
            let dz = x.zc - y.zc;
            for (delta, slot) in line.iter_mut().enumerate() {
                let r2 = dz * dz + x.rho * x.rho + y.rho * y.rho
                    - 2.0 * x.rho * y.rho * cos_table[delta];
                let r = r2.max(0.0).sqrt();
                *slot = if x.id == y.id && delta == 0 {
                    let cell = (3.0 * x.weight / (4.0 * PI)).powf(1.0 / 3.0);
                    x.phi * y.phi * self_cell(s, cell)
                } else {
                    pref * (I * s * r).exp() / r
                };
            }
            fft(&mut line);
            for (m, block) in blocks.iter_mut().enumerate() {
                block[(a, b)] = line[m];
            }
        }
    }
    let weighted: Vec<(CMatrix, f64)> = blocks
        .into_iter()
        .enumerate()
        .map(|(m, b)| (b, if m == 0 || m == half { 1.0 } else { 2.0 }))
        .collect();
    Ok(schatten4_blocks(&weighted))
}

/// `int_0^a |V(r)| j_l(k r)^2 r^2 dr` for `l = 0..=lmax`.
fn radial_moments(s: &Scatterer, k: f64, lmax: usize) -> Result<Vec<f64>> {
    let p = &s.potential;
    let a = support_radius(s);
    let width = (1.0 / k).min(0.25 * p.range()).min(0.5 * a);
    let rule = panels(0.0, a, &p.breakpoints(), width, 16);
    let mut out = vec![0.0; lmax + 1];
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = p.evaluate(r).abs();
        if v == 0.0 {
            continue;
        }
        let js = bessel_j_array(lmax, k * r)?;
        for (o, j) in out.iter_mut().zip(js) {
            *o += w * v * j * j * r * r;
        }
    }
    Ok(out)
}

/// `int int conj(Y_lm(x^)) G(x, y) Y_l'm(y^)` for `x` on the sphere of radius
/// `r1` about the origin and `y` on the sphere of radius `r2` about `dist z^`,
/// `G = -exp(ikd)/(4 pi d)`, for `0 <= m <= lmax`. Entry `[m]` is indexed
/// `(l - m, l' - m)`.
fn axial_projections(
    k: f64,
    dist: f64,
    r1: f64,
    r2: f64,
    lmax: usize,
    n_theta: usize,
    n_phi: usize,
) -> Vec<CMatrix> {
    let gl = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let cos_table: Vec<f64> = (0..n_phi).map(|i| (dphi * i as f64).cos()).collect();
    // hat[m][(i1, i2)] = int exp(-i m D) G(mu1, mu2, D) dD
    let mut hat: Vec<CMatrix> = (0..=lmax)
        .map(|_| CMatrix::zeros(n_theta, n_theta))
        .collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n_phi];
    for (i1, &mu1) in gl.nodes.iter().enumerate() {
        let z1 = r1 * mu1;
        let s1 = r1 * (1.0 - mu1 * mu1).max(0.0).sqrt();
        for (i2, &mu2) in gl.nodes.iter().enumerate() {
            let z2 = dist + r2 * mu2;
            let s2 = r2 * (1.0 - mu2 * mu2).max(0.0).sqrt();
            let dz = z1 - z2;
            for (slot, &c) in line.iter_mut().zip(&cos_table) {
                let d = (dz * dz + s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * c).sqrt();
                *slot = -(I * k * d).exp() / (4.0 * PI * d) * dphi;
            }
            fft(&mut line);
            for (m, h) in hat.iter_mut().enumerate() {
                h[(i1, i2)] = line[m];
            }
        }
    }
    let mut out = Vec::with_capacity(lmax + 1);
    for (m, h) in hat.iter().enumerate() {
        let count = lmax - m + 1;
        // a[(l - m, i)] = w_i Pbar_l^m(mu_i)
        let mut a = CMatrix::zeros(count, n_theta);
        for (i, (&mu, &w)) in gl.nodes.iter().zip(&gl.weights).enumerate() {
            let pb = assoc_legendre_normalized(lmax, m, mu);
            for (l, &v) in pb.iter().enumerate() {
                a[(l, i)] = Complex64::new(w * v, 0.0);
            }
        }
        let left = a.matmul(h);
        let mut proj = left.matmul(&a.transpose());
        proj.scale(Complex64::new(2.0 * PI, 0.0));
        out.push(proj);
    }
    out
}

fn partial_wave_norm(d: &KtildeDiscretization) -> Result<f64> {
    if d.z.eps != 0.0 {
        return Err(Error::precondition(
            "schatten4_norm",
            "the partial-wave route needs eps = 0",
        ));
    }
    let k = d.z.k0;
    let dist = (d.h.center - d.j.center).norm();
    let (aj, ah) = (support_radius(&d.j), support_radius(&d.h));
    let gap = dist - aj - ah;
    if !(gap > 0.0) {
        return Err(Error::precondition(
            "schatten4_norm",
            "the partial-wave route needs disjoint supports",
        ));
    }
    let level = d.level as f64;
    // Spheres just outside each support keep the expansion rapidly
    // convergent; the second radius sits a quarter wavelength further out so
    // that zeros of j_l(k rho) never coincide.
    let frac = 0.1 + 0.05 * level;
    let shift = (PI / (2.0 * k)).min(0.1 * gap);
    let radii_j = [aj + frac * gap, aj + frac * gap + shift];
    let radii_h = [ah + frac * gap, ah + frac * gap + shift];

    let cap = L_MAX_SUPPORTED - 10;
    let dj = radial_moments(&d.j, k, cap)?;
    let dh = radial_moments(&d.h, k, cap)?;
    let cutoff = |mom: &[f64]| {
        let top = mom.iter().cloned().fold(0.0, f64::max);
        mom.iter().rposition(|&v| v > 1e-16 * top).unwrap_or(0)
    };
    let lmax = (cutoff(&dj).max(cutoff(&dh)) + 2 + 4 * d.level).min(cap);
    if lmax == cap {
        return Err(Error::domain(
            "schatten4_norm",
            "angular momentum cutoff exceeds the supported range",
        ));
    }

    // Quadrature orders from the decay of the sphere-to-sphere expansion.
    let (rj, rh) = (radii_j[1], radii_h[1]);
    let q = (rj / (dist - rh)).max(rh / (dist - rj));
    let spread = (k * rj.max(rh) + 37.0 / -q.ln()).ceil() as usize;
    let n_theta = ((lmax + spread) / 2 + 8 + 8 * d.level).min(1024);
    let n_phi = (lmax + spread + 2).next_power_of_two();

    // Per l, the projection radius where |j_l(k rho)| is largest.
    let choose = |radii: &[f64; 2]| -> Result<(Vec<usize>, [Vec<f64>; 2])> {
        let a = bessel_j_array(lmax, k * radii[0])?;
        let b = bessel_j_array(lmax, k * radii[1])?;
        let pick = (0..=lmax)
            .map(|l| {
                if (a[l] * radii[0]).abs() >= (b[l] * radii[1]).abs() {
                    0
                } else {
                    1
                }
            })
            .collect();
        Ok((pick, [a, b]))
    };
    let (pick_j, jj) = choose(&radii_j)?;
    let (pick_h, jh) = choose(&radii_h)?;
    let mut proj: [[Vec<CMatrix>; 2]; 2] = Default::default();
    for a in 0..2 {
        for b in 0..2 {
            let used = pick_j.contains(&a) && pick_h.contains(&b);
            if used {
                proj[a][b] =
                    axial_projections(k, dist, radii_j[a], radii_h[b], lmax, n_theta, n_phi);
            }
        }
    }
    let mut blocks = Vec::with_capacity(lmax + 1);
    for m in 0..=lmax {
        let count = lmax - m + 1;
        let block = CMatrix::from_fn(count, count, |i, j| {
            let (l1, l2) = (i + m, j + m);
            let (a, b) = (pick_j[l1], pick_h[l2]);
            let g = proj[a][b][m][(i, j)] / (jj[a][l1] * jh[b][l2]);
            g * (dj[l1] * dh[l2]).sqrt()
        });
        blocks.push((block, if m == 0 { 1.0 } else { 2.0 }));
    }
    Ok(schatten4_blocks(&blocks))
}
