use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::{EnergySlice, Executor, Scenario, Sequential, Workspace};
use crate::greens::{structure_constants, ComplexEnergy};
use crate::lippmann::{MomentumGrid, OffshellTable};
use crate::potentials::Scatterer;
use crate::radial::{onshell_t_lm, phase_shift};
use crate::specfun::angular::AngularGrid;
use crate::specfun::harmonics::{legendre_all, lm_index, ylm_all};
use crate::{Error, Result, Vec3, I};

/// `sum_l t_l(p_a, p_b) (2l+1)/(4 pi) P_l(c)`.
fn partial_sum(tables: &[OffshellTable], a: usize, b: usize, c: f64) -> Complex64 {
    let p = legendre_all(tables.len() - 1, c.clamp(-1.0, 1.0));
    tables
        .iter()
        .enumerate()
        .map(|(l, t)| t.get(a, b) * ((2 * l + 1) as f64 / (4.0 * PI) * p[l]))
        .sum()
}

/// `<k1|t_j|k2>` for a scatterer centered at `sc.center`. Both `|k1|` and
/// `|k2|` must be momenta of the tables.
pub fn t_elem(sc: &Scatterer, tables: &[OffshellTable], k1: Vec3, k2: Vec3) -> Result<Complex64> {
    let t0 = tables
        .first()
        .ok_or_else(|| Error::precondition("t_elem", "no partial waves"))?;
    let a = t0.index_of(k1.norm())?;
    let b = t0.index_of(k2.norm())?;
    let c = if k1.norm() > 0.0 && k2.norm() > 0.0 {
        k1.unit().dot(k2.unit())
    } else {
        1.0
    };
    let phase = Complex64::cis(-(k1 - k2).dot(sc.center));
    Ok(phase * partial_sum(tables, a, b, c))
}

/// `(exp(i a (k - k0)) - 1) / (i a (k - k0))`, equal to 1 at `k = k0`.
///
/// This is the matrix element factor left by averaging
/// `exp(-i alpha sqrt(H0)) t exp(i alpha sqrt(H0))` over `alpha in [0, a]`.
pub fn sinc_window(a: f64, k: f64, k0: f64) -> Complex64 {
    let x = a * (k - k0);
    if x.abs() < 1e-4 {
        // Taylor series of (e^{ix} - 1) / (ix).
        Complex64::new(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0)
    } else {
        (Complex64::cis(x) - 1.0) / (I * x)
    }
}

fn polar_nodes(q: f64, dist: f64, degree: usize, margin: usize) -> usize {
    ((q * dist + degree as f64) / 2.0).ceil() as usize + margin
}

fn axis_of(d: Vec3) -> Vec3 {
    if d.norm() > 0.0 {
        d
    } else {
        Vec3::Z
    }
}

/// Radial integrand of `X_alpha` for one ordered pair at one energy:
/// `X_alpha = sum_i measure_i exp(i alpha q_i) angular_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairIntegrand {
    pub j: usize,
    pub h: usize,
    pub z: ComplexEnergy,
    pub nodes: Vec<f64>,
    /// `w_i q_i^2 / (z - q_i^2)`.
    pub measure: Vec<Complex64>,
    /// `int dOmega <k1|t_j|q_i Omega> <q_i Omega|t_h|k2>`.
    pub angular: Vec<Complex64>,
    /// Estimated magnitude of the integral beyond `p_max`.
    pub tail_estimate: f64,
}

impl PairIntegrand {
    pub fn build<E: Executor>(
        s: &Scenario,
        grid: &MomentumGrid,
        slice: &EnergySlice,
        j: usize,
        h: usize,
        exec: &E,
    ) -> Result<Self> {
        if j == h || j >= s.scatterers.len() || h >= s.scatterers.len() {
            return Err(Error::precondition(
                "x_alpha_direct",
                format!("invalid pair ({j}, {h})"),
            ));
        }
        if slice.z.is_on_shell() {
            return Err(Error::precondition(
                "x_alpha_direct",
                "direct quadrature needs eps > 0",
            ));
        }
        let (sj, sh) = (&s.scatterers[j], &s.scatterers[h]);
        let (tj, th) = (&slice.tables[j], &slice.tables[h]);
        let (k1, k2) = (s.k_out(), s.k_in());
        let (u1, u2) = (k1.unit(), k2.unit());
        let on = grid.len();
        let d = sj.center - sh.center;
        let axis = axis_of(d);
        let degree = tj.len() + th.len();
        let margin = s.numerics.angular_margin;
        let outer = Complex64::cis(-k1.dot(sj.center) + k2.dot(sh.center));
        let angular: Vec<Complex64> = exec.map(on, |i| {
            let q = grid.nodes[i];
            let ang = AngularGrid::product_about(
                polar_nodes(q, d.norm(), degree, margin),
                degree + 2,
                axis,
            );
            let mut acc = Complex64::new(0.0, 0.0);
            for (&w, &n) in ang.weights.iter().zip(&ang.nodes) {
                let fj = partial_sum(tj, on, i, u1.dot(n));
                let fh = partial_sum(th, i, on, n.dot(u2));
                acc += Complex64::cis(q * n.dot(d)) * fj * fh * w;
            }
            outer * acc
        });
        let z = slice.z.z();
        let measure: Vec<Complex64> = (0..on)
            .map(|i| grid.weights[i] * grid.nodes[i].powi(2) / (z - grid.nodes[i].powi(2)))
            .collect();
        let last = on.saturating_sub(grid.spec.per_panel);
        let peak = (last..on)
            .map(|i| (angular[i] * grid.nodes[i].powi(2) / (z - grid.nodes[i].powi(2))).norm())
            .fold(0.0, f64::max);
        let tail_estimate = peak * grid.p_max / 3.0;
        Ok(Self {
            j,
            h,
            z: slice.z,
            nodes: grid.nodes.clone(),
            measure,
            angular,
            tail_estimate,
        })
    }

    pub fn x_alpha(&self, alpha: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.measure)
            .zip(&self.angular)
            .map(|((&q, &m), &a)| m * a * Complex64::cis(alpha * q))
            .sum()
    }

    /// Fails when the tail estimate exceeds `tolerance * |X_0|`.
    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let scale = self.x_alpha(0.0).norm().max(f64::MIN_POSITIVE);
        let rel = self.tail_estimate / scale;
        if rel > tolerance {
            Err(Error::Tail {
                estimate: rel,
                tolerance,
            })
        } else {
            Ok(())
        }
    }
}

/// `X_alpha(z)` for the pair `(j, h)` by direct momentum quadrature at a
/// single energy with `eps > 0`.
pub fn x_alpha_direct(
    s: &Scenario,
    j: usize,
    h: usize,
    alpha: f64,
    z: ComplexEnergy,
) -> Result<Complex64> {
    s.validate()?;
    if z.is_on_shell() {
        return Err(Error::precondition(
            "x_alpha_direct",
            "direct quadrature needs eps > 0",
        ));
    }
    let ws = Workspace::build(s, &[z.eps], &Sequential)?;
    let pair = PairIntegrand::build(s, &ws.grid, &ws.slices[0], j, h, &Sequential)?;
    pair.check_tail(s.numerics.tolerances.tail)?;
    Ok(pair.x_alpha(alpha))
}

/// `Y_alpha(z) = exp(-i alpha k0) X_alpha(z)`.
pub fn y_alpha(
    s: &Scenario,
    j: usize,
    h: usize,
    alpha: f64,
    z: ComplexEnergy,
) -> Result<Complex64> {
    Ok(Complex64::cis(-alpha * s.k0) * x_alpha_direct(s, j, h, alpha, z)?)
}

/// On-shell structure-constant value of `X_0` and its truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructconstSum {
    pub value: Complex64,
    /// `|S(lmax) - S(lmax - 1)|`.
    pub truncation_delta: f64,
    /// The `l = l' = 0` term alone.
    pub s_wave: Complex64,
    pub lmax: usize,
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// `X_0(k0^2 + i0)` from on-shell amplitudes and structure constants:
///
/// `(2/pi) exp(-i k1.x_j) exp(i k2.x_h) sum_{LL'} (-i)^l i^l' Y_L(k1^)
///  g_{L;L'}(k0, x_h - x_j) conj(Y_L'(k2^)) t_l^j t_l'^h`.
///
/// Requires disjoint effective supports.
pub fn x0_structconst(s: &Scenario, j: usize, h: usize) -> Result<StructconstSum> {
    s.validate()?;
    if j == h || j >= s.scatterers.len() || h >= s.scatterers.len() {
        return Err(Error::precondition(
            "x0_structconst",
            format!("invalid pair ({j}, {h})"),
        ));
    }
    let (sj, sh) = (&s.scatterers[j], &s.scatterers[h]);
    let gap = sj.gap(sh);
    if !(gap > 0.0) {
        return Err(Error::precondition(
            "x0_structconst",
            format!("supports of scatterers {j} and {h} overlap (gap {gap:.3e})"),
        ));
    }
    let lmax = s.numerics.lmax_sum;
    let k0 = s.k0;
    let tau = |p: &Scatterer| -> Result<Vec<Complex64>> {
        (0..=lmax)
            .map(|l| Ok(onshell_t_lm(phase_shift(&p.potential, l, k0)?, k0)))
            .collect()
    };
    let (tj, th) = (tau(sj)?, tau(sh)?);
    let g = structure_constants(k0, sh.center - sj.center, lmax)?;
    let (k1, k2) = (s.k_out(), s.k_in());
    let y1 = ylm_all(lmax, k1.unit());
    let y2 = ylm_all(lmax, k2.unit());
    let pref = (2.0 / PI) * Complex64::cis(-k1.dot(sj.center) + k2.dot(sh.center));
    // Partial sums over the square l, l' <= L for every L.
    let mut shells = alloc::vec![Complex64::new(0.0, 0.0); lmax + 1];
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let left = i_pow(-(l as i64)) * y1[lm_index(l, m)] * tj[l];
            for lp in 0..=lmax {
                for mp in -(lp as i64)..=(lp as i64) {
                    let right = i_pow(lp as i64) * y2[lm_index(lp, mp)].conj() * th[lp];
                    shells[l.max(lp)] +=
                        left * g.entries[(lm_index(l, m), lm_index(lp, mp))] * right;
                }
            }
        }
    }
    let value: Complex64 = pref * shells.iter().sum::<Complex64>();
    let truncation_delta = (pref * shells[lmax]).norm();
    let s_wave = pref * tj[0] * g.get(0, 0, 0, 0) * th[0] * y1[0] * y2[0].conj();
    Ok(StructconstSum {
        value,
        truncation_delta,
        s_wave,
        lmax,
    })
}

/// Leg of a chain projected onto the harmonics of the middle scatterer.
///
/// Left (`outer = j`): `U_{i,L} = int dOmega <k1|t_j|q_i Omega> exp(-i q_i Omega.x_h) Y_L(Omega)`.
/// Right (`outer = k`): `V_{i,L} = int dOmega exp(i q_i Omega.x_h) <q_i Omega|t_k|k2> conj(Y_L(Omega))`.
fn projected_leg<E: Executor>(
    s: &Scenario,
    grid: &MomentumGrid,
    slice: &EnergySlice,
    outer: usize,
    mid: usize,
    left: bool,
    exec: &E,
) -> Vec<Vec<Complex64>> {
    let so = &s.scatterers[outer];
    let xh = s.scatterers[mid].center;
    let to = &slice.tables[outer];
    let lmid = slice.tables[mid].len() - 1;
    let on = grid.len();
    let (k1, k2) = (s.k_out(), s.k_in());
    let d = if left { so.center - xh } else { xh - so.center };
    let axis = axis_of(d);
    let degree = to.len() + lmid;
    let margin = s.numerics.angular_margin;
    let (outer_phase, dir) = if left {
        (Complex64::cis(-k1.dot(so.center)), k1.unit())
    } else {
        (Complex64::cis(k2.dot(so.center)), k2.unit())
    };
    exec.map(on, |i| {
        let q = grid.nodes[i];
        let ang =
            AngularGrid::product_about(polar_nodes(q, d.norm(), degree, margin), degree + 2, axis);
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); (lmid + 1) * (lmid + 1)];
        for (&w, &n) in ang.weights.iter().zip(&ang.nodes) {
            let f = if left {
                partial_sum(to, on, i, dir.dot(n))
            } else {
                partial_sum(to, i, on, n.dot(dir))
            };
            let v = Complex64::cis(q * n.dot(d)) * f * w;
            let y = ylm_all(lmid, n);
            for (a, yl) in acc.iter_mut().zip(&y) {
                *a += v * if left { *yl } else { yl.conj() };
            }
        }
        acc.iter().map(|a| outer_phase * a).collect()
    })
}

/// `<k1| t_j R0 t_h R0 t_k |k2>` through the partial-wave expansion of `t_h`.
fn chain3<E: Executor>(
    s: &Scenario,
    grid: &MomentumGrid,
    slice: &EnergySlice,
    (j, h, k): (usize, usize, usize),
    exec: &E,
) -> Complex64 {
    let u = projected_leg(s, grid, slice, j, h, true, exec);
    let v = projected_leg(s, grid, slice, k, h, false, exec);
    let z = slice.z.z();
    let n = grid.len();
    let dm: Vec<Complex64> = (0..n)
        .map(|i| grid.weights[i] * grid.nodes[i].powi(2) / (z - grid.nodes[i].powi(2)))
        .collect();
    let th = &slice.tables[h];
    let mut total = Complex64::new(0.0, 0.0);
    for (l, t) in th.iter().enumerate() {
        for m in -(l as i64)..=(l as i64) {
            let c = lm_index(l, m);
            let b: Vec<Complex64> = (0..n).map(|i| dm[i] * v[i][c]).collect();
            for a in 0..n {
                let row = t.values.row(a);
                let inner: Complex64 = row[..n].iter().zip(&b).map(|(x, y)| x * y).sum();
                total += dm[a] * u[a][c] * inner;
            }
        }
    }
    total
}

/// Order-`n` term of the multiple-scattering series at the energy of
/// `ws.slices[slice]`: the sum over chains `t_j1 R0 t_j2 ... R0 t_jn` with
/// consecutive indices distinct. Orders 1 to 3 are available.
pub fn born_series_term<E: Executor>(
    s: &Scenario,
    ws: &Workspace,
    slice: usize,
    n: usize,
    exec: &E,
) -> Result<Complex64> {
    const MAX_ORDER: usize = 3;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            max: MAX_ORDER,
        });
    }
    let sl = ws
        .slices
        .get(slice)
        .ok_or_else(|| Error::precondition("born_series_term", "no such energy"))?;
    let count = s.scatterers.len();
    let (k1, k2) = (s.k_out(), s.k_in());
    match n {
        1 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (sc, tables) in s.scatterers.iter().zip(&sl.tables) {
                acc += t_elem(sc, tables, k1, k2)?;
            }
            Ok(acc)
        }
        2 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..count {
                for h in (0..count).filter(|&h| h != j) {
                    acc += PairIntegrand::build(s, &ws.grid, sl, j, h, exec)?.x_alpha(0.0);
                }
            }
            Ok(acc)
        }
        _ => {
            if sl.z.is_on_shell() {
                return Err(Error::precondition("born_series_term", "needs eps > 0"));
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..count {
                for h in (0..count).filter(|&h| h != j) {
                    for k in (0..count).filter(|&k| k != h) {
                        acc += chain3(s, &ws.grid, sl, (j, h, k), exec);
                    }
                }
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Potential;

    fn pair_scenario() -> Scenario {
        let well = Potential::SquareWell { v0: -1.0, a: 1.0 };
        let mut s = Scenario::new(
            alloc::vec![
                Scatterer::new(Vec3::ZERO, well),
                Scatterer::new(Vec3::new(0.0, 0.0, 3.0), well)
            ],
            3,
            1.0,
            Vec3::Z,
            Vec3::new(1.0, 0.0, 1.0),
        );
        s.numerics.p_max = Some(8.0);
        s.numerics.momentum_nodes = 6;
        s
    }

    #[test]
    fn projected_leg_reproduces_pair_integral() {
        // Closing the right leg on shell turns the chain into X_0.
        let s = pair_scenario();
        let ws = Workspace::build(&s, &[0.2], &Sequential).unwrap();
        let sl = &ws.slices[0];
        let direct = PairIntegrand::build(&s, &ws.grid, sl, 0, 1, &Sequential)
            .unwrap()
            .x_alpha(0.0);
        let u = projected_leg(&s, &ws.grid, sl, 0, 1, true, &Sequential);
        let n = ws.grid.len();
        let z = sl.z.z();
        let k2 = s.k_in();
        let y2 = ylm_all(3, k2.unit());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let dm = ws.grid.weights[i] * ws.grid.nodes[i].powi(2) / (z - ws.grid.nodes[i].powi(2));
            for (l, t) in sl.tables[1].iter().enumerate() {
                for m in -(l as i64)..=(l as i64) {
                    acc += dm * u[i][lm_index(l, m)] * t.get(i, n) * y2[lm_index(l, m)].conj();
                }
            }
        }
        acc *= Complex64::cis(k2.dot(s.scatterers[1].center));
        assert!(
            (acc - direct).norm() < 1e-10 * direct.norm(),
            "{acc} vs {direct}"
        );
    }

    #[test]
    fn t_elem_is_translation_covariant() {
        let s = pair_scenario();
        let ws = Workspace::build(&s, &[0.1], &Sequential).unwrap();
        let t = &ws.slices[0].tables[0];
        let (k1, k2) = (s.k_out(), s.k_in());
        let a = t_elem(&s.scatterers[0], t, k1, k2).unwrap();
        let shifted = Scatterer::new(Vec3::new(0.4, -1.0, 2.0), s.scatterers[0].potential);
        let b = t_elem(&shifted, t, k1, k2).unwrap();
        assert!((b - a * Complex64::cis(-(k1 - k2).dot(shifted.center))).norm() < 1e-14);
        assert!(matches!(
            t_elem(&shifted, t, k1 * 1.01, k2),
            Err(Error::OffGrid(_))
        ));
    }

    #[test]
    fn order_limits() {
        let s = pair_scenario();
        let ws = Workspace::build(&s, &[0.1], &Sequential).unwrap();
        assert!(matches!(
            born_series_term(&s, &ws, 0, 4, &Sequential),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            born_series_term(&s, &ws, 0, 0, &Sequential),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn sinc_window_values() {
        assert_eq!(sinc_window(3.0, 1.2, 1.2), Complex64::new(1.0, 0.0));
        assert!(sinc_window(1.0, 1.0 + 2.0 * PI, 1.0).norm() < 1e-15);
        for &x in &[1e-5, 2e-4, 0.3, 5.0] {
            let w = sinc_window(1.0, 1.0 + x, 1.0);
            let exact = (Complex64::cis(x) - 1.0) / (I * x);
            assert!((w - exact).norm() < 1e-12, "{x}");
        }
    }
}
