//! Multiple-scattering matrix elements for a set of centered potentials.
//!
//! For scatterers `j != h` with on-shell momenta `k1 = k0 dir_out` and
//! `k2 = k0 dir_in` the central object is
//!
//! `X_alpha(z) = int d^3q <k1|t_j(z)|q> exp(i alpha |q|) / (z - q^2) <q|t_h(z)|k2>`
//!
//! evaluated by direct quadrature over the off-shell partial-wave tables at
//! `z = k0^2 + i eps`, followed by extrapolation to `eps -> 0`. The
//! on-shell structure-constant sum gives the same `X_0` for separated
//! supports, and `Y_alpha = exp(-i alpha k0) X_alpha` does not depend on
//! `alpha` on shell.

mod amplitudes;
mod extrapolate;
mod verify;

pub use amplitudes::{
    born_series_term, sinc_window, t_elem, x0_structconst, x_alpha_direct, y_alpha, PairIntegrand,
    StructconstSum,
};
pub use extrapolate::{eps_extrapolate, Extrapolation};
pub use verify::{
    verify_scenario, verify_scenario_with, AlphaSample, BornTerm, Check, Diagnostics, PairGap,
    PairReport, SchattenReport, VerificationReport,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::greens::ComplexEnergy;
use crate::lippmann::{
    solve_with_kernels, suggest_p_max, GridSpec, KernelMatrices, MomentumGrid, OffshellTable,
};
use crate::potentials::{Potential, Scatterer};
use crate::{Error, Result, Vec3};

/// Runs independent work items; implementations may use threads but must
/// return results in index order.
pub trait Executor: Sync {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs items one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Pass/fail thresholds of [`verify_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative difference between direct and structure-constant `X_0`.
    pub onshell: f64,
    /// Phase-law error `|arg(X_alpha / X_0) - alpha k0|`.
    pub phase: f64,
    /// `max_alpha |Y_alpha - Y_0| / |Y_0|`.
    pub flatness: f64,
    /// Momentum tail estimate relative to `|X_0|`.
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            onshell: 1e-3,
            phase: 1e-3,
            flatness: 1e-2,
            tail: 1e-4,
        }
    }
}

/// Which comparisons decide [`VerificationReport::passed`]. Disabled
/// comparisons are still computed and reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSelection {
    pub onshell_equivalence: bool,
    pub phase_law: bool,
    pub alpha_flatness: bool,
    pub tail: bool,
}

impl Default for CheckSelection {
    fn default() -> Self {
        Self {
            onshell_equivalence: true,
            phase_law: true,
            alpha_flatness: true,
            tail: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    /// Absolute imaginary parts `eps` of the sampled energies.
    pub eps_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    /// Momentum cutoff; chosen from the kernel decay when absent.
    pub p_max: Option<f64>,
    /// Upper bound for the automatic cutoff.
    pub p_max_cap: f64,
    /// Gauss–Legendre nodes per momentum panel.
    pub momentum_nodes: usize,
    /// Extra polar nodes on top of the band limit of the angular integrands.
    pub angular_margin: usize,
    /// Truncation of the structure-constant double sum.
    pub lmax_sum: usize,
    /// Highest multiple-scattering order reported.
    pub n_max: usize,
    /// Whether to estimate the Schatten-4 norms of the pair kernels.
    pub schatten: bool,
    pub tolerances: Tolerances,
    pub checks: CheckSelection,
}

impl Numerics {
    /// Defaults for on-shell momentum `k0`.
    pub fn for_k0(k0: f64) -> Self {
        let e = k0 * k0;
        Self {
            eps_list: (0..5).map(|i| 0.05 * e / (1u32 << i) as f64).collect(),
            alpha_list: (0..=8).map(|i| 0.25 * i as f64).collect(),
            p_max: None,
            p_max_cap: 40.0,
            momentum_nodes: 10,
            angular_margin: 16,
            lmax_sum: 8,
            n_max: 3,
            schatten: true,
            tolerances: Tolerances::default(),
            checks: CheckSelection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scatterers: Vec<Scatterer>,
    /// Partial-wave cutoff of each scatterer's t-matrix.
    pub lmax: Vec<usize>,
    pub k0: f64,
    pub dir_in: Vec3,
    pub dir_out: Vec3,
    pub numerics: Numerics,
}

impl Scenario {
    pub fn new(
        scatterers: Vec<Scatterer>,
        lmax: usize,
        k0: f64,
        dir_in: Vec3,
        dir_out: Vec3,
    ) -> Self {
        let n = scatterers.len();
        Self {
            scatterers,
            lmax: alloc::vec![lmax; n],
            k0,
            dir_in,
            dir_out,
            numerics: Numerics::for_k0(k0),
        }
    }

    /// All problems found, each prefixed with the offending field.
    pub fn problems(&self) -> Vec<String> {
        use alloc::format;
        let mut out = Vec::new();
        if self.scatterers.is_empty() {
            out.push("scatterers: at least one scatterer is required".into());
        }
        if self.lmax.len() != self.scatterers.len() {
            out.push(format!(
                "lmax: {} entries for {} scatterers",
                self.lmax.len(),
                self.scatterers.len()
            ));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if let Err(e) = s.potential.validate() {
                out.push(format!("scatterers[{i}].potential: {e}"));
            }
            if !s.center.0.iter().all(|c| c.is_finite()) {
                out.push(format!("scatterers[{i}].center: not finite"));
            }
        }
        for (i, &l) in self.lmax.iter().enumerate() {
            if l > 40 {
                out.push(format!("scatterers[{i}].lmax: {l} exceeds 40"));
            }
        }
        if !(self.k0 > 0.0 && self.k0.is_finite()) {
            out.push(format!("k0: {} must be positive", self.k0));
        }
        for (name, d) in [("dir_in", self.dir_in), ("dir_out", self.dir_out)] {
            if !(d.norm() > 0.0 && d.norm().is_finite()) {
                out.push(format!("{name}: must be a nonzero vector"));
            }
        }
        let n = &self.numerics;
        if n.eps_list.len() < 2 {
            out.push("numerics.eps_list: at least two values are required".into());
        }
        if n.eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            out.push("numerics.eps_list: values must be positive".into());
        }
        let mut sorted = n.eps_list.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            out.push("numerics.eps_list: values must be distinct".into());
        }
        if n.alpha_list.is_empty() || n.alpha_list.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
            out.push(
                "numerics.alpha_list: values must be nonnegative and the list nonempty".into(),
            );
        }
        if let Some(p) = n.p_max {
            if !(p > 1.5 * self.k0) {
                out.push(format!("numerics.p_max: {p} must exceed 1.5 k0"));
            }
        }
        if !(n.p_max_cap > 1.5 * self.k0) {
            out.push(format!(
                "numerics.p_max_cap: {} must exceed 1.5 k0",
                n.p_max_cap
            ));
        }
        if n.momentum_nodes < 2 || n.momentum_nodes > 64 {
            out.push(format!(
                "numerics.momentum_nodes: {} not in 2..=64",
                n.momentum_nodes
            ));
        }
        if n.lmax_sum > 40 {
            out.push(format!("numerics.lmax_sum: {} exceeds 40", n.lmax_sum));
        }
        if n.n_max == 0 {
            out.push("numerics.n_max: must be at least 1".into());
        }
        let t = &n.tolerances;
        for (name, v) in [
            ("onshell", t.onshell),
            ("phase", t.phase),
            ("flatness", t.flatness),
            ("tail", t.tail),
        ] {
            if !(v > 0.0) {
                out.push(format!("numerics.tolerances.{name}: must be positive"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p.join("; ")))
        }
    }

    pub fn k_out(&self) -> Vec3 {
        self.dir_out.unit() * self.k0
    }

    pub fn k_in(&self) -> Vec3 {
        self.dir_in.unit() * self.k0
    }

    /// The configured cutoff, or the largest automatic one over all scatterers.
    pub fn resolved_p_max(&self) -> Result<f64> {
        if let Some(p) = self.numerics.p_max {
            return Ok(p);
        }
        let mut best = 0.0f64;
        for (s, &l) in self.scatterers.iter().zip(&self.lmax) {
            let (p, _) = suggest_p_max(&s.potential, l, self.k0, 1e-10, self.numerics.p_max_cap)?;
            best = best.max(p);
        }
        Ok(best
            .max(2.0 * self.k0)
            .min(self.numerics.p_max_cap.max(2.0 * self.k0)))
    }

    /// Momentum grid resolving the smallest of `eps`.
    pub fn momentum_grid(&self, eps: &[f64]) -> Result<MomentumGrid> {
        let eps_min = eps.iter().copied().fold(f64::INFINITY, f64::min);
        let range = self
            .scatterers
            .iter()
            .map(|s| s.potential.range())
            .fold(f64::INFINITY, f64::min);
        let mut spec = GridSpec::for_energy(self.k0, eps_min, self.resolved_p_max()?, range);
        spec.per_panel = self.numerics.momentum_nodes;
        MomentumGrid::new(self.k0, spec)
    }
}

/// Off-shell tables of every scatterer at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySlice {
    pub z: ComplexEnergy,
    /// `tables[scatterer][l]`.
    pub tables: Vec<Vec<OffshellTable>>,
}

/// Momentum grid and off-shell tables at each sampled energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub grid: MomentumGrid,
    pub slices: Vec<EnergySlice>,
}

impl Workspace {
    /// Tables at `z = k0^2 + i eps` for every `eps` in `eps` (in that order).
    pub fn build<E: Executor>(s: &Scenario, eps: &[f64], exec: &E) -> Result<Self> {
        let grid = s.momentum_grid(eps)?;
        Self::build_on(s, grid, eps, exec)
    }

    pub fn build_on<E: Executor>(
        s: &Scenario,
        grid: MomentumGrid,
        eps: &[f64],
        exec: &E,
    ) -> Result<Self> {
        let energies = eps
            .iter()
            .map(|&e| ComplexEnergy::new(s.k0, e))
            .collect::<Result<Vec<_>>>()?;
        // Identical potentials share kernels and solutions.
        let mut unique: Vec<(Potential, usize)> = Vec::new();
        let mut which = Vec::with_capacity(s.scatterers.len());
        for (sc, &l) in s.scatterers.iter().zip(&s.lmax) {
            match unique.iter().position(|(p, _)| *p == sc.potential) {
                Some(u) => {
                    unique[u].1 = unique[u].1.max(l);
                    which.push(u);
                }
                None => {
                    which.push(unique.len());
                    unique.push((sc.potential, l));
                }
            }
        }
        let momenta = grid.augmented();
        let kernels: Vec<KernelMatrices> = exec
            .map(unique.len(), |u| {
                KernelMatrices::build(&unique[u].0, unique[u].1, &momenta)
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let mut jobs = Vec::new();
        for e in 0..energies.len() {
            for (u, &(_, lmax)) in unique.iter().enumerate() {
                for l in 0..=lmax {
                    jobs.push((e, u, l));
                }
            }
        }
        let solved: Vec<OffshellTable> = exec
            .map(jobs.len(), |i| {
                let (e, u, l) = jobs[i];
                solve_with_kernels(&kernels[u], l, &energies[e], &grid)
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let mut slices = Vec::with_capacity(energies.len());
        for (e, z) in energies.iter().enumerate() {
            let tables = which
                .iter()
                .zip(&s.lmax)
                .map(|(&u, &lmax)| {
                    (0..=lmax)
                        .map(|l| {
                            let idx = jobs.iter().position(|&job| job == (e, u, l)).unwrap();
                            solved[idx].clone()
                        })
                        .collect()
                })
                .collect();
            slices.push(EnergySlice { z: *z, tables });
        }
        Ok(Self { grid, slices })
    }
}
