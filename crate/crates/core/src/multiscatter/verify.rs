use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::amplitudes::{born_series_term, x0_structconst, PairIntegrand, StructconstSum};
use super::extrapolate::eps_extrapolate;
use super::{Executor, Scenario, Sequential, Workspace};
use crate::greens::{schatten4_norm, ComplexEnergy, KtildeDiscretization, SchattenEstimate};
use crate::potentials::RollnikDiagnostics;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSample {
    pub alpha: f64,
    /// Extrapolated `X_alpha(k0^2 + i0)`.
    pub x_alpha: Complex64,
    pub error: f64,
    pub y_alpha: Complex64,
    /// `|arg(X_alpha / X_0) - alpha k0|`, wrapped to `[0, pi]`.
    pub phase_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub j: usize,
    pub h: usize,
    pub gap: f64,
    /// `X_0` at each sampled eps, in the configured order.
    pub eps_samples: Vec<(f64, Complex64)>,
    pub x0_direct: Option<Complex64>,
    pub x0_direct_error: f64,
    pub x0_structconst: Option<StructconstSum>,
    pub onshell_rel_diff: Option<f64>,
    pub alpha: Vec<AlphaSample>,
    /// `max_alpha |Y_alpha - Y_0| / |Y_0|`.
    pub flatness: Option<f64>,
    /// Mean of `Y_alpha` over the sampled alpha range (trapezoid rule).
    pub alpha_average: Option<Complex64>,
    /// `|alpha_average - X_0| / |X_0|`.
    pub alpha_average_rel_diff: Option<f64>,
    /// Largest tail estimate relative to `|X_0|` over the sampled energies.
    pub tail_estimate: f64,
    pub errors: Vec<String>,
}

impl PairReport {
    pub fn overlapping(&self) -> bool {
        self.gap <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BornTerm {
    pub order: usize,
    pub value: Option<Complex64>,
    pub error: f64,
    pub samples: Vec<(f64, Complex64)>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGap {
    pub j: usize,
    pub h: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchattenReport {
    pub j: usize,
    pub h: usize,
    pub estimate: Option<SchattenEstimate>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub p_max: f64,
    pub grid_nodes: usize,
    pub rollnik: Vec<RollnikDiagnostics>,
    pub gaps: Vec<PairGap>,
    pub schatten: Vec<SchattenReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Whether the check counts towards [`VerificationReport::passed`].
    pub gating: bool,
    pub detail: Option<String>,
}

impl Check {
    fn below(name: String, value: f64, tolerance: f64, gating: bool) -> Self {
        Self {
            name,
            value,
            tolerance,
            passed: value < tolerance,
            gating,
            detail: None,
        }
    }

    fn failed(name: String, detail: String) -> Self {
        Self {
            name,
            value: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            gating: true,
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub k0: f64,
    pub eps_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub pairs: Vec<PairReport>,
    pub born_terms: Vec<BornTerm>,
    pub diagnostics: Diagnostics,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.gating)
    }
}

fn wrap_phase(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    y.abs()
}

pub fn verify_scenario(s: &Scenario) -> Result<VerificationReport> {
    verify_scenario_with(s, &Sequential)
}

/// Runs every comparison of the scenario. Only invalid input is an error;
/// numerical failures are recorded in the report as failed checks.
pub fn verify_scenario_with<E: Executor>(s: &Scenario, exec: &E) -> Result<VerificationReport> {
    s.validate()?;
    let n = s.scatterers.len();
    let k0 = s.k0;
    let tol = &s.numerics.tolerances;
    let gate = s.numerics.checks;
    let mut alphas = s.numerics.alpha_list.clone();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alphas.dedup();
    if alphas[0] != 0.0 {
        alphas.insert(0, 0.0);
    }
    let eps = s.numerics.eps_list.clone();
    let mut warnings = Vec::new();
    let mut checks = Vec::new();

    let rollnik = s
        .scatterers
        .iter()
        .map(|sc| sc.potential.rollnik_check())
        .collect::<Result<Vec<_>>>()?;
    for (i, r) in rollnik.iter().enumerate() {
        if !r.admissible {
            checks.push(Check::failed(
                format!("rollnik[{i}]"),
                "potential norms are not finite".into(),
            ));
        }
    }
    let mut gaps = Vec::new();
    for j in 0..n {
        for h in j + 1..n {
            gaps.push(PairGap {
                j,
                h,
                gap: s.scatterers[j].gap(&s.scatterers[h]),
            });
        }
    }
    let schatten = if s.numerics.schatten {
        let z0 = ComplexEnergy::on_shell(k0)?;
        let items: Vec<(usize, usize)> = gaps.iter().map(|g| (g.j, g.h)).collect();
        items
            .iter()
            .map(|&(j, h)| {
                let d = KtildeDiscretization::new(s.scatterers[j], s.scatterers[h], z0);
                match schatten4_norm(&d) {
                    Ok(e) => SchattenReport {
                        j,
                        h,
                        estimate: Some(e),
                        message: None,
                    },
                    Err(e) => SchattenReport {
                        j,
                        h,
                        estimate: None,
                        message: Some(e.to_string()),
                    },
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let p_max = s.resolved_p_max()?;
    let ws = match Workspace::build(s, &eps, exec) {
        Ok(ws) => ws,
        Err(e) => {
            checks.push(Check::failed("offshell_tables".into(), e.to_string()));
            let diagnostics = Diagnostics {
                p_max,
                grid_nodes: 0,
                rollnik,
                gaps,
                schatten,
                warnings,
            };
            return Ok(VerificationReport {
                k0,
                eps_list: eps,
                alpha_list: alphas,
                pairs: Vec::new(),
                born_terms: Vec::new(),
                diagnostics,
                checks,
            });
        }
    };
    // Partial-wave truncation: the last on-shell wave should be negligible.
    let last = ws.slices.len() - 1;
    for (i, tables) in ws.slices[last].tables.iter().enumerate() {
        let mags: Vec<f64> = tables.iter().map(|t| t.onshell().norm()).collect();
        let top = mags.iter().copied().fold(0.0, f64::max);
        if top > 0.0 && mags[mags.len() - 1] > 1e-4 * top {
            warnings.push(format!(
                "scatterer {i}: |t_lmax| / max |t_l| = {:.2e}; raise lmax",
                mags[mags.len() - 1] / top
            ));
        }
    }

    let mut pairs = Vec::new();
    for j in 0..n {
        for h in (0..n).filter(|&h| h != j) {
            let pr = pair_report(s, &ws, j, h, &alphas, exec);
            let tag = format!("[{j},{h}]");
            for e in &pr.errors {
                checks.push(Check::failed(format!("pair{tag}"), e.clone()));
            }
            if pr.x0_direct.is_some() {
                checks.push(Check::below(
                    format!("tail{tag}"),
                    pr.tail_estimate,
                    tol.tail,
                    gate.tail,
                ));
                if let Some(d) = pr.onshell_rel_diff {
                    checks.push(Check::below(
                        format!("onshell_equivalence{tag}"),
                        d,
                        tol.onshell,
                        gate.onshell_equivalence,
                    ));
                }
                if !pr.overlapping() {
                    let worst = pr.alpha.iter().map(|a| a.phase_error).fold(0.0, f64::max);
                    checks.push(Check::below(
                        format!("phase_law{tag}"),
                        worst,
                        tol.phase,
                        gate.phase_law,
                    ));
                }
                if let Some(f) = pr.flatness {
                    checks.push(Check::below(
                        format!("alpha_flatness{tag}"),
                        f,
                        tol.flatness,
                        gate.alpha_flatness,
                    ));
                }
            }
            if let Some(sc) = &pr.x0_structconst {
                if sc.truncation_delta > 0.1 * tol.onshell * sc.value.norm() {
                    warnings.push(format!(
                        "pair {tag}: structure-constant truncation {:.2e} at lmax_sum = {}",
                        sc.truncation_delta / sc.value.norm(),
                        sc.lmax
                    ));
                }
            }
            pairs.push(pr);
        }
    }

    let mut born_terms = Vec::new();
    for order in 1..=s.numerics.n_max {
        let mut samples = Vec::new();
        let mut message = None;
        for (e, sl) in ws.slices.iter().enumerate() {
            let v = if order == 2 {
                // Same definition as the pair samples; reuse them.
                let vals: Vec<Complex64> = pairs
                    .iter()
                    .filter_map(|p| p.eps_samples.get(e).map(|x| x.1))
                    .collect();
                if vals.len() == pairs.len() {
                    Ok(vals.iter().sum())
                } else {
                    born_series_term(s, &ws, e, order, exec)
                }
            } else {
                born_series_term(s, &ws, e, order, exec)
            };
            match v {
                Ok(v) => samples.push((sl.z.eps, v)),
                Err(err) => {
                    message = Some(err.to_string());
                    break;
                }
            }
        }
        let (value, error) = if message.is_none() {
            match eps_extrapolate(&samples) {
                Ok(x) => (Some(x.limit), x.error),
                Err(err) => {
                    message = Some(err.to_string());
                    (None, f64::NAN)
                }
            }
        } else {
            (None, f64::NAN)
        };
        born_terms.push(BornTerm {
            order,
            value,
            error,
            samples,
            message,
        });
    }

    let diagnostics = Diagnostics {
        p_max,
        grid_nodes: ws.grid.len(),
        rollnik,
        gaps,
        schatten,
        warnings,
    };
    Ok(VerificationReport {
        k0,
        eps_list: eps,
        alpha_list: alphas,
        pairs,
        born_terms,
        diagnostics,
        checks,
    })
}

fn pair_report<E: Executor>(
    s: &Scenario,
    ws: &Workspace,
    j: usize,
    h: usize,
    alphas: &[f64],
    exec: &E,
) -> PairReport {
    let k0 = s.k0;
    let gap = s.scatterers[j].gap(&s.scatterers[h]);
    let mut report = PairReport {
        j,
        h,
        gap,
        eps_samples: Vec::new(),
        x0_direct: None,
        x0_direct_error: f64::NAN,
        x0_structconst: None,
        onshell_rel_diff: None,
        alpha: Vec::new(),
        flatness: None,
        alpha_average: None,
        alpha_average_rel_diff: None,
        tail_estimate: 0.0,
        errors: Vec::new(),
    };
    if gap > 0.0 {
        match x0_structconst(s, j, h) {
            Ok(v) => report.x0_structconst = Some(v),
            Err(e) => report.errors.push(e.to_string()),
        }
    }
    // samples[a][e] = X_{alpha_a} at eps_e.
    let mut samples = alloc::vec![Vec::new(); alphas.len()];
    for sl in &ws.slices {
        let pair = match PairIntegrand::build(s, &ws.grid, sl, j, h, exec) {
            Ok(p) => p,
            Err(e) => {
                report.errors.push(e.to_string());
                return report;
            }
        };
        let x0 = pair.x_alpha(0.0);
        report.tail_estimate = report
            .tail_estimate
            .max(pair.tail_estimate / x0.norm().max(f64::MIN_POSITIVE));
        report.eps_samples.push((sl.z.eps, x0));
        for (a, &alpha) in alphas.iter().enumerate() {
            samples[a].push((sl.z.eps, pair.x_alpha(alpha)));
        }
    }
    let mut limits = Vec::new();
    for (a, &alpha) in alphas.iter().enumerate() {
        match eps_extrapolate(&samples[a]) {
            Ok(x) => limits.push((alpha, x.limit, x.error)),
            Err(e) => {
                report.errors.push(format!("alpha = {alpha}: {e}"));
                return report;
            }
        }
    }
    let x0 = limits[0].1;
    report.x0_direct = Some(x0);
    report.x0_direct_error = limits[0].2;
    if let Some(sc) = &report.x0_structconst {
        report.onshell_rel_diff = Some((x0 - sc.value).norm() / sc.value.norm());
    }
    for &(alpha, x, error) in &limits {
        let y = Complex64::cis(-alpha * k0) * x;
        let phase_error = wrap_phase((x / x0).arg() - alpha * k0);
        report.alpha.push(AlphaSample {
            alpha,
            x_alpha: x,
            error,
            y_alpha: y,
            phase_error,
        });
    }
    let y0 = report.alpha[0].y_alpha;
    report.flatness = Some(
        report
            .alpha
            .iter()
            .map(|a| (a.y_alpha - y0).norm())
            .fold(0.0, f64::max)
            / y0.norm(),
    );
    let span = alphas[alphas.len() - 1] - alphas[0];
    report.alpha_average = Some(if span > 0.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in report.alpha.windows(2) {
            acc += (w[0].y_alpha + w[1].y_alpha) * (0.5 * (w[1].alpha - w[0].alpha));
        }
        acc / span
    } else {
        y0
    });
    report.alpha_average_rel_diff = report.alpha_average.map(|a| (a - x0).norm() / x0.norm());
    report
}
