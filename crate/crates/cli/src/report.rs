//! report.json, summary.csv and plot-data files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use onshell_core::multiscatter::{PairReport, StructconstSum, VerificationReport};
use onshell_core::Complex64;
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Version of report.json and of every CSV layout written here.
pub const SCHEMA_VERSION: u32 = 1;

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn oc(z: Option<Complex64>) -> Value {
    z.map(c).unwrap_or(Value::Null)
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        String::new()
    }
}

fn structconst_json(s: &StructconstSum) -> Value {
    json!({
        "value": c(s.value),
        "truncation_delta": s.truncation_delta,
        "s_wave_term": c(s.s_wave),
        "lmax": s.lmax,
    })
}

fn pair_json(p: &PairReport) -> Value {
    json!({
        "j": p.j,
        "h": p.h,
        "gap": p.gap,
        "overlapping": p.overlapping(),
        "x0_direct": oc(p.x0_direct),
        "x0_direct_error": p.x0_direct_error,
        "x0_structconst": p.x0_structconst.as_ref().map(structconst_json),
        "onshell_rel_diff": p.onshell_rel_diff,
        "eps_samples": p.eps_samples.iter().map(|(e, v)| json!({"eps": e, "x0": c(*v)})).collect::<Vec<_>>(),
        "y_alpha_samples": p.alpha.iter().map(|a| json!({
            "alpha": a.alpha,
            "x_alpha": c(a.x_alpha),
            "y_alpha": c(a.y_alpha),
            "error": a.error,
            "phase_error": a.phase_error,
        })).collect::<Vec<_>>(),
        "flatness": p.flatness,
        "alpha_average": oc(p.alpha_average),
        "alpha_average_rel_diff": p.alpha_average_rel_diff,
        "tail_estimate": p.tail_estimate,
        "errors": p.errors,
    })
}

pub fn report_json(
    name: &str,
    config: &RunConfig,
    r: &VerificationReport,
    warnings: &[String],
) -> Value {
    let d = &r.diagnostics;
    let mut all_warnings = warnings.to_vec();
    all_warnings.extend(d.warnings.iter().cloned());
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "passed": r.passed(),
        "config": config,
        "numerics": {
            "k0": r.k0,
            "eps_list": r.eps_list,
            "alpha_list": r.alpha_list,
            "p_max": d.p_max,
            "momentum_grid_nodes": d.grid_nodes,
            "momentum_nodes_per_panel": config.numerics.momentum_nodes,
            "angular_order": config.numerics.angular_order,
            "lmax": config.scatterers.iter().map(|s| s.lmax).collect::<Vec<_>>(),
            "lmax_sum": config.numerics.lmax_sum,
            "n_max": config.numerics.n_max,
            "tolerances": config.tolerances,
        },
        "pairs": r.pairs.iter().map(pair_json).collect::<Vec<_>>(),
        "born_terms": r.born_terms.iter().map(|b| json!({
            "order": b.order,
            "value": oc(b.value),
            "error": b.error,
            "samples": b.samples.iter().map(|(e, v)| json!({"eps": e, "value": c(*v)})).collect::<Vec<_>>(),
            "message": b.message,
        })).collect::<Vec<_>>(),
        "diagnostics": {
            "gaps": d.gaps.iter().map(|g| json!({"j": g.j, "h": g.h, "gap": g.gap})).collect::<Vec<_>>(),
            "rollnik": d.rollnik.iter().map(|r| json!({
                "l1_norm": r.l1_norm, "l2_norm": r.l2_norm, "admissible": r.admissible,
            })).collect::<Vec<_>>(),
            "schatten4": d.schatten.iter().map(|s| json!({
                "j": s.j,
                "h": s.h,
                "value": s.estimate.map(|e| e.value),
                "refined": s.estimate.map(|e| e.refined),
                "relative_change": s.estimate.map(|e| e.delta),
                "route": s.estimate.map(|e| format!("{:?}", e.route)),
                "message": s.message,
            })).collect::<Vec<_>>(),
        },
        "checks": r.checks.iter().map(|k| json!({
            "name": k.name,
            "value": k.value,
            "tolerance": k.tolerance,
            "passed": k.passed,
            "gating": k.gating,
            "detail": k.detail,
        })).collect::<Vec<_>>(),
        "warnings": all_warnings,
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

/// One row per reported quantity and per check.
pub fn write_summary(path: &Path, r: &VerificationReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "schema_version",
        "kind",
        "name",
        "j",
        "h",
        "re",
        "im",
        "abs",
        "tolerance",
        "passed",
        "gating",
    ])?;
    let v = SCHEMA_VERSION.to_string();
    let mut row = |kind: &str,
                   name: &str,
                   j: String,
                   h: String,
                   z: Option<Complex64>,
                   x: f64,
                   tol: f64,
                   flags: (&str, &str)| {
        let (re, im, abs) = match z {
            Some(z) => (num(z.re), num(z.im), num(z.norm())),
            None => (String::new(), String::new(), num(x)),
        };
        w.write_record([
            &v,
            kind,
            name,
            &j,
            &h,
            &re,
            &im,
            &abs,
            &num(tol),
            flags.0,
            flags.1,
        ])
    };
    for p in &r.pairs {
        let (j, h) = (p.j.to_string(), p.h.to_string());
        row(
            "pair",
            "gap",
            j.clone(),
            h.clone(),
            None,
            p.gap,
            f64::NAN,
            ("", ""),
        )?;
        if let Some(x) = p.x0_direct {
            row(
                "pair",
                "x0_direct",
                j.clone(),
                h.clone(),
                Some(x),
                0.0,
                f64::NAN,
                ("", ""),
            )?;
            row(
                "pair",
                "x0_direct_error",
                j.clone(),
                h.clone(),
                None,
                p.x0_direct_error,
                f64::NAN,
                ("", ""),
            )?;
        }
        if let Some(s) = &p.x0_structconst {
            row(
                "pair",
                "x0_structconst",
                j.clone(),
                h.clone(),
                Some(s.value),
                0.0,
                f64::NAN,
                ("", ""),
            )?;
        }
        if let Some(a) = p.alpha_average {
            row(
                "pair",
                "alpha_average",
                j.clone(),
                h.clone(),
                Some(a),
                0.0,
                f64::NAN,
                ("", ""),
            )?;
        }
    }
    for b in &r.born_terms {
        let name = format!("order_{}", b.order);
        match b.value {
            Some(z) => row(
                "born_term",
                &name,
                String::new(),
                String::new(),
                Some(z),
                0.0,
                f64::NAN,
                ("", ""),
            )?,
            None => row(
                "born_term",
                &name,
                String::new(),
                String::new(),
                None,
                f64::NAN,
                f64::NAN,
                ("", ""),
            )?,
        }
    }
    for s in &r.diagnostics.schatten {
        let x = s.estimate.map(|e| e.value).unwrap_or(f64::NAN);
        row(
            "schatten4",
            "norm",
            s.j.to_string(),
            s.h.to_string(),
            None,
            x,
            f64::NAN,
            ("", ""),
        )?;
    }
    for k in &r.checks {
        let flags = (
            if k.passed { "true" } else { "false" },
            if k.gating { "true" } else { "false" },
        );
        row(
            "check",
            &k.name,
            String::new(),
            String::new(),
            None,
            k.value,
            k.tolerance,
            flags,
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `Y_alpha` against alpha, `X_0` against eps with its limit, and the
/// structure-constant truncation sweep for each pair.
pub fn write_plotdata(
    dir: &Path,
    r: &VerificationReport,
    sweeps: &[(usize, usize, Vec<StructconstSum>)],
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let v = SCHEMA_VERSION.to_string();
    for p in &r.pairs {
        let mut w = writer(&dir.join(format!("y_alpha_{}_{}.csv", p.j, p.h)))?;
        w.write_record([
            "schema_version",
            "alpha",
            "re_y",
            "im_y",
            "abs_y",
            "phase_error",
            "error",
        ])?;
        for a in &p.alpha {
            w.write_record([
                v.clone(),
                num(a.alpha),
                num(a.y_alpha.re),
                num(a.y_alpha.im),
                num(a.y_alpha.norm()),
                num(a.phase_error),
                num(a.error),
            ])?;
        }
        w.flush()?;
        let mut w = writer(&dir.join(format!("x0_eps_{}_{}.csv", p.j, p.h)))?;
        w.write_record(["schema_version", "kind", "eps", "re_x0", "im_x0", "abs_x0"])?;
        for &(e, x) in &p.eps_samples {
            w.write_record([
                v.clone(),
                "sample".into(),
                num(e),
                num(x.re),
                num(x.im),
                num(x.norm()),
            ])?;
        }
        if let Some(x) = p.x0_direct {
            w.write_record([
                v.clone(),
                "extrapolated".into(),
                num(0.0),
                num(x.re),
                num(x.im),
                num(x.norm()),
            ])?;
        }
        w.flush()?;
    }
    for (j, h, sums) in sweeps {
        let mut w = writer(&dir.join(format!("structconst_sweep_{j}_{h}.csv")))?;
        w.write_record([
            "schema_version",
            "lmax",
            "re",
            "im",
            "abs",
            "truncation_delta",
        ])?;
        for s in sums {
            w.write_record([
                v.clone(),
                s.lmax.to_string(),
                num(s.value.re),
                num(s.value.im),
                num(s.value.norm()),
                num(s.truncation_delta),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}
