//! Scenario execution and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use onshell_core::multiscatter::{
    verify_scenario_with, x0_structconst, Executor, StructconstSum, VerificationReport,
};

use crate::config::Validated;
use crate::report::{report_json, write_json, write_plotdata, write_summary};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub passed: bool,
    pub out_dir: PathBuf,
    pub report: VerificationReport,
}

fn sweeps(v: &Validated) -> Vec<(usize, usize, Vec<StructconstSum>)> {
    let s = &v.scenario;
    let mut out = Vec::new();
    for &(j, h, gap) in &v.gaps {
        if gap <= 0.0 {
            continue;
        }
        let mut sums = Vec::new();
        for l in 0..=s.numerics.lmax_sum {
            let mut t = s.clone();
            t.numerics.lmax_sum = l;
            match x0_structconst(&t, j, h) {
                Ok(x) => sums.push(x),
                Err(e) => {
                    warn!("structure-constant sweep ({j},{h}) at lmax {l}: {e}");
                    break;
                }
            }
        }
        out.push((j, h, sums));
    }
    out
}

/// Runs the verification and writes report.json, summary.csv and
/// plotdata/*.csv under `out_dir` (or the configured directory).
pub fn run<E: Executor>(v: &Validated, out_dir: Option<&Path>, exec: &E) -> Result<RunOutcome> {
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| v.config.output.dir.clone());
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for w in &v.warnings {
        warn!("{w}");
    }
    for &(j, h, g) in &v.gaps {
        info!("gap between scatterers {j} and {h}: {g:.6}");
    }
    info!("verifying scenario '{}'", v.config.name);
    let report = verify_scenario_with(&v.scenario, exec)?;
    for c in &report.checks {
        info!(
            "{} {}: {:.3e} (tolerance {:.1e})",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    write_json(
        &dir.join("report.json"),
        &report_json(&v.config.name, &v.config, &report, &v.warnings),
    )?;
    write_summary(&dir.join("summary.csv"), &report)?;
    if v.config.output.plotdata {
        write_plotdata(&dir.join("plotdata"), &report, &sweeps(v))?;
    }
    Ok(RunOutcome {
        passed: report.passed(),
        out_dir: dir,
        report,
    })
}

/// Writes `g_{lm;l'm'}(k0, R)` as CSV rows `l, m, l', m', Re g, Im g`.
pub fn export_structconst(k0: f64, r: [f64; 3], lmax: usize, out: &Path) -> Result<usize> {
    let g = onshell_core::greens::structure_constants(
        k0,
        onshell_core::Vec3::new(r[0], r[1], r[2]),
        lmax,
    )?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w =
        csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    w.write_record(["schema_version", "l", "m", "lp", "mp", "re_g", "im_g"])?;
    let rows = g.rows();
    let version = crate::report::SCHEMA_VERSION.to_string();
    for (l, m, lp, mp, v) in &rows {
        w.write_record([
            version.clone(),
            l.to_string(),
            m.to_string(),
            lp.to_string(),
            mp.to_string(),
            format!("{:.15e}", v.re),
            format!("{:.15e}", v.im),
        ])?;
    }
    w.flush()?;
    Ok(rows.len())
}
