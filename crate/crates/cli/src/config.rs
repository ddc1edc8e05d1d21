//! TOML run configuration.
//!
//! Every numeric field has a default (see the bundled `configs/*.toml`):
//!
//! | field | default |
//! |---|---|
//! | `scenario.dir_in` | `[0, 0, 1]` |
//! | `scenario.eps_list` | `0.05 k0^2 / 2^i`, `i = 0..5` |
//! | `scenario.alpha_list` | `0, 0.25, ..., 2` |
//! | `scatterers[].lmax` | 8 |
//! | `numerics.momentum_nodes` | 10 |
//! | `numerics.angular_order` | 16 |
//! | `numerics.p_max` | from kernel decay, capped at `p_max_cap` = 40 |
//! | `numerics.lmax_sum` | 8 |
//! | `numerics.n_max` | 3 |
//! | `numerics.schatten` | true |
//! | `tolerances.onshell / phase / flatness / tail` | 1e-3 / 1e-3 / 1e-2 / 1e-4 |
//! | `checks.onshell_equivalence / phase_law / alpha_flatness / tail` | all true |
//!
//! `checks` selects the comparisons that decide the exit status; disabled
//! ones are still computed and reported.

use std::path::PathBuf;

use onshell_core::multiscatter::{CheckSelection, Numerics, Scenario, Tolerances};
use onshell_core::potentials::{Potential, Scatterer};
use onshell_core::Vec3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub scenario: ScenarioBlock,
    pub scatterers: Vec<ScattererBlock>,
    #[serde(default)]
    pub numerics: NumericsBlock,
    #[serde(default)]
    pub tolerances: TolerancesBlock,
    #[serde(default)]
    pub checks: ChecksBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn default_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub k0: f64,
    #[serde(default = "default_dir_in")]
    pub dir_in: [f64; 3],
    pub dir_out: [f64; 3],
    /// Absolute imaginary parts of the sampled energies.
    #[serde(default)]
    pub eps_list: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha_list: Option<Vec<f64>>,
}

fn default_dir_in() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialBlock {
    SquareWell { v0: f64, a: f64 },
    Gaussian { v0: f64, a: f64 },
    Exponential { v0: f64, a: f64 },
    TruncatedCoulomb { v0: f64, a: f64, rc: f64 },
}

impl PotentialBlock {
    pub fn to_potential(self) -> Potential {
        match self {
            PotentialBlock::SquareWell { v0, a } => Potential::SquareWell { v0, a },
            PotentialBlock::Gaussian { v0, a } => Potential::Gaussian { v0, a },
            PotentialBlock::Exponential { v0, a } => Potential::Exponential { v0, a },
            PotentialBlock::TruncatedCoulomb { v0, a, rc } => {
                Potential::TruncatedCoulomb { v0, a, rc }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererBlock {
    pub center: [f64; 3],
    pub potential: PotentialBlock,
    #[serde(default = "default_lmax")]
    pub lmax: usize,
}

fn default_lmax() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsBlock {
    /// Gauss–Legendre nodes per momentum panel.
    pub momentum_nodes: usize,
    /// Polar nodes added on top of the band limit of the angular integrands.
    pub angular_order: usize,
    pub p_max: Option<f64>,
    pub p_max_cap: f64,
    pub lmax_sum: usize,
    pub n_max: usize,
    pub schatten: bool,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        let n = Numerics::for_k0(1.0);
        Self {
            momentum_nodes: n.momentum_nodes,
            angular_order: n.angular_margin,
            p_max: n.p_max,
            p_max_cap: n.p_max_cap,
            lmax_sum: n.lmax_sum,
            n_max: n.n_max,
            schatten: n.schatten,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesBlock {
    pub onshell: f64,
    pub phase: f64,
    pub flatness: f64,
    pub tail: f64,
}

impl Default for TolerancesBlock {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            onshell: t.onshell,
            phase: t.phase,
            flatness: t.flatness,
            tail: t.tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksBlock {
    pub onshell_equivalence: bool,
    pub phase_law: bool,
    pub alpha_flatness: bool,
    pub tail: bool,
}

impl Default for ChecksBlock {
    fn default() -> Self {
        let c = CheckSelection::default();
        Self {
            onshell_equivalence: c.onshell_equivalence,
            phase_law: c.phase_law,
            alpha_flatness: c.alpha_flatness,
            tail: c.tail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    /// Output directory; relative paths are taken from the working directory.
    pub dir: PathBuf,
    pub plotdata: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("onshell-out"),
            plotdata: true,
        }
    }
}

/// A configuration that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub config: RunConfig,
    pub scenario: Scenario,
    pub warnings: Vec<String>,
    /// `(j, h, gap)` between effective supports; negative means overlap.
    pub gaps: Vec<(usize, usize, f64)>,
}

/// All problems found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Core field names in config terms.
fn config_path(core: &str) -> String {
    for (from, to) in [
        ("k0", "scenario.k0"),
        ("dir_in", "scenario.dir_in"),
        ("dir_out", "scenario.dir_out"),
        ("numerics.eps_list", "scenario.eps_list"),
        ("numerics.alpha_list", "scenario.alpha_list"),
        ("numerics.tolerances.", "tolerances."),
        ("numerics.angular_margin", "numerics.angular_order"),
    ] {
        if let Some(rest) = core.strip_prefix(from) {
            return format!("{to}{rest}");
        }
    }
    core.to_string()
}

impl RunConfig {
    pub fn to_scenario(&self) -> Scenario {
        let k0 = self.scenario.k0;
        let mut numerics = Numerics::for_k0(if k0 > 0.0 { k0 } else { 1.0 });
        if let Some(e) = &self.scenario.eps_list {
            numerics.eps_list = e.clone();
        }
        if let Some(a) = &self.scenario.alpha_list {
            numerics.alpha_list = a.clone();
        }
        let n = &self.numerics;
        numerics.momentum_nodes = n.momentum_nodes;
        numerics.angular_margin = n.angular_order;
        numerics.p_max = n.p_max;
        numerics.p_max_cap = n.p_max_cap;
        numerics.lmax_sum = n.lmax_sum;
        numerics.n_max = n.n_max;
        numerics.schatten = n.schatten;
        let t = &self.tolerances;
        numerics.tolerances = Tolerances {
            onshell: t.onshell,
            phase: t.phase,
            flatness: t.flatness,
            tail: t.tail,
        };
        let c = &self.checks;
        numerics.checks = CheckSelection {
            onshell_equivalence: c.onshell_equivalence,
            phase_law: c.phase_law,
            alpha_flatness: c.alpha_flatness,
            tail: c.tail,
        };
        Scenario {
            scatterers: self
                .scatterers
                .iter()
                .map(|s| Scatterer::new(vec3(s.center), s.potential.to_potential()))
                .collect(),
            lmax: self.scatterers.iter().map(|s| s.lmax).collect(),
            k0,
            dir_in: vec3(self.scenario.dir_in),
            dir_out: vec3(self.scenario.dir_out),
            numerics,
        }
    }
}

/// Parses and checks a configuration, reporting every violated constraint.
pub fn validate_config(text: &str) -> Result<Validated, ConfigErrors> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigErrors(vec![e.to_string()]))?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let scenario = config.to_scenario();
    errors.extend(scenario.problems().iter().map(|p| config_path(p)));
    if config.numerics.n_max > 3 {
        errors.push(format!(
            "numerics.n_max: {} exceeds the highest available order 3",
            config.numerics.n_max
        ));
    }
    for (name, d) in [
        ("scenario.dir_in", config.scenario.dir_in),
        ("scenario.dir_out", config.scenario.dir_out),
    ] {
        let n = vec3(d).norm();
        if n > 0.0 && (n - 1.0).abs() > 1e-12 {
            warnings.push(format!("{name}: norm {n} normalized to 1"));
        }
    }
    if config
        .scenario
        .alpha_list
        .as_ref()
        .is_some_and(|a| a.len() < 8)
    {
        warnings
            .push("scenario.alpha_list: fewer than 8 samples make the alpha average coarse".into());
    }
    let mut gaps = Vec::new();
    for j in 0..scenario.scatterers.len() {
        for h in j + 1..scenario.scatterers.len() {
            let g = scenario.scatterers[j].gap(&scenario.scatterers[h]);
            if g.is_finite() {
                gaps.push((j, h, g));
            }
        }
    }
    if errors.is_empty() {
        Ok(Validated {
            config,
            scenario,
            warnings,
            gaps,
        })
    } else {
        Err(ConfigErrors(errors))
    }
}
