//! Scenario files and their resolution against command-line overrides.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use wgeom_core::comparison::{Relation, Theorem, Tolerances, DEFAULT_RADII};
use wgeom_core::extrinsic::SubmanifoldProfile;
use wgeom_core::model::WeightedModelSpace;
use wgeom_core::profile::{log_grid, RadialProfile, WarpingFunction};

use crate::error::{input, CliError};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submanifold: Option<SubmanifoldSpec>,
    #[serde(default)]
    pub action: ActionSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub m: u32,
    pub w: WarpingSpec,
    #[serde(default = "zero")]
    pub f: String,
}

/// `"sinh(r)"`, `{"space_form": b}`, `{"linear_exponential": a}` or
/// `{"expr": "sin(r)", "domain_sup": 3.14159}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WarpingSpec {
    Expr(String),
    SpaceForm { space_form: f64 },
    LinearExponential { linear_exponential: f64 },
    Bounded { expr: String, domain_sup: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    pub w: WarpingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default)]
    pub rho0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmanifoldSpec {
    pub n: u32,
    pub psi: String,
    #[serde(default = "zero")]
    pub phi: String,
    pub rho: f64,
    #[serde(default)]
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    #[default]
    AtMost,
    AtLeast,
}

impl From<Sense> for Relation {
    fn from(s: Sense) -> Relation {
        match s {
            Sense::AtMost => Relation::AtMost,
            Sense::AtLeast => Relation::AtLeast,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Dimension of the totally geodesic sub-model for `extrinsic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<TolSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    #[serde(default = "default_abs")]
    pub abs: f64,
    #[serde(default = "default_rel")]
    pub rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Capacity,
    Volume,
    Quotient,
    ExitTime,
    Compare,
    Extrinsic,
    Oracle,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Capacity => "capacity",
            Command::Volume => "volume",
            Command::Quotient => "quotient",
            Command::ExitTime => "exit-time",
            Command::Compare => "compare",
            Command::Extrinsic => "extrinsic",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn zero() -> String {
    "0".into()
}

fn default_abs() -> f64 {
    Tolerances::default().abs
}

fn default_rel() -> f64 {
    Tolerances::default().rel
}

pub const DEFAULT_CELLS: usize = 4096;

/// Values given on the command line; each replaces the scenario's own.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rho: Option<f64>,
    pub big_r: Option<f64>,
    pub theorem: Option<String>,
    pub n: Option<u32>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub csv: Option<String>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::Scenario { path: path.into(), source })
    }

    /// Applies overrides and fills every default the command relies on, so
    /// the echoed scenario reproduces the run on its own.
    pub fn resolve(mut self, command: Option<Command>, o: Overrides) -> Result<Scenario, CliError> {
        let command = command.or(self.action.command).ok_or_else(|| input("no command given and the scenario has no action.command"))?;
        let a = &mut self.action;
        a.command = Some(command);
        a.rho = o.rho.or(a.rho);
        a.big_r = o.big_r.or(a.big_r);
        a.theorem = o.theorem.or(a.theorem.take());
        a.n = o.n.or(a.n);
        a.grid = o.grid.or(a.grid);
        if let Some(p) = o.csv {
            self.output.csv_path = Some(p);
        }
        let mut tol = self.output.tol.unwrap_or(TolSpec { abs: default_abs(), rel: default_rel() });
        if let Some(rel) = o.tol {
            tol.rel = rel;
        }
        if !(tol.abs >= 0.0 && tol.rel >= 0.0) {
            return Err(input(format!("tolerances must be non-negative, got abs {} rel {}", tol.abs, tol.rel)));
        }
        self.output.tol = Some(tol);

        let a = &mut self.action;
        match command {
            Command::Classify => {
                a.rho.get_or_insert(1.0);
            }
            Command::Capacity => {
                a.rho.get_or_insert(1.0);
            }
            Command::Volume | Command::Quotient => {
                a.big_r.get_or_insert(1.0);
            }
            Command::ExitTime => {
                a.big_r.get_or_insert(1.0);
                a.grid.get_or_insert(DEFAULT_CELLS);
            }
            Command::Oracle => {
                a.rho.get_or_insert(1.0);
                a.big_r.get_or_insert(2.0);
                a.grid.get_or_insert(DEFAULT_CELLS);
            }
            Command::Extrinsic => {
                if self.submanifold.is_none() {
                    a.rho.get_or_insert(1.0);
                    a.big_r.get_or_insert(1.0);
                }
                a.theorem.get_or_insert_with(|| "sub-parabolicity".into());
            }
            Command::Compare | Command::Sweep => {}
        }
        if matches!(command, Command::Compare | Command::Sweep) && self.action.radii.is_none() {
            let sup = self.radius_sup()?;
            let hi = 10f64.min(0.95 * sup);
            let n = self.action.grid.unwrap_or(DEFAULT_RADII);
            if n < 2 {
                return Err(input(format!("grid needs at least 2 radii, got {n}")));
            }
            self.action.radii = Some(log_grid(0.05f64.min(0.5 * hi), hi, n));
        }
        if let Some(radii) = &self.action.radii {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return Err(input("radii must be a non-empty list of positive numbers"));
            }
        }
        Ok(self)
    }

    fn radius_sup(&self) -> Result<f64, CliError> {
        let mut sup = self.model()?.domain_sup();
        if let Some(c) = &self.comparison {
            sup = sup.min(c.w.build()?.domain_sup());
        }
        Ok(sup)
    }

    pub fn command(&self) -> Command {
        self.action.command.expect("resolved scenario has a command")
    }

    pub fn tolerances(&self) -> Tolerances {
        let t = self.output.tol.expect("resolved scenario has tolerances");
        Tolerances { abs: t.abs, rel: t.rel }
    }

    pub fn model(&self) -> Result<WeightedModelSpace, CliError> {
        let m = self.model.as_ref().ok_or_else(|| input("scenario has no model section"))?;
        Ok(WeightedModelSpace::new(m.m, m.w.build()?, RadialProfile::parse(&m.f)?)?)
    }

    pub fn comparison(&self) -> Result<&ComparisonSpec, CliError> {
        self.comparison.as_ref().ok_or_else(|| input("scenario has no comparison section"))
    }

    pub fn theorem(&self) -> Result<Theorem, CliError> {
        let name = self.action.theorem.as_deref().ok_or_else(|| input("no theorem given"))?;
        Theorem::from_name(name).ok_or_else(|| {
            let known: Vec<_> = Theorem::ALL.iter().map(|t| t.name()).collect();
            input(format!("unknown theorem `{name}`; expected one of {}", known.join(", ")))
        })
    }

    pub fn radii(&self) -> &[f64] {
        self.action.radii.as_deref().unwrap_or(&[])
    }

    pub fn rho(&self) -> Result<f64, CliError> {
        self.action.rho.ok_or_else(|| input("no inner radius rho given"))
    }

    pub fn big_r(&self) -> Result<f64, CliError> {
        self.action.big_r.ok_or_else(|| input("no outer radius R given"))
    }

    pub fn grid(&self) -> usize {
        self.action.grid.unwrap_or(DEFAULT_CELLS)
    }
}

impl WarpingSpec {
    pub fn build(&self) -> Result<WarpingFunction, CliError> {
        Ok(match self {
            WarpingSpec::Expr(s) => WarpingFunction::parse(s)?,
            WarpingSpec::SpaceForm { space_form } => WarpingFunction::space_form(*space_form)?,
            WarpingSpec::LinearExponential { linear_exponential } => WarpingFunction::linear_exponential(*linear_exponential)?,
            WarpingSpec::Bounded { expr, domain_sup } => WarpingFunction::new(RadialProfile::parse(expr)?, *domain_sup)?,
        })
    }
}

impl SubmanifoldSpec {
    pub fn build(&self) -> Result<SubmanifoldProfile, CliError> {
        Ok(SubmanifoldProfile::new(
            self.n,
            RadialProfile::parse(&self.psi)?,
            RadialProfile::parse(&self.phi)?,
            self.rho,
            self.sense.into(),
        )?)
    }
}
