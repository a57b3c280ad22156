//! Scenario files: TOML by default, JSON when the path ends in `.json`.
//!
//! ```toml
//! seed = 7
//!
//! [prey]
//! d = 1.0
//! r = 1.0
//! kernel = { family = "uniform", half_width = 1.0 }
//! lambda_right = 0.5
//! lambda_left = "inf"
//!
//! [predator]
//! d = 0.2
//! r = 0.5
//! kernel = { family = "uniform", half_width = 1.0 }
//! lambda_right = "inf"
//! lambda_left = "inf"
//!
//! [interaction]
//! a = 0.4
//! b = 1.5
//!
//! [habitat]
//! alpha_minus = 1.5
//! alpha_plus = 1.0
//! c_e = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{Scenario, SpeciesParams};
use crate::error::{Error, Result};
use crate::simulator::{HabitatShape, SimulationOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interaction {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Step,
    LogisticRamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HabitatConfig {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub c_e: f64,
    #[serde(default = "default_shape")]
    pub shape: ShapeName,
    /// Ramp width; defaults to 5 prey half-widths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

fn default_shape() -> ShapeName {
    ShapeName::LogisticRamp
}

/// Pass/fail tolerances used by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Speed match: `|measured − predicted| ≤ max(speed_rel·|predicted|, speed_abs)`.
    pub speed_rel: f64,
    pub speed_abs: f64,
    /// Slack on the predator upper bounds.
    pub predator_slack: f64,
    /// Largest plateau deviation.
    pub terrace: f64,
    /// Largest Hopf-Cole gap at the horizon.
    pub hopf_cole: f64,
    pub certify: bool,
    pub simulate: bool,
    pub check_terrace: bool,
    /// Sides on which the Hopf-Cole gap is checked; empty disables the check.
    pub hopf_cole_sides: Vec<crate::classifier::Side>,
    pub certification_points: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            speed_rel: 0.05,
            speed_abs: 0.03,
            predator_slack: 0.03,
            terrace: 0.05,
            hopf_cole: 0.1,
            certify: true,
            simulate: true,
            check_terrace: true,
            hopf_cole_sides: vec![crate::classifier::Side::Right],
            certification_points: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for reports and CSV files; the CLI's `--out` overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Skip the front-trajectory CSV.
    pub no_trajectory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Seeds the jittered certification grid.
    #[serde(default)]
    pub seed: u64,
    pub prey: SpeciesParams,
    pub predator: SpeciesParams,
    pub interaction: Interaction,
    pub habitat: HabitatConfig,
    #[serde(default)]
    pub simulation: SimulationOptions,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str, format: Format) -> Result<Self> {
        let cfg: Self = match format {
            Format::Toml => toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?,
            Format::Json => serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?,
        };
        cfg.scenario().check_fields()?;
        if let Some(w) = cfg.habitat.width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Config(format!("habitat.width must be positive and finite, got {w}")));
            }
        }
        Ok(cfg)
    }

    /// Reads a scenario file; IO failures come back as `std::io::Error`.
    pub fn load(path: &Path) -> std::result::Result<Result<Self>, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text, Format::from_path(path)).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        }))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serialises to TOML")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config serialises to JSON")
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            prey: self.prey,
            predator: self.predator,
            a: self.interaction.a,
            b: self.interaction.b,
            alpha_minus: self.habitat.alpha_minus,
            alpha_plus: self.habitat.alpha_plus,
            c_e: self.habitat.c_e,
        }
    }

    /// Simulation options with the habitat shape filled in.
    pub fn simulation_options(&self) -> SimulationOptions {
        let shape = match self.habitat.shape {
            ShapeName::Step => HabitatShape::Step,
            ShapeName::LogisticRamp => {
                HabitatShape::LogisticRamp { width: self.habitat.width.unwrap_or(5.0 * self.prey.kernel.half_width()) }
            }
        };
        SimulationOptions { habitat: Some(shape), ..self.simulation.clone() }
    }
}
