//! Run configuration: a single JSON file with documented defaults and
//! strict key checking.

use crate::CliError;
use beamop::BeamParams;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Beam section: exactly one of `omega0` [rad/s] or `wavelength` [m], plus
/// the waist `w0` [m].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    pub w0: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            omega0: None,
            wavelength: Some(1.064e-6),
            w0: 1.0e-3,
        }
    }
}

impl BeamConfig {
    pub fn to_params(&self) -> Result<BeamParams, CliError> {
        let params = match (self.omega0, self.wavelength) {
            (Some(omega0), None) => BeamParams::new(omega0, self.w0),
            (None, Some(lambda)) => BeamParams::from_wavelength(lambda, self.w0),
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "beam config must give omega0 or wavelength, not both",
                ))
            }
            (None, None) => return Err(CliError::config("beam config needs omega0 or wavelength")),
        };
        params.map_err(|e| CliError::config(format!("invalid beam parameters: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_grid_n")]
    pub n: usize,
    #[serde(default = "default_extent_factor")]
    pub extent_factor: f64,
}

fn default_grid_n() -> usize {
    512
}

fn default_extent_factor() -> f64 {
    8.0
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: default_grid_n(),
            extent_factor: default_extent_factor(),
        }
    }
}

/// Full run configuration. Unknown keys anywhere are rejected.
///
/// Defaults: 1064 nm beam with a 1 mm waist, `ncut` 6, a 512-point grid
/// spanning eight beam radii, tolerances `ccr` 1e-12 and `oracle` 1e-3,
/// outputs under `beamop-out`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub beam: BeamConfig,
    #[serde(default = "default_ncut")]
    pub ncut: usize,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_schema_version() -> u32 {
    1
}

fn default_ncut() -> usize {
    6
}

fn default_output_dir() -> String {
    "beamop-out".to_string()
}

pub const KNOWN_TOLERANCES: [&str; 2] = ["ccr", "oracle"];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: default_schema_version(),
            beam: BeamConfig::default(),
            ncut: default_ncut(),
            grid: GridConfig::default(),
            tolerances: BTreeMap::new(),
            output_dir: default_output_dir(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::config(format!(
                "config {}: {e} (line {}, column {})",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != 1 {
            return Err(CliError::config(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        for key in self.tolerances.keys() {
            if !KNOWN_TOLERANCES.contains(&key.as_str()) {
                return Err(CliError::config(format!(
                    "unknown tolerance {key:?} (known: {KNOWN_TOLERANCES:?})"
                )));
            }
        }
        if self.grid.n < 4 {
            return Err(CliError::config("grid.n must be at least 4"));
        }
        if !self.grid.extent_factor.is_finite() || self.grid.extent_factor <= 0.0 {
            return Err(CliError::config("grid.extent_factor must be positive"));
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        if let Some(&value) = self.tolerances.get(name) {
            return value;
        }
        match name {
            "ccr" => 1e-12,
            "oracle" => 1e-3,
            _ => unreachable!("unknown tolerance {name}"),
        }
    }
}
