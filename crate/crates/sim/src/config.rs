//! Run configuration.
//!
//! Physical inputs use the GHz convention (`rate / 2π`) and the detuning is
//! given as `Δ / g0`. Values are merged in three layers: the reference
//! device, an optional JSON file, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sps_core::SystemParams;

use crate::error::{Result, SimError};

/// Parameters as they appear at the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzParams {
    pub g0_ghz: f64,
    pub kappa_ghz: f64,
    pub gamma_ghz: f64,
    pub gamma_p_ghz: f64,
    pub delta_over_g0: f64,
}

impl Default for GhzParams {
    fn default() -> Self {
        Self { g0_ghz: 8.0, kappa_ghz: 1.6, gamma_ghz: 0.32, gamma_p_ghz: 0.0, delta_over_g0: 0.0 }
    }
}

impl GhzParams {
    /// Converts to internal units, rejecting negative or non-finite rates.
    pub fn to_system(&self) -> Result<SystemParams> {
        for (name, v) in [
            ("g0", self.g0_ghz),
            ("kappa", self.kappa_ghz),
            ("gamma", self.gamma_ghz),
            ("gamma-p", self.gamma_p_ghz),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::config(format!("--{name} must be a nonnegative GHz value, got {v}")));
            }
        }
        if !self.delta_over_g0.is_finite() {
            return Err(SimError::config("--delta-over-g0 must be finite"));
        }
        SystemParams::from_ghz(
            self.g0_ghz,
            self.kappa_ghz,
            self.gamma_ghz,
            self.gamma_p_ghz,
            self.delta_over_g0,
        )
        .map_err(|e| SimError::config(e.to_string()))
    }

    pub fn with_gamma_p(self, gamma_p_ghz: f64) -> Self {
        Self { gamma_p_ghz, ..self }
    }

    pub fn with_delta(self, delta_over_g0: f64) -> Self {
        Self { delta_over_g0, ..self }
    }
}

/// Monte Carlo size and grid density of a validation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    #[default]
    Quick,
    Full,
}

impl Budget {
    /// Trajectories for the statistical checks.
    pub fn n_traj(self) -> usize {
        match self {
            Budget::Quick => 1_000,
            Budget::Full => 10_000,
        }
    }

    /// Multiplier on grid densities.
    pub fn density(self) -> usize {
        match self {
            Budget::Quick => 1,
            Budget::Full => 2,
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Budget::Quick),
            "full" => Ok(Budget::Full),
            other => Err(format!("unknown budget `{other}` (expected quick or full)")),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Budget::Quick => "quick",
            Budget::Full => "full",
        })
    }
}

/// A `min:max:points` grid override. Units depend on the command: ns for
/// time grids, GHz (`Ω / 2π`) for frequency grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        sps_core::grid::uniform(self.min, self.max, self.points)
    }

    /// The same grid with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Vec<f64> {
        self.values().into_iter().map(|x| x * factor).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, points] = parts.as_slice() else {
            return Err(format!("grid `{s}` must have the form min:max:points"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid bound `{x}`: {e}"));
        let (min, max) = (num(min)?, num(max)?);
        let points: usize =
            points.trim().parse().map_err(|e| format!("grid point count `{points}`: {e}"))?;
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(format!("grid `{s}` needs finite bounds with max > min"));
        }
        if points < 2 {
            return Err(format!("grid `{s}` needs at least two points"));
        }
        Ok(GridSpec { min, max, points })
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}:{}:{}", self.min, self.max, self.points))
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub g0_ghz: Option<f64>,
    pub kappa_ghz: Option<f64>,
    pub gamma_ghz: Option<f64>,
    pub gamma_p_ghz: Option<f64>,
    pub delta_over_g0: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budget: Option<Budget>,
    pub grid: Option<GridSpec>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| SimError::config(format!("{}: {e}", path.display())))
    }

    /// Layers `other` on top of `self`.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            g0_ghz: other.g0_ghz.or(self.g0_ghz),
            kappa_ghz: other.kappa_ghz.or(self.kappa_ghz),
            gamma_ghz: other.gamma_ghz.or(self.gamma_ghz),
            gamma_p_ghz: other.gamma_p_ghz.or(self.gamma_p_ghz),
            delta_over_g0: other.delta_over_g0.or(self.delta_over_g0),
            seed: other.seed.or(self.seed),
            out: other.out.or(self.out),
            budget: other.budget.or(self.budget),
            grid: other.grid.or(self.grid),
        }
    }
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 7;

/// Fully resolved settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: GhzParams,
    pub seed: u64,
    pub out: PathBuf,
    pub budget: Budget,
    pub grid: Option<GridSpec>,
}

impl RunConfig {
    /// Reference device, then the config file (if any), then the flags.
    pub fn resolve(file: Option<&Path>, flags: ConfigFile) -> Result<Self> {
        let base = match file {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let c = base.overlay(flags);
        let d = GhzParams::default();
        let params = GhzParams {
            g0_ghz: c.g0_ghz.unwrap_or(d.g0_ghz),
            kappa_ghz: c.kappa_ghz.unwrap_or(d.kappa_ghz),
            gamma_ghz: c.gamma_ghz.unwrap_or(d.gamma_ghz),
            gamma_p_ghz: c.gamma_p_ghz.unwrap_or(d.gamma_p_ghz),
            delta_over_g0: c.delta_over_g0.unwrap_or(d.delta_over_g0),
        };
        params.to_system()?;
        Ok(RunConfig {
            params,
            seed: c.seed.unwrap_or(DEFAULT_SEED),
            out: c.out.unwrap_or_else(|| PathBuf::from("out")),
            budget: c.budget.unwrap_or_default(),
            grid: c.grid,
        })
    }

    pub fn system(&self) -> Result<SystemParams> {
        self.params.to_system()
    }
}
