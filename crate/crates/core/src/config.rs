//! Declarative description of a single benchmark instance.
//!
//! Config files are TOML documents whose keys mirror [`EnvConfig`] field for
//! field. Unknown keys are rejected at parse time; everything else is checked
//! by [`validate_config`], which also fills in the fields implied by the
//! chosen difficulty mode.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Benchmark family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "tmaze")]
    TMaze,
    #[serde(rename = "color_cubes")]
    ColorCubes,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::TMaze => f.write_str("tmaze"),
            Family::ColorCubes => f.write_str("color_cubes"),
        }
    }
}

/// Corridor-length sampling regime (T-Maze only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every corridor has length `corridor_length`.
    Fixed,
    /// Each corridor length is drawn uniformly from `1..=corridor_length`.
    Uniform,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Fixed => f.write_str("fixed"),
            Regime::Uniform => f.write_str("uniform"),
        }
    }
}

/// Color-Cubes observability mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Trivial,
    Medium,
    Extreme,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Trivial => f.write_str("trivial"),
            Mode::Medium => f.write_str("medium"),
            Mode::Extreme => f.write_str("extreme"),
        }
    }
}

/// How the next target color is drawn after a successful interaction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retarget {
    /// Uniform over every color except the one just collected.
    #[default]
    ExcludeCompleted,
    /// Uniform over all colors.
    Any,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("teleport_prob must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("regime {regime} is not valid for family {family}")]
    InvalidRegimeForFamily { regime: Regime, family: Family },
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {message}")]
    Parse { path: String, message: String },
}

/// One benchmark instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    /// `l_max`: corridor length (Fixed) or its upper bound (Uniform).
    #[serde(default = "defaults::corridor_length")]
    pub corridor_length: u32,
    /// `n`: number of chained corridors.
    #[serde(default = "defaults::corridor_count")]
    pub corridor_count: u32,
    /// `G`: side of the square grid.
    #[serde(default = "defaults::grid_size")]
    pub grid_size: u32,
    /// `N`: number of uniquely colored cubes.
    #[serde(default = "defaults::cube_count")]
    pub cube_count: u32,
    /// `K`: number of target phases per episode.
    #[serde(default = "defaults::subepisode_count")]
    pub subepisode_count: u32,
    #[serde(default = "defaults::teleport_prob")]
    pub teleport_prob: f64,
    #[serde(default = "defaults::mode")]
    pub mode: Mode,
    #[serde(default)]
    pub retarget: Retarget,
    /// Global step limit; filled with a family default by validation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u32>,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    use super::Mode;

    pub fn corridor_length() -> u32 {
        5
    }
    pub fn corridor_count() -> u32 {
        1
    }
    pub fn grid_size() -> u32 {
        5
    }
    pub fn cube_count() -> u32 {
        3
    }
    pub fn subepisode_count() -> u32 {
        3
    }
    pub fn teleport_prob() -> f64 {
        0.3
    }
    pub fn mode() -> Mode {
        Mode::Medium
    }
}

impl EnvConfig {
    pub fn tmaze(regime: Regime, corridor_length: u32, corridor_count: u32) -> Self {
        Self {
            family: Family::TMaze,
            regime: Some(regime),
            corridor_length,
            corridor_count,
            ..Self::base(Family::TMaze)
        }
    }

    /// Color-Cubes with the Medium/Extreme defaults: G=5, N=3, K=3, p=0.3.
    pub fn cubes(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::base(Family::ColorCubes)
        }
    }

    fn base(family: Family) -> Self {
        Self {
            family,
            regime: None,
            corridor_length: defaults::corridor_length(),
            corridor_count: defaults::corridor_count(),
            grid_size: defaults::grid_size(),
            cube_count: defaults::cube_count(),
            subepisode_count: defaults::subepisode_count(),
            teleport_prob: defaults::teleport_prob(),
            mode: defaults::mode(),
            retarget: Retarget::default(),
            max_steps: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: "<inline>".into(),
            message: e.message().to_string(),
        })
    }

    /// Reads and parses a config file. The result is not yet validated.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.message().to_string(),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("EnvConfig always serializes")
    }

    /// Regime with the T-Maze default applied.
    pub fn regime_or_default(&self) -> Regime {
        self.regime.unwrap_or(Regime::Fixed)
    }

    /// Step limit with the family default applied.
    pub fn effective_max_steps(&self) -> u32 {
        self.max_steps.unwrap_or_else(|| match self.family {
            Family::TMaze => 4 * self.corridor_count * self.corridor_length,
            Family::ColorCubes => self.subepisode_count * 8 * self.grid_size,
        })
    }

    /// Progress value that counts as success: `n` junctions or `K` phases.
    pub fn target_progress(&self) -> u32 {
        match self.family {
            Family::TMaze => self.corridor_count,
            Family::ColorCubes => self.subepisode_count,
        }
    }

    /// Short human-readable label, e.g. `tmaze/fixed/l5/n3` or `color_cubes/medium`.
    pub fn label(&self) -> String {
        match self.family {
            Family::TMaze => format!(
                "tmaze/{}/l{}/n{}",
                self.regime_or_default(),
                self.corridor_length,
                self.corridor_count
            ),
            Family::ColorCubes => format!(
                "color_cubes/{}/g{}/c{}/k{}",
                self.mode, self.grid_size, self.cube_count, self.subepisode_count
            ),
        }
    }
}

fn positive(name: &str, value: u32) -> Result<(), ConfigError> {
    if value == 0 {
        Err(ConfigError::InvalidDimension(format!(
            "{name} must be >= 1"
        )))
    } else {
        Ok(())
    }
}

/// Checks a config and returns its normalized form.
///
/// Normalization applies the mode-implied fields (Trivial forces `N = K = 1`),
/// the T-Maze default regime and the family default step limit.
pub fn validate_config(config: &EnvConfig) -> Result<EnvConfig, ConfigError> {
    let mut cfg = config.clone();
    if !(0.0..=1.0).contains(&cfg.teleport_prob) {
        return Err(ConfigError::InvalidProbability(cfg.teleport_prob));
    }
    if let Some(0) = cfg.max_steps {
        return Err(ConfigError::InvalidDimension(
            "max_steps must be >= 1".into(),
        ));
    }
    match cfg.family {
        Family::TMaze => {
            positive("corridor_length", cfg.corridor_length)?;
            positive("corridor_count", cfg.corridor_count)?;
            cfg.regime = Some(cfg.regime_or_default());
        }
        Family::ColorCubes => {
            if let Some(regime @ Regime::Uniform) = cfg.regime {
                return Err(ConfigError::InvalidRegimeForFamily {
                    regime,
                    family: cfg.family,
                });
            }
            cfg.regime = None;
            if cfg.mode == Mode::Trivial {
                cfg.cube_count = 1;
                cfg.subepisode_count = 1;
            }
            positive("grid_size", cfg.grid_size)?;
            positive("cube_count", cfg.cube_count)?;
            positive("subepisode_count", cfg.subepisode_count)?;
            let cells = u64::from(cfg.grid_size) * u64::from(cfg.grid_size);
            // the agent spawns on a cube-free cell
            if u64::from(cfg.cube_count) >= cells {
                return Err(ConfigError::InvalidDimension(format!(
                    "cube_count {} needs at least one free cell on a {}x{} grid",
                    cfg.cube_count, cfg.grid_size, cfg.grid_size
                )));
            }
        }
    }
    cfg.max_steps = Some(cfg.effective_max_steps());
    Ok(cfg)
}
