//! Sweep manifests: lists of train/eval configurations to evaluate.
//!
//! A manifest file is TOML with one `[[spec]]` table per training config:
//!
//! ```toml
//! [[spec]]
//! agents = ["oracle", "stale"]   # optional, defaults to every agent
//! n_runs = 10                    # optional
//! episodes_per_run = 100         # optional
//!
//! [spec.train]
//! family = "tmaze"
//! regime = "fixed"
//! corridor_length = 5
//! corridor_count = 3
//!
//! [[spec.eval]]                  # optional, defaults to the train config
//! family = "tmaze"
//! corridor_length = 5
//! corridor_count = 10
//! ```
//!
//! Two manifests are bundled: `paper_grid` (every T-Maze config at
//! l in {5, 10}, n in {1, 3, 5, 10} for both regimes, plus the three
//! Color-Cubes modes) and `paper_generalization` (each of those T-Maze
//! configs evaluated at every n for its regime and l).

use std::path::Path;

use memrw_core::agents::AgentKind;
use memrw_core::eval::{EvalError, EvalSpec, DEFAULT_EPISODES, DEFAULT_RUNS};
use memrw_core::{EnvConfig, Mode, Regime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BUNDLED: [&str; 2] = ["paper_grid", "paper_generalization"];

pub const GRID_LENGTHS: [u32; 2] = [5, 10];
pub const GRID_COUNTS: [u32; 4] = [1, 3, 5, 10];

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Parse { path: String, message: String },
    #[error("manifest {0} contains no specs")]
    Empty(String),
    #[error("no runnable (spec, agent) pair in manifest {0}")]
    NothingToRun(String),
    #[error("spec {index} ({label}), agent {agent}: {source}")]
    Invalid {
        index: usize,
        label: String,
        agent: AgentKind,
        #[source]
        source: EvalError,
    },
}

fn default_runs() -> u32 {
    DEFAULT_RUNS
}

fn default_episodes() -> u32 {
    DEFAULT_EPISODES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    pub train: EnvConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eval: Vec<EnvConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<AgentKind>,
    #[serde(default = "default_runs")]
    pub n_runs: u32,
    #[serde(default = "default_episodes")]
    pub episodes_per_run: u32,
}

impl SpecEntry {
    pub fn matched(train: EnvConfig) -> Self {
        Self {
            train,
            eval: Vec::new(),
            agents: Vec::new(),
            n_runs: DEFAULT_RUNS,
            episodes_per_run: DEFAULT_EPISODES,
        }
    }

    fn eval_configs(&self) -> Vec<EnvConfig> {
        if self.eval.is_empty() {
            vec![self.train.clone()]
        } else {
            self.eval.clone()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepManifest {
    #[serde(default)]
    pub spec: Vec<SpecEntry>,
}

fn tmaze_grid() -> Vec<EnvConfig> {
    let mut out = Vec::new();
    for regime in [Regime::Fixed, Regime::Uniform] {
        for l in GRID_LENGTHS {
            for n in GRID_COUNTS {
                out.push(EnvConfig::tmaze(regime, l, n));
            }
        }
    }
    out
}

impl SweepManifest {
    pub fn paper_grid() -> Self {
        let cubes = [Mode::Trivial, Mode::Medium, Mode::Extreme].map(EnvConfig::cubes);
        Self {
            spec: tmaze_grid()
                .into_iter()
                .chain(cubes)
                .map(SpecEntry::matched)
                .collect(),
        }
    }

    pub fn paper_generalization() -> Self {
        Self {
            spec: tmaze_grid()
                .into_iter()
                .map(|train| {
                    let eval = GRID_COUNTS
                        .iter()
                        .map(|&n| {
                            EnvConfig::tmaze(train.regime_or_default(), train.corridor_length, n)
                        })
                        .collect();
                    SpecEntry {
                        eval,
                        ..SpecEntry::matched(train)
                    }
                })
                .collect(),
        }
    }

    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "paper_grid" => Some(Self::paper_grid()),
            "paper_generalization" => Some(Self::paper_generalization()),
            _ => None,
        }
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ManifestError> {
        toml::from_str(text).map_err(|e| ManifestError::Parse {
            path: origin.to_string(),
            message: e.message().to_string(),
        })
    }

    /// Resolves a bundled manifest name or reads a TOML file.
    pub fn resolve(name_or_path: &str) -> Result<Self, ManifestError> {
        if let Some(m) = Self::bundled(name_or_path) {
            return Ok(m);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest always serializes")
    }

    /// Expands every spec into one validated [`EvalSpec`] per agent.
    ///
    /// `agents` overrides the per-spec agent lists when non-empty. Pairs whose
    /// agent cannot act in the spec's family are skipped; any other problem
    /// fails the whole manifest before anything runs.
    pub fn expand(
        &self,
        origin: &str,
        agents: &[AgentKind],
        base_seed: u64,
    ) -> Result<Vec<EvalSpec>, ManifestError> {
        if self.spec.is_empty() {
            return Err(ManifestError::Empty(origin.to_string()));
        }
        let mut out = Vec::new();
        for (index, entry) in self.spec.iter().enumerate() {
            let chosen: &[AgentKind] = if !agents.is_empty() {
                agents
            } else if !entry.agents.is_empty() {
                &entry.agents
            } else {
                &AgentKind::ALL
            };
            for &agent in chosen {
                if !agent.supports(entry.train.family) {
                    continue;
                }
                let spec = EvalSpec {
                    train_config: entry.train.clone(),
                    eval_configs: entry.eval_configs(),
                    n_runs: entry.n_runs,
                    episodes_per_run: entry.episodes_per_run,
                    agent,
                    base_seed,
                };
                let spec = spec.validate().map_err(|source| ManifestError::Invalid {
                    index,
                    label: entry.train.label(),
                    agent,
                    source,
                })?;
                out.push(spec);
            }
        }
        if out.is_empty() {
            return Err(ManifestError::NothingToRun(origin.to_string()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use memrw_core::eval::{classify_generalization, Generalization};
    use memrw_core::Family;

    #[test]
    fn paper_grid_shape() {
        let m = SweepManifest::paper_grid();
        assert_eq!(m.spec.len(), 19);
        let tmaze: Vec<_> = m
            .spec
            .iter()
            .filter(|s| s.train.family == Family::TMaze)
            .collect();
        assert_eq!(tmaze.len(), 16);
        let cubes = &m.spec[16..];
        assert!(cubes.iter().all(|s| s.train.grid_size == 5
            && s.train.cube_count == 3
            && s.train.subepisode_count == 3
            && s.train.teleport_prob == 0.3));
    }

    #[test]
    fn generalization_grid_evaluates_every_count() {
        let m = SweepManifest::paper_generalization();
        assert_eq!(m.spec.len(), 16);
        for s in &m.spec {
            assert_eq!(s.eval.len(), 4);
            let matched = s
                .eval
                .iter()
                .filter(|e| {
                    classify_generalization(&s.train, e).unwrap() == Generalization::Matched
                })
                .count();
            assert_eq!(matched, 1);
        }
    }

    #[test]
    fn expansion_skips_incompatible_agents() {
        let specs = SweepManifest::paper_grid()
            .expand("paper_grid", &[], 0)
            .unwrap();
        // 16 T-Maze configs x 4 agents + 3 cube modes x 2 agents
        assert_eq!(specs.len(), 16 * 4 + 3 * 2);
        let only_latch = SweepManifest::paper_grid()
            .expand("paper_grid", &[AgentKind::Latch], 0)
            .unwrap();
        assert_eq!(only_latch.len(), 16);
    }

    #[test]
    fn empty_and_unrunnable_manifests_fail() {
        let empty = SweepManifest::default();
        assert!(matches!(
            empty.expand("x", &[], 0),
            Err(ManifestError::Empty(_))
        ));
        let cubes_only = SweepManifest {
            spec: vec![SpecEntry::matched(EnvConfig::cubes(Mode::Medium))],
        };
        assert!(matches!(
            cubes_only.expand("x", &[AgentKind::Stale], 0),
            Err(ManifestError::NothingToRun(_))
        ));
    }

    #[test]
    fn invalid_spec_fails_before_running() {
        let mut bad = EnvConfig::tmaze(Regime::Fixed, 5, 3);
        bad.corridor_count = 0;
        let m = SweepManifest {
            spec: vec![
                SpecEntry::matched(EnvConfig::tmaze(Regime::Fixed, 5, 1)),
                SpecEntry::matched(bad),
            ],
        };
        assert!(matches!(
            m.expand("x", &[AgentKind::Oracle], 0),
            Err(ManifestError::Invalid { index: 1, .. })
        ));
    }

    #[test]
    fn toml_round_trip() {
        let m = SweepManifest::paper_generalization();
        let text = m.to_toml_string();
        assert_eq!(SweepManifest::from_toml_str(&text, "inline").unwrap(), m);
    }

    #[test]
    fn parses_hand_written_manifest() {
        let text = r#"
            [[spec]]
            agents = ["oracle", "stale"]
            n_runs = 2
            episodes_per_run = 5

            [spec.train]
            family = "tmaze"
            regime = "uniform"
            corridor_length = 4
            corridor_count = 2

            [[spec.eval]]
            family = "tmaze"
            regime = "uniform"
            corridor_length = 4
            corridor_count = 6
        "#;
        let m = SweepManifest::from_toml_str(text, "inline").unwrap();
        let specs = m.expand("inline", &[], 7).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].eval_configs[0].corridor_count, 6);
        assert_eq!(specs[1].base_seed, 7);
        assert!(SweepManifest::from_toml_str("[[spec]]\nbogus = 1\n", "inline").is_err());
    }
}
