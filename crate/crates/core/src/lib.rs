//! Simulation and evaluation engine for memory-rewriting benchmarks.
//!
//! Two environment families probe whether an agent can replace outdated
//! memory rather than merely retain it:
//!
//! - [`tmaze::TMaze`]: chained corridors, each with a fresh cue that
//!   supersedes the previous one.
//! - [`cubes::ColorCubes`]: a grid of colored cubes whose non-target members
//!   teleport, with event-gated and (in Extreme mode) color-free updates.
//!
//! Everything is seeded through [`rng::RngStream`] so that episodes, reports
//! and sweeps are bit-for-bit reproducible.

pub mod agents;
pub mod config;
pub mod cubes;
pub mod episodic;
pub mod eval;
pub mod horizon;
pub mod memory;
pub mod rng;
pub mod rollout;
pub mod tmaze;
pub mod types;

pub use config::{validate_config, ConfigError, EnvConfig, Family, Mode, Regime};
pub use eval::{run_eval, EvalReport, EvalSpec};
pub use rollout::{progress_metric, run_episode, EpisodeLog};
pub use types::{Agent, Environment, Observation, StepResult, MASK};
