use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Family;

/// Value reserved for hidden observation entries.
pub const MASK: f64 = -1.0;

/// Flat observation vector. Hidden entries hold [`MASK`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observation {
    pub values: Vec<f64>,
}

impl Observation {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_masked(&self, index: usize) -> bool {
        self.values[index] == MASK
    }
}

impl std::ops::Index<usize> for Observation {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InfoValue {
    Bool(bool),
    Int(i64),
}

impl From<bool> for InfoValue {
    fn from(v: bool) -> Self {
        InfoValue::Bool(v)
    }
}

impl From<i64> for InfoValue {
    fn from(v: i64) -> Self {
        InfoValue::Int(v)
    }
}

pub type Info = BTreeMap<String, InfoValue>;

pub fn info_flag(info: &Info, key: &str) -> bool {
    matches!(info.get(key), Some(InfoValue::Bool(true)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub obs: Observation,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub info: Info,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("step called on a finished episode")]
    SteppedAfterDone,
    #[error("action index {index} out of range (expected < {count})")]
    InvalidAction { index: usize, count: usize },
}

/// Finite discrete action set.
pub trait DiscreteAction: Copy + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const COUNT: usize;

    fn index(self) -> usize;

    fn from_index(index: usize) -> Option<Self>;
}

/// Episodic environment: `reset` then `step` until terminated or truncated.
pub trait Environment {
    type Action: DiscreteAction;

    fn family(&self) -> Family;

    fn reset(&mut self, seed: u64) -> Observation;

    fn step(&mut self, action: Self::Action) -> Result<StepResult, EnvError>;

    fn observation_len(&self) -> usize;

    /// Whether the episode finished with every junction / phase completed.
    fn succeeded(&self) -> bool;

    /// Number of corridors passed or phases completed so far.
    fn progress(&self) -> u32;

    /// Progress that counts as success.
    fn target_progress(&self) -> u32;

    /// One-line (T-Maze) or grid (Color-Cubes) description of the true state.
    fn render(&self) -> String;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error(
        "inference ambiguous: {removed} cube positions vanished and {added} appeared in one update"
    )]
    InferenceAmbiguous { removed: usize, added: usize },
    #[error("agent has no belief about the cube layout yet")]
    NoBelief,
    #[error("observation of length {got} is not valid for this agent (expected {expected})")]
    BadObservation { expected: String, got: usize },
}

/// Policy with internal state. `reset` starts a new episode.
pub trait Agent<A> {
    fn reset(&mut self, seed: u64);

    fn act(&mut self, obs: &Observation) -> Result<A, AgentError>;
}

impl<A, T: Agent<A> + ?Sized> Agent<A> for Box<T> {
    fn reset(&mut self, seed: u64) {
        (**self).reset(seed)
    }

    fn act(&mut self, obs: &Observation) -> Result<A, AgentError> {
        (**self).act(obs)
    }
}
