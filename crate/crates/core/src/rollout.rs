//! Single-episode rollouts and their logs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Family;
use crate::types::{
    info_flag, Agent, AgentError, DiscreteAction, EnvError, Environment, Info, Observation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RolloutError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Transition taken at timestep `t`: action `a_t`, reward `r_t`, next observation `o_{t+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u32,
    pub action: String,
    pub action_index: usize,
    pub reward: f64,
    pub obs: Observation,
    pub terminated: bool,
    pub truncated: bool,
    pub info: Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub family: Family,
    pub seed: u64,
    pub initial_obs: Observation,
    pub steps: Vec<StepRecord>,
    pub total_return: f64,
    pub success: bool,
    /// Progress needed for success: `n` corridors or `K` phases.
    pub target_progress: u32,
}

impl EpisodeLog {
    pub fn terminated(&self) -> bool {
        self.steps.last().is_some_and(|s| s.terminated)
    }

    pub fn truncated(&self) -> bool {
        self.steps.last().is_some_and(|s| s.truncated)
    }

    /// Observation seen at timestep `t` (`o_0` is the reset observation).
    pub fn obs_at(&self, t: usize) -> &Observation {
        if t == 0 {
            &self.initial_obs
        } else {
            &self.steps[t - 1].obs
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("EpisodeLog always serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Corridors passed (T-Maze) or phases completed (Color-Cubes), read from the step annotations.
pub fn progress_metric(log: &EpisodeLog) -> u32 {
    let key = match log.family {
        Family::TMaze => "junction_correct",
        Family::ColorCubes => "interaction_success",
    };
    log.steps.iter().filter(|s| info_flag(&s.info, key)).count() as u32
}

pub fn run_episode<E, A>(env: &mut E, agent: &mut A, seed: u64) -> Result<EpisodeLog, RolloutError>
where
    E: Environment,
    A: Agent<E::Action> + ?Sized,
{
    rollout(env, agent, seed, None)
}

/// Like [`run_episode`], also appending one trace entry per step to `trace`.
pub fn run_episode_traced<E, A>(
    env: &mut E,
    agent: &mut A,
    seed: u64,
    trace: &mut Vec<String>,
) -> Result<EpisodeLog, RolloutError>
where
    E: Environment,
    A: Agent<E::Action> + ?Sized,
{
    rollout(env, agent, seed, Some(trace))
}

fn rollout<E, A>(
    env: &mut E,
    agent: &mut A,
    seed: u64,
    mut trace: Option<&mut Vec<String>>,
) -> Result<EpisodeLog, RolloutError>
where
    E: Environment,
    A: Agent<E::Action> + ?Sized,
{
    let initial_obs = env.reset(seed);
    agent.reset(seed);
    let mut obs = initial_obs.clone();
    let mut steps = Vec::new();
    let mut total_return = 0.0;
    let mut t = 0u32;
    loop {
        let action = agent.act(&obs)?;
        let before = trace.as_ref().map(|_| env.render());
        let result = env.step(action)?;
        if let (Some(lines), Some(before)) = (trace.as_deref_mut(), before) {
            lines.push(format!(
                "t={t:<4} {before} action={action} reward={:+.2}",
                result.reward
            ));
        }
        total_return += result.reward;
        let done = result.done();
        obs = result.obs.clone();
        steps.push(StepRecord {
            t,
            action: action.to_string(),
            action_index: action.index(),
            reward: result.reward,
            obs: result.obs,
            terminated: result.terminated,
            truncated: result.truncated,
            info: result.info,
        });
        t += 1;
        if done {
            break;
        }
    }
    Ok(EpisodeLog {
        family: env.family(),
        seed,
        initial_obs,
        steps,
        total_return,
        success: env.succeeded(),
        target_progress: env.target_progress(),
    })
}
