//! Index-action episodic API for foreign bindings and training loops.
//!
//! [`DynEnv`] hides the family behind `reset(seed) -> obs` and
//! `step(action_index) -> StepResult`; [`VecEnv`] steps several instances in
//! lockstep. No game logic lives here: every transition is the engine's own.

use std::path::Path;

use rayon::prelude::*;

use crate::config::{validate_config, ConfigError, EnvConfig, Family};
use crate::cubes::{ColorCubes, CubesAction};
use crate::tmaze::{TMaze, TMazeAction};
use crate::types::{DiscreteAction, EnvError, Environment, Observation, StepResult};

#[derive(Clone, Debug)]
pub enum DynEnv {
    TMaze(TMaze),
    ColorCubes(Box<ColorCubes>),
}

fn decode<A: DiscreteAction>(index: usize) -> Result<A, EnvError> {
    A::from_index(index).ok_or(EnvError::InvalidAction {
        index,
        count: A::COUNT,
    })
}

impl DynEnv {
    pub fn from_config(config: &EnvConfig) -> Result<Self, ConfigError> {
        let config = validate_config(config)?;
        Ok(match config.family {
            Family::TMaze => DynEnv::TMaze(TMaze::new(&config)?),
            Family::ColorCubes => DynEnv::ColorCubes(Box::new(ColorCubes::new(&config)?)),
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_config(&EnvConfig::load(path)?)
    }

    pub fn family(&self) -> Family {
        match self {
            DynEnv::TMaze(e) => e.family(),
            DynEnv::ColorCubes(e) => e.family(),
        }
    }

    pub fn action_count(&self) -> usize {
        match self {
            DynEnv::TMaze(_) => TMazeAction::COUNT,
            DynEnv::ColorCubes(_) => CubesAction::COUNT,
        }
    }

    pub fn observation_len(&self) -> usize {
        match self {
            DynEnv::TMaze(e) => e.observation_len(),
            DynEnv::ColorCubes(e) => e.observation_len(),
        }
    }

    pub fn reset(&mut self, seed: u64) -> Observation {
        match self {
            DynEnv::TMaze(e) => e.reset(seed),
            DynEnv::ColorCubes(e) => e.reset(seed),
        }
    }

    pub fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        match self {
            DynEnv::TMaze(e) => e.step(decode(action)?),
            DynEnv::ColorCubes(e) => e.step(decode(action)?),
        }
    }

    pub fn succeeded(&self) -> bool {
        match self {
            DynEnv::TMaze(e) => e.succeeded(),
            DynEnv::ColorCubes(e) => e.succeeded(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            DynEnv::TMaze(e) => e.render(),
            DynEnv::ColorCubes(e) => e.render(),
        }
    }
}

/// Lockstep batch of independent environments.
///
/// Finished instances are reset automatically on the next `step` with seed
/// `seeds[i] + episodes_started[i]`, and the result of that step is the first
/// transition of the new episode.
#[derive(Clone, Debug)]
pub struct VecEnv {
    envs: Vec<DynEnv>,
    seeds: Vec<u64>,
    episodes: Vec<u64>,
    needs_reset: Vec<bool>,
}

impl VecEnv {
    pub fn new(config: &EnvConfig, count: usize) -> Result<Self, ConfigError> {
        let env = DynEnv::from_config(config)?;
        Ok(Self {
            envs: vec![env; count],
            seeds: vec![0; count],
            episodes: vec![0; count],
            needs_reset: vec![true; count],
        })
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    pub fn reset(&mut self, seeds: &[u64]) -> Vec<Observation> {
        assert_eq!(seeds.len(), self.envs.len(), "one seed per environment");
        self.seeds = seeds.to_vec();
        self.episodes = vec![1; seeds.len()];
        self.needs_reset = vec![false; seeds.len()];
        self.envs
            .par_iter_mut()
            .zip(seeds.par_iter())
            .map(|(env, &seed)| env.reset(seed))
            .collect()
    }

    pub fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>, EnvError> {
        assert_eq!(actions.len(), self.envs.len(), "one action per environment");
        for i in 0..self.envs.len() {
            if self.needs_reset[i] {
                let seed = self.seeds[i].wrapping_add(self.episodes[i]);
                self.envs[i].reset(seed);
                self.episodes[i] += 1;
                self.needs_reset[i] = false;
            }
        }
        let results: Vec<StepResult> = self
            .envs
            .par_iter_mut()
            .zip(actions.par_iter())
            .map(|(env, &a)| env.step(a))
            .collect::<Result<_, _>>()?;
        for (flag, r) in self.needs_reset.iter_mut().zip(&results) {
            *flag = r.done();
        }
        Ok(results)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, Regime};

    #[test]
    fn observation_lengths() {
        let t = DynEnv::from_config(&EnvConfig::tmaze(Regime::Fixed, 5, 1)).unwrap();
        assert_eq!(t.observation_len(), 3);
        assert_eq!(t.action_count(), 3);
        let c = DynEnv::from_config(&EnvConfig::cubes(Mode::Medium)).unwrap();
        assert_eq!(c.observation_len(), 2 + 3 * 3 + 1);
        assert_eq!(c.action_count(), 5);
    }

    #[test]
    fn invalid_config_propagates() {
        let mut cfg = EnvConfig::cubes(Mode::Medium);
        cfg.cube_count = 30;
        assert!(matches!(
            DynEnv::from_config(&cfg),
            Err(ConfigError::InvalidDimension(_))
        ));
    }

    #[test]
    fn invalid_action_index() {
        let mut e = DynEnv::from_config(&EnvConfig::tmaze(Regime::Fixed, 5, 1)).unwrap();
        e.reset(0);
        assert_eq!(
            e.step(3),
            Err(EnvError::InvalidAction { index: 3, count: 3 })
        );
    }

    #[test]
    fn vec_env_auto_resets() {
        let mut cfg = EnvConfig::tmaze(Regime::Fixed, 1, 1);
        cfg.max_steps = Some(1);
        let mut v = VecEnv::new(&cfg, 4).unwrap();
        let obs = v.reset(&[0, 1, 2, 3]);
        assert_eq!(obs.len(), 4);
        for _ in 0..5 {
            let res = v.step(&[0, 0, 0, 0]).unwrap();
            assert!(res.iter().all(|r| r.truncated));
        }
    }
}
