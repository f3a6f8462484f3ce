//! Scripted T-Maze agents. All of them read only the observation vector.

use rand::Rng;

use crate::rng::{RngStream, Stream};
use crate::tmaze::{Cue, TMazeAction, OBS_LEN};
use crate::types::{Agent, AgentError, Observation};

fn decode(obs: &Observation) -> Result<(Option<Cue>, bool), AgentError> {
    if obs.len() != OBS_LEN {
        return Err(AgentError::BadObservation {
            expected: OBS_LEN.to_string(),
            got: obs.len(),
        });
    }
    Ok((Cue::from_obs(obs[0], obs[1]), obs[2] >= 1.0))
}

/// Overwrites its stored cue with every new cue; turns per the stored cue.
#[derive(Clone, Debug, Default)]
pub struct OracleTMaze {
    cue: Option<Cue>,
}

impl Agent<TMazeAction> for OracleTMaze {
    fn reset(&mut self, _seed: u64) {
        self.cue = None;
    }

    fn act(&mut self, obs: &Observation) -> Result<TMazeAction, AgentError> {
        let (cue, junction) = decode(obs)?;
        if cue.is_some() {
            self.cue = cue;
        }
        Ok(match (junction, self.cue) {
            (true, Some(c)) => c.turn(),
            _ => TMazeAction::MoveForward,
        })
    }
}

/// Keeps the first cue of the episode forever.
#[derive(Clone, Debug, Default)]
pub struct StaleAgent {
    cue: Option<Cue>,
}

impl Agent<TMazeAction> for StaleAgent {
    fn reset(&mut self, _seed: u64) {
        self.cue = None;
    }

    fn act(&mut self, obs: &Observation) -> Result<TMazeAction, AgentError> {
        let (cue, junction) = decode(obs)?;
        if self.cue.is_none() {
            self.cue = cue;
        }
        Ok(match (junction, self.cue) {
            (true, Some(c)) => c.turn(),
            _ => TMazeAction::MoveForward,
        })
    }
}

/// Memoryless: walks forward and flips a fair coin at each junction.
#[derive(Clone, Debug)]
pub struct RandomTurnAgent {
    rng: RngStream,
}

impl Default for RandomTurnAgent {
    fn default() -> Self {
        Self {
            rng: RngStream::new(0, Stream::Agent),
        }
    }
}

impl Agent<TMazeAction> for RandomTurnAgent {
    fn reset(&mut self, seed: u64) {
        self.rng = RngStream::new(seed, Stream::Agent);
    }

    fn act(&mut self, obs: &Observation) -> Result<TMazeAction, AgentError> {
        let (_, junction) = decode(obs)?;
        Ok(if !junction {
            TMazeAction::MoveForward
        } else if self.rng.gen_bool(0.5) {
            TMazeAction::TurnLeft
        } else {
            TMazeAction::TurnRight
        })
    }
}
