//! Endless T-Maze.
//!
//! A chain of `n` corridors. Each corridor shows a left/right cue on its first
//! cell only and ends in a junction; the turn taken there must match that
//! corridor's cue. A correct turn moves the agent to the start of the next
//! corridor, whose fresh cue supersedes every earlier one. A wrong turn ends
//! the episode.
//!
//! Observation: `(cue_left, cue_right, position / corridor_length)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{validate_config, ConfigError, EnvConfig, Family, Regime};
use crate::rng::{RngStream, Stream};
use crate::types::{DiscreteAction, EnvError, Environment, Info, Observation, StepResult};

pub const OBS_LEN: usize = 3;
pub const STEP_PENALTY: f64 = -0.01;
pub const CORRECT_TURN: f64 = 1.0;
pub const WRONG_TURN: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cue {
    Left,
    Right,
}

impl Cue {
    pub fn one_hot(self) -> [f64; 2] {
        match self {
            Cue::Left => [1.0, 0.0],
            Cue::Right => [0.0, 1.0],
        }
    }

    pub fn turn(self) -> TMazeAction {
        match self {
            Cue::Left => TMazeAction::TurnLeft,
            Cue::Right => TMazeAction::TurnRight,
        }
    }

    /// Decodes the cue part of an observation; `None` for `(0, 0)`.
    pub fn from_obs(cue_left: f64, cue_right: f64) -> Option<Cue> {
        if cue_left > 0.5 {
            Some(Cue::Left)
        } else if cue_right > 0.5 {
            Some(Cue::Right)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TMazeAction {
    MoveForward,
    TurnLeft,
    TurnRight,
}

impl TMazeAction {
    fn turn_direction(self) -> Option<Cue> {
        match self {
            TMazeAction::MoveForward => None,
            TMazeAction::TurnLeft => Some(Cue::Left),
            TMazeAction::TurnRight => Some(Cue::Right),
        }
    }
}

impl fmt::Display for TMazeAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TMazeAction::MoveForward => "MOVE_FORWARD",
            TMazeAction::TurnLeft => "TURN_LEFT",
            TMazeAction::TurnRight => "TURN_RIGHT",
        })
    }
}

impl DiscreteAction for TMazeAction {
    const COUNT: usize = 3;

    fn index(self) -> usize {
        self as usize
    }

    fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(TMazeAction::MoveForward),
            1 => Some(TMazeAction::TurnLeft),
            2 => Some(TMazeAction::TurnRight),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TMazeState {
    pub corridor_index: usize,
    /// Cells advanced in the current corridor; equals its length at the junction.
    pub position: u32,
    pub corridor_lengths: Vec<u32>,
    pub cues: Vec<Cue>,
    pub steps_elapsed: u32,
    pub corridors_passed: u32,
    pub done: bool,
    pub success: bool,
}

impl TMazeState {
    pub fn current_length(&self) -> u32 {
        self.corridor_lengths[self.corridor_index]
    }

    pub fn at_junction(&self) -> bool {
        self.position == self.current_length()
    }

    pub fn cue_visible(&self) -> bool {
        self.position == 0
    }
}

/// Observation of a state: the cue is one-hot only at position 0.
pub fn observe(state: &TMazeState) -> Observation {
    let cue = if state.cue_visible() {
        state.cues[state.corridor_index].one_hot()
    } else {
        [0.0, 0.0]
    };
    let position = f64::from(state.position) / f64::from(state.current_length());
    Observation::new(vec![cue[0], cue[1], position])
}

/// Draws corridor lengths and cues for one episode.
pub fn sample_layout(config: &EnvConfig, seed: u64) -> (Vec<u32>, Vec<Cue>) {
    let n = config.corridor_count as usize;
    let l_max = config.corridor_length;
    let lengths = match config.regime_or_default() {
        Regime::Fixed => vec![l_max; n],
        Regime::Uniform => {
            let mut rng = RngStream::new(seed, Stream::CorridorLength);
            (0..n).map(|_| rng.gen_range(1..=l_max)).collect()
        }
    };
    let mut rng = RngStream::new(seed, Stream::Cue);
    let cues = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Cue::Right
            } else {
                Cue::Left
            }
        })
        .collect();
    (lengths, cues)
}

#[derive(Clone, Debug)]
pub struct TMaze {
    config: EnvConfig,
    max_steps: u32,
    state: TMazeState,
}

impl TMaze {
    pub fn new(config: &EnvConfig) -> Result<Self, ConfigError> {
        let config = validate_config(config)?;
        assert_eq!(
            config.family,
            Family::TMaze,
            "TMaze built from a non-tmaze config"
        );
        let max_steps = config.effective_max_steps();
        let (lengths, cues) = sample_layout(&config, config.seed);
        Ok(Self {
            config,
            max_steps,
            state: fresh_state(lengths, cues),
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &TMazeState {
        &self.state
    }

    /// Starts an episode with an explicit layout instead of a sampled one.
    pub fn reset_with(&mut self, lengths: Vec<u32>, cues: Vec<Cue>) -> Observation {
        assert_eq!(lengths.len(), cues.len(), "one cue per corridor");
        assert!(!lengths.is_empty() && lengths.iter().all(|&l| l >= 1));
        self.state = fresh_state(lengths, cues);
        observe(&self.state)
    }
}

fn fresh_state(corridor_lengths: Vec<u32>, cues: Vec<Cue>) -> TMazeState {
    TMazeState {
        corridor_index: 0,
        position: 0,
        corridor_lengths,
        cues,
        steps_elapsed: 0,
        corridors_passed: 0,
        done: false,
        success: false,
    }
}

impl Environment for TMaze {
    type Action = TMazeAction;

    fn family(&self) -> Family {
        Family::TMaze
    }

    fn reset(&mut self, seed: u64) -> Observation {
        let (lengths, cues) = sample_layout(&self.config, seed);
        self.reset_with(lengths, cues)
    }

    fn step(&mut self, action: TMazeAction) -> Result<StepResult, EnvError> {
        let s = &mut self.state;
        if s.done {
            return Err(EnvError::SteppedAfterDone);
        }
        s.steps_elapsed += 1;
        let mut info = Info::new();
        let mut terminated = false;

        let reward = if !s.at_junction() {
            if action == TMazeAction::MoveForward {
                s.position += 1;
            }
            STEP_PENALTY
        } else {
            match action.turn_direction() {
                None => STEP_PENALTY,
                Some(dir) if dir == s.cues[s.corridor_index] => {
                    info.insert("junction_correct".into(), true.into());
                    s.corridors_passed += 1;
                    if s.corridor_index + 1 == s.cues.len() {
                        terminated = true;
                        s.success = true;
                    } else {
                        s.corridor_index += 1;
                        s.position = 0;
                    }
                    CORRECT_TURN
                }
                Some(_) => {
                    info.insert("junction_correct".into(), false.into());
                    terminated = true;
                    WRONG_TURN
                }
            }
        };

        let truncated = !terminated && s.steps_elapsed >= self.max_steps;
        s.done = terminated || truncated;
        info.insert("corridor".into(), (s.corridor_index as i64).into());
        info.insert("position".into(), i64::from(s.position).into());
        info.insert("cue_visible".into(), s.cue_visible().into());
        Ok(StepResult {
            obs: observe(s),
            reward,
            terminated,
            truncated,
            info,
        })
    }

    fn observation_len(&self) -> usize {
        OBS_LEN
    }

    fn succeeded(&self) -> bool {
        self.state.success
    }

    fn progress(&self) -> u32 {
        self.state.corridors_passed
    }

    fn target_progress(&self) -> u32 {
        self.state.cues.len() as u32
    }

    fn render(&self) -> String {
        let s = &self.state;
        format!(
            "corridor={} position={}/{} cue_visible={}",
            s.corridor_index,
            s.position,
            s.current_length(),
            u8::from(s.cue_visible())
        )
    }
}
