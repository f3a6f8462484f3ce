//! Color-Cubes reference agents.

use rand::seq::SliceRandom;

use crate::cubes::{Cell, CubesAction, ParsedObs};
use crate::rng::{RngStream, Stream};
use crate::types::{Agent, AgentError, Observation};

fn parse(obs: &Observation) -> Result<ParsedObs, AgentError> {
    ParsedObs::parse(obs).ok_or(AgentError::BadObservation {
        expected: "2 + 3N + 1".into(),
        got: obs.len(),
    })
}

/// Greedy Manhattan step, x axis first.
pub fn step_towards(from: Cell, to: Cell) -> CubesAction {
    if from.x < to.x {
        CubesAction::MoveRight
    } else if from.x > to.x {
        CubesAction::MoveLeft
    } else if from.y < to.y {
        CubesAction::MoveDown
    } else if from.y > to.y {
        CubesAction::MoveUp
    } else {
        CubesAction::Interact
    }
}

/// Keeps a full color-position map and rewrites it on every update.
///
/// Positions-only updates are resolved by set difference against the map:
/// exactly one remembered cell disappears and one new cell appears, and the
/// cube that was on the vanished cell is relabelled to the new one.
#[derive(Clone, Debug, Default)]
pub struct OracleCubes {
    map: Vec<(Cell, u32)>,
    inferences: u32,
    full_updates: u32,
}

impl OracleCubes {
    /// Positions-only updates in which a moved cube was identified.
    pub fn inferences(&self) -> u32 {
        self.inferences
    }

    pub fn full_updates(&self) -> u32 {
        self.full_updates
    }

    pub fn belief(&self) -> &[(Cell, u32)] {
        &self.map
    }

    fn infer_moved(&mut self, positions: &[Cell]) -> Result<(), AgentError> {
        if self.map.is_empty() {
            return Err(AgentError::NoBelief);
        }
        let removed: Vec<usize> = (0..self.map.len())
            .filter(|&i| !positions.contains(&self.map[i].0))
            .collect();
        let added: Vec<Cell> = positions
            .iter()
            .copied()
            .filter(|p| !self.map.iter().any(|(c, _)| c == p))
            .collect();
        match (removed.as_slice(), added.as_slice()) {
            ([], []) => Ok(()),
            ([i], [cell]) => {
                self.map[*i].0 = *cell;
                self.inferences += 1;
                Ok(())
            }
            _ => Err(AgentError::InferenceAmbiguous {
                removed: removed.len(),
                added: added.len(),
            }),
        }
    }
}

impl Agent<CubesAction> for OracleCubes {
    fn reset(&mut self, _seed: u64) {
        self.map.clear();
        self.inferences = 0;
        self.full_updates = 0;
    }

    fn act(&mut self, obs: &Observation) -> Result<CubesAction, AgentError> {
        let parsed = parse(obs)?;
        if let Some(cubes) = &parsed.cubes {
            if parsed.is_full() {
                self.map = cubes.iter().map(|(cell, c)| (*cell, c.unwrap())).collect();
                self.full_updates += 1;
            } else {
                let positions: Vec<Cell> = cubes.iter().map(|(cell, _)| *cell).collect();
                self.infer_moved(&positions)?;
            }
        }
        let target = self
            .map
            .iter()
            .find(|(_, color)| *color == parsed.target_color)
            .map(|(cell, _)| *cell)
            .ok_or(AgentError::NoBelief)?;
        Ok(step_towards(parsed.agent, target))
    }
}

/// Uses color information only on the step it is shown.
///
/// Between updates it remembers which cells were occupied (but not by which
/// color), wanders towards a randomly chosen one each step and tries
/// `INTERACT` whenever it stands on one.
#[derive(Clone, Debug)]
pub struct AmnesiacCubes {
    occupied: Vec<Cell>,
    last_interact: Option<Cell>,
    rng: RngStream,
}

impl Default for AmnesiacCubes {
    fn default() -> Self {
        Self {
            occupied: Vec::new(),
            last_interact: None,
            rng: RngStream::new(0, Stream::Agent),
        }
    }
}

impl Agent<CubesAction> for AmnesiacCubes {
    fn reset(&mut self, seed: u64) {
        self.occupied.clear();
        self.last_interact = None;
        self.rng = RngStream::new(seed, Stream::Agent);
    }

    fn act(&mut self, obs: &Observation) -> Result<CubesAction, AgentError> {
        let parsed = parse(obs)?;
        let here = parsed.agent;
        if let Some(cubes) = &parsed.cubes {
            self.occupied = cubes.iter().map(|(cell, _)| *cell).collect();
            self.last_interact = None;
            if parsed.is_full() {
                let target = cubes
                    .iter()
                    .find(|(_, c)| *c == Some(parsed.target_color))
                    .map(|(cell, _)| *cell);
                if let Some(target) = target {
                    return Ok(self.commit(step_towards(here, target), here));
                }
            }
        }
        if self.occupied.contains(&here) && self.last_interact != Some(here) {
            return Ok(self.commit(CubesAction::Interact, here));
        }
        let candidates: Vec<Cell> = self
            .occupied
            .iter()
            .copied()
            .filter(|&c| c != here && Some(c) != self.last_interact)
            .collect();
        let action = match candidates.choose(&mut self.rng) {
            Some(&goal) => step_towards(here, goal),
            None => *CubesAction::MOVES.choose(&mut self.rng).unwrap(),
        };
        Ok(self.commit(action, here))
    }
}

impl AmnesiacCubes {
    fn commit(&mut self, action: CubesAction, here: Cell) -> CubesAction {
        if action == CubesAction::Interact {
            self.last_interact = Some(here);
        }
        action
    }
}
