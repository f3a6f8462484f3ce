//! Hand-weighted gated recurrence that latches the most recent cue.
//!
//! The cell is a standard GRU with two hidden units (one per direction) and a
//! two-dimensional cue input:
//!
//! ```text
//! z  = sigmoid(W_z x + U_z h + b_z)          update gate (1 = keep)
//! r  = sigmoid(W_r x + U_r h + b_r)          reset gate
//! h~ = tanh(W_h x + U_h (r * h) + b_h)       candidate
//! h' = z * h + (1 - z) * h~
//! ```
//!
//! With saturation constant `S`, the weights are `W_z = -2S`, `b_z = S` (so a
//! one-hot cue drives `z` to 0 and a blank cue drives it to 1), `W_h = S * I`,
//! and every recurrent matrix zero. A cue therefore overwrites the state with
//! roughly its own one-hot code while a blank input leaves the state alone.
//! In memory-update terms: forget is `z * h`, encode is `(1 - z) * h~` and
//! integrate is the sum.

use crate::memory::{memory_update, MemoryCell, MemoryInput, MemoryState};
use crate::tmaze::TMazeAction;
use crate::types::{Agent, AgentError, Observation};

pub const SATURATION: f64 = 20.0;
pub const WIDTH: usize = 2;

type Mat = [[f64; WIDTH]; WIDTH];
type Vec2 = [f64; WIDTH];

#[derive(Clone, Debug, PartialEq)]
pub struct LatchCellWeights {
    pub w_z: Mat,
    pub u_z: Mat,
    pub b_z: Vec2,
    pub w_r: Mat,
    pub u_r: Mat,
    pub b_r: Vec2,
    pub w_h: Mat,
    pub u_h: Mat,
    pub b_h: Vec2,
}

impl LatchCellWeights {
    pub fn is_finite(&self) -> bool {
        let mats = [self.w_z, self.u_z, self.w_r, self.u_r, self.w_h, self.u_h];
        let vecs = [self.b_z, self.b_r, self.b_h];
        mats.iter().flatten().flatten().all(|v| v.is_finite())
            && vecs.iter().flatten().all(|v| v.is_finite())
    }
}

pub fn latch_cell_construct() -> LatchCellWeights {
    latch_cell_with_saturation(SATURATION)
}

pub fn latch_cell_with_saturation(s: f64) -> LatchCellWeights {
    let zero = [[0.0; WIDTH]; WIDTH];
    LatchCellWeights {
        w_z: [[-2.0 * s; WIDTH]; WIDTH],
        u_z: zero,
        b_z: [s; WIDTH],
        w_r: zero,
        u_r: zero,
        b_r: [s; WIDTH],
        w_h: [[s, 0.0], [0.0, s]],
        u_h: zero,
        b_h: [0.0; WIDTH],
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn affine(w: &Mat, x: &Vec2, u: &Mat, h: &Vec2, b: &Vec2) -> Vec2 {
    let mut out = *b;
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..WIDTH {
            *o += w[i][j] * x[j] + u[i][j] * h[j];
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct LatchCell {
    pub weights: LatchCellWeights,
}

impl Default for LatchCell {
    fn default() -> Self {
        Self {
            weights: latch_cell_construct(),
        }
    }
}

impl LatchCell {
    fn cue(input: &MemoryInput<'_>) -> Vec2 {
        let v = &input.obs.values;
        [
            v.first().copied().unwrap_or(0.0),
            v.get(1).copied().unwrap_or(0.0),
        ]
    }

    fn state(m: &MemoryState) -> Vec2 {
        [m.values[0], m.values[1]]
    }

    fn update_gate(&self, x: &Vec2, h: &Vec2) -> Vec2 {
        let w = &self.weights;
        affine(&w.w_z, x, &w.u_z, h, &w.b_z).map(sigmoid)
    }

    fn candidate(&self, x: &Vec2, h: &Vec2) -> Vec2 {
        let w = &self.weights;
        let r = affine(&w.w_r, x, &w.u_r, h, &w.b_r).map(sigmoid);
        let rh = [r[0] * h[0], r[1] * h[1]];
        affine(&w.w_h, x, &w.u_h, &rh, &w.b_h).map(f64::tanh)
    }
}

impl MemoryCell for LatchCell {
    fn width(&self) -> usize {
        WIDTH
    }

    fn forget(&self, memory: &MemoryState, input: &MemoryInput<'_>) -> MemoryState {
        let h = Self::state(memory);
        let z = self.update_gate(&Self::cue(input), &h);
        MemoryState::new(vec![z[0] * h[0], z[1] * h[1]])
    }

    fn encode(&self, input: &MemoryInput<'_>) -> MemoryState {
        // U_z and U_h are zero, so neither term depends on the previous state
        let x = Self::cue(input);
        let h = [0.0; WIDTH];
        let z = self.update_gate(&x, &h);
        let cand = self.candidate(&x, &h);
        MemoryState::new(vec![(1.0 - z[0]) * cand[0], (1.0 - z[1]) * cand[1]])
    }

    fn integrate(&self, retained: &MemoryState, encoded: &MemoryState) -> MemoryState {
        MemoryState::new(
            retained
                .values
                .iter()
                .zip(&encoded.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Feeds every observation through a [`LatchCell`]; turns by the state's
/// argmax at junctions and walks forward otherwise.
#[derive(Clone, Debug)]
pub struct LatchAgent {
    cell: LatchCell,
    memory: MemoryState,
    last_action: Option<usize>,
}

impl Default for LatchAgent {
    fn default() -> Self {
        Self {
            cell: LatchCell::default(),
            memory: MemoryState::zeros(WIDTH),
            last_action: None,
        }
    }
}

impl LatchAgent {
    pub fn memory(&self) -> &MemoryState {
        &self.memory
    }
}

impl Agent<TMazeAction> for LatchAgent {
    fn reset(&mut self, _seed: u64) {
        self.memory = MemoryState::zeros(WIDTH);
        self.last_action = None;
    }

    fn act(&mut self, obs: &Observation) -> Result<TMazeAction, AgentError> {
        if obs.len() != crate::tmaze::OBS_LEN {
            return Err(AgentError::BadObservation {
                expected: crate::tmaze::OBS_LEN.to_string(),
                got: obs.len(),
            });
        }
        let input = MemoryInput {
            obs,
            action: self.last_action,
        };
        self.memory = memory_update(&self.memory, &input, &self.cell)
            .expect("agent memory always has the cell width");
        let action = if obs[2] >= 1.0 {
            match self.memory.argmax() {
                Some(1) => TMazeAction::TurnRight,
                _ => TMazeAction::TurnLeft,
            }
        } else {
            TMazeAction::MoveForward
        };
        self.last_action = Some(action as usize);
        Ok(action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(cues: &[[f64; 2]]) -> MemoryState {
        let cell = LatchCell::default();
        let mut m = MemoryState::zeros(WIDTH);
        for c in cues {
            let obs = Observation::new(vec![c[0], c[1], 0.5]);
            m = memory_update(&m, &MemoryInput::observation(&obs), &cell).unwrap();
        }
        m
    }

    #[test]
    fn weights_are_finite() {
        assert!(latch_cell_construct().is_finite());
    }

    #[test]
    fn single_cue_is_retained() {
        let m = run(&[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(m.argmax(), Some(0));
    }

    #[test]
    fn new_cue_rewrites_old_one() {
        let m = run(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(m.argmax(), Some(1));
        assert!(m.values[1] > 0.99 && m.values[0].abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn stages_separate() {
        let cell = LatchCell::default();
        let m = MemoryState::new(vec![0.9, 0.1]);
        let cue = Observation::new(vec![0.0, 1.0, 0.0]);
        let blank = Observation::new(vec![0.0, 0.0, 0.4]);

        // a cue wipes the old state
        let f = cell.forget(&m, &MemoryInput::observation(&cue));
        assert!(f.values.iter().all(|v| v.abs() < 1e-8));
        // a blank input keeps it and encodes nothing
        let f = cell.forget(&m, &MemoryInput::observation(&blank));
        assert!((f.values[0] - 0.9).abs() < 1e-8 && (f.values[1] - 0.1).abs() < 1e-8);
        let e = cell.encode(&MemoryInput::observation(&blank));
        assert_eq!(e.values, vec![0.0, 0.0]);
    }

    #[test]
    fn gate_saturation_is_tight() {
        assert!(sigmoid(-SATURATION) < 2.1e-9);
        assert!(1.0 - sigmoid(SATURATION) < 2.1e-9);
    }
}
