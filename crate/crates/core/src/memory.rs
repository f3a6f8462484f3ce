//! Memory-update contract.
//!
//! A memory cell turns the previous memory `m` and the new input `eta` into
//! the next memory in three separately invokable stages:
//!
//! ```text
//! m' = integrate(forget(m, eta), encode(eta))
//! ```
//!
//! `forget` selects or attenuates parts of the old memory, `encode` maps the
//! input into memory space and `integrate` combines the two. `forget` receives
//! the input as well because gated cells compute their retention gate from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::Observation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MemoryState {
    pub values: Vec<f64>,
}

impl MemoryState {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(width: usize) -> Self {
        Self {
            values: vec![0.0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.values.len()
    }

    /// Index of the largest entry, `None` when the maximum is not unique.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut tie = false;
        for (i, &v) in self.values.iter().enumerate() {
            match best {
                None => best = Some(i),
                Some(b) if v > self.values[b] => {
                    best = Some(i);
                    tie = false;
                }
                Some(b) if v == self.values[b] => tie = true,
                _ => {}
            }
        }
        if tie {
            None
        } else {
            best
        }
    }
}

/// Input to a memory update: the observation and the action that led to it.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryInput<'a> {
    pub obs: &'a Observation,
    pub action: Option<usize>,
}

impl<'a> MemoryInput<'a> {
    pub fn observation(obs: &'a Observation) -> Self {
        Self { obs, action: None }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MemoryError {
    #[error("memory width {got} does not match cell width {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub trait MemoryCell {
    fn width(&self) -> usize;

    fn forget(&self, memory: &MemoryState, input: &MemoryInput<'_>) -> MemoryState;

    fn encode(&self, input: &MemoryInput<'_>) -> MemoryState;

    fn integrate(&self, retained: &MemoryState, encoded: &MemoryState) -> MemoryState;
}

/// One full update step.
pub fn memory_update<C: MemoryCell + ?Sized>(
    memory: &MemoryState,
    input: &MemoryInput<'_>,
    cell: &C,
) -> Result<MemoryState, MemoryError> {
    if memory.width() != cell.width() {
        return Err(MemoryError::DimensionMismatch {
            expected: cell.width(),
            got: memory.width(),
        });
    }
    let retained = cell.forget(memory, input);
    let encoded = cell.encode(input);
    Ok(cell.integrate(&retained, &encoded))
}

fn add(a: &MemoryState, b: &MemoryState) -> MemoryState {
    MemoryState::new(a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect())
}

/// Keeps everything, encodes nothing.
#[derive(Clone, Debug)]
pub struct IdentityCell {
    pub width: usize,
}

impl MemoryCell for IdentityCell {
    fn width(&self) -> usize {
        self.width
    }

    fn forget(&self, memory: &MemoryState, _input: &MemoryInput<'_>) -> MemoryState {
        memory.clone()
    }

    fn encode(&self, _input: &MemoryInput<'_>) -> MemoryState {
        MemoryState::zeros(self.width)
    }

    fn integrate(&self, retained: &MemoryState, encoded: &MemoryState) -> MemoryState {
        add(retained, encoded)
    }
}

/// Drops the old memory and stores the leading observation entries.
#[derive(Clone, Debug)]
pub struct EraserCell {
    pub width: usize,
}

impl MemoryCell for EraserCell {
    fn width(&self) -> usize {
        self.width
    }

    fn forget(&self, _memory: &MemoryState, _input: &MemoryInput<'_>) -> MemoryState {
        MemoryState::zeros(self.width)
    }

    fn encode(&self, input: &MemoryInput<'_>) -> MemoryState {
        let mut values: Vec<f64> = input.obs.values.iter().copied().take(self.width).collect();
        values.resize(self.width, 0.0);
        MemoryState::new(values)
    }

    fn integrate(&self, _retained: &MemoryState, encoded: &MemoryState) -> MemoryState {
        encoded.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimension_mismatch() {
        let obs = Observation::new(vec![1.0, 0.0, 0.0]);
        let err = memory_update(
            &MemoryState::zeros(3),
            &MemoryInput::observation(&obs),
            &IdentityCell { width: 2 },
        )
        .unwrap_err();
        assert_eq!(
            err,
            MemoryError::DimensionMismatch {
                expected: 2,
                got: 3
            }
        );
    }

    #[test]
    fn eraser_depends_only_on_input() {
        let cell = EraserCell { width: 2 };
        let obs = Observation::new(vec![0.25, 0.75, 0.5]);
        let input = MemoryInput::observation(&obs);
        let a = memory_update(&MemoryState::new(vec![9.0, -3.0]), &input, &cell).unwrap();
        let b = memory_update(&MemoryState::new(vec![0.0, 0.0]), &input, &cell).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values, vec![0.25, 0.75]);
    }

    #[test]
    fn argmax_reports_ties() {
        assert_eq!(MemoryState::new(vec![0.0, 0.0]).argmax(), None);
        assert_eq!(MemoryState::new(vec![0.1, 0.3]).argmax(), Some(1));
        assert_eq!(MemoryState::new(vec![0.4, 0.3, 0.4]).argmax(), None);
        assert_eq!(MemoryState::new(vec![0.5, 0.3, 0.4]).argmax(), Some(0));
    }

    proptest! {
        #[test]
        fn identity_cell_is_identity(
            memory in prop::collection::vec(-1e6f64..1e6, 1..8),
            obs in prop::collection::vec(-1.0f64..1.0, 0..8),
            action in prop::option::of(0usize..5),
        ) {
            let cell = IdentityCell { width: memory.len() };
            let m = MemoryState::new(memory);
            let obs = Observation::new(obs);
            let next = memory_update(&m, &MemoryInput { obs: &obs, action }, &cell).unwrap();
            prop_assert_eq!(next, m);
        }
    }
}
