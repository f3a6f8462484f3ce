//! Correlation-horizon diagnostic.
//!
//! An informative event starts at `t_e` and lasts `delta_t` steps; a decision
//! at `t_r` depends on it. The horizon `t_r - t_e - delta_t + 1` is the number
//! of steps the information has to be carried. A trace is memory-intensive
//! when the smallest horizon over its windows exceeds 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Family;
use crate::rollout::EpisodeLog;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindowError {
    #[error("event duration must be at least 1")]
    EmptyEvent,
    #[error("decision at t={t_r} precedes the end of the event ({t_e} + {delta_t})")]
    DecisionBeforeEventEnd { t_e: u64, delta_t: u64, t_r: u64 },
}

/// Event/decision pair. Constructed only through [`EventWindow::new`], which
/// enforces `delta_t >= 1` and `t_r >= t_e + delta_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventWindow {
    t_e: u64,
    delta_t: u64,
    t_r: u64,
}

impl EventWindow {
    pub fn new(t_e: u64, delta_t: u64, t_r: u64) -> Result<Self, WindowError> {
        if delta_t == 0 {
            return Err(WindowError::EmptyEvent);
        }
        if t_r < t_e + delta_t {
            return Err(WindowError::DecisionBeforeEventEnd { t_e, delta_t, t_r });
        }
        Ok(Self { t_e, delta_t, t_r })
    }

    pub fn t_e(&self) -> u64 {
        self.t_e
    }

    pub fn delta_t(&self) -> u64 {
        self.delta_t
    }

    pub fn t_r(&self) -> u64 {
        self.t_r
    }
}

pub fn correlation_horizon(w: &EventWindow) -> u64 {
    w.t_r - w.t_e - w.delta_t + 1
}

/// `min xi > 1`; an empty set of windows is not memory-intensive.
pub fn is_memory_intensive(windows: &[EventWindow]) -> bool {
    windows
        .iter()
        .map(correlation_horizon)
        .min()
        .is_some_and(|m| m > 1)
}

/// Extracts one window per resolved junction from a T-Maze log.
///
/// The event is the run of consecutive observations showing the corridor's
/// cue; the decision is the turn taken at that corridor's junction. Returns
/// an empty list for non-T-Maze logs.
pub fn tmaze_windows(log: &EpisodeLog) -> Vec<EventWindow> {
    if log.family != Family::TMaze {
        return Vec::new();
    }
    let cue_visible = |t: usize| {
        let obs = log.obs_at(t);
        obs[0] != 0.0 || obs[1] != 0.0
    };
    let mut windows = Vec::new();
    let mut event: Option<(u64, u64)> = None;
    let mut counting = false;
    for (t, step) in log.steps.iter().enumerate() {
        if cue_visible(t) {
            match (&mut event, counting) {
                (Some((_, duration)), true) => *duration += 1,
                _ => {
                    event = Some((t as u64, 1));
                    counting = true;
                }
            }
        } else {
            counting = false;
        }
        if step.info.contains_key("junction_correct") {
            if let Some((t_e, delta_t)) = event.take() {
                windows.push(
                    EventWindow::new(t_e, delta_t, t as u64)
                        .expect("junction follows the cue that precedes it"),
                );
            }
            counting = false;
        }
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_substitution() {
        assert_eq!(correlation_horizon(&EventWindow::new(0, 1, 5).unwrap()), 5);
        assert_eq!(correlation_horizon(&EventWindow::new(7, 3, 10).unwrap()), 1);
    }

    #[test]
    fn invalid_windows_rejected() {
        assert_eq!(EventWindow::new(0, 0, 5), Err(WindowError::EmptyEvent));
        assert!(EventWindow::new(4, 2, 5).is_err());
    }

    #[test]
    fn memory_intensive_needs_min_above_one() {
        let long = EventWindow::new(0, 1, 9).unwrap();
        let short = EventWindow::new(3, 1, 4).unwrap();
        assert!(is_memory_intensive(&[long]));
        assert!(!is_memory_intensive(&[long, short]));
        assert!(!is_memory_intensive(&[]));
    }

    proptest! {
        #[test]
        fn horizon_at_least_one(t_e in 0u64..1_000_000, delta_t in 1u64..1000, gap in 0u64..1000) {
            let w = EventWindow::new(t_e, delta_t, t_e + delta_t + gap).unwrap();
            let xi = correlation_horizon(&w);
            prop_assert!(xi >= 1);
            prop_assert_eq!(xi == 1, w.t_r() == w.t_e() + w.delta_t());
        }
    }
}
