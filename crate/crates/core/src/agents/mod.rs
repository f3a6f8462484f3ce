//! Scripted and hand-constructed reference agents.
//!
//! Upper bounds: [`OracleTMaze`], [`LatchAgent`] and [`OracleCubes`] solve
//! every valid configuration. Lower bounds: [`StaleAgent`] (retains the first
//! cue only), [`RandomTurnAgent`] (no memory) and [`AmnesiacCubes`].

pub mod cubes;
pub mod latch;
pub mod tmaze;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Family;
use crate::cubes::CubesAction;
use crate::tmaze::TMazeAction;
use crate::types::Agent;

pub use self::cubes::{AmnesiacCubes, OracleCubes};
pub use self::latch::{latch_cell_construct, LatchAgent, LatchCell, LatchCellWeights};
pub use self::tmaze::{OracleTMaze, RandomTurnAgent, StaleAgent};

pub type TMazeAgent = Box<dyn Agent<TMazeAction> + Send>;
pub type CubesAgent = Box<dyn Agent<CubesAction> + Send>;

/// Agents selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Oracle,
    Stale,
    Random,
    Latch,
    Amnesiac,
}

impl AgentKind {
    pub const ALL: [AgentKind; 5] = [
        AgentKind::Oracle,
        AgentKind::Stale,
        AgentKind::Random,
        AgentKind::Latch,
        AgentKind::Amnesiac,
    ];

    pub fn supports(self, family: Family) -> bool {
        match self {
            AgentKind::Oracle => true,
            AgentKind::Stale | AgentKind::Random | AgentKind::Latch => family == Family::TMaze,
            AgentKind::Amnesiac => family == Family::ColorCubes,
        }
    }

    pub fn tmaze_agent(self) -> Option<TMazeAgent> {
        Some(match self {
            AgentKind::Oracle => Box::new(OracleTMaze::default()),
            AgentKind::Stale => Box::new(StaleAgent::default()),
            AgentKind::Random => Box::new(RandomTurnAgent::default()),
            AgentKind::Latch => Box::new(LatchAgent::default()),
            AgentKind::Amnesiac => return None,
        })
    }

    pub fn cubes_agent(self) -> Option<CubesAgent> {
        Some(match self {
            AgentKind::Oracle => Box::new(OracleCubes::default()),
            AgentKind::Amnesiac => Box::new(AmnesiacCubes::default()),
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Oracle => "oracle",
            AgentKind::Stale => "stale",
            AgentKind::Random => "random",
            AgentKind::Latch => "latch",
            AgentKind::Amnesiac => "amnesiac",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown agent {0:?} (expected one of oracle, stale, random, latch, amnesiac)")]
pub struct UnknownAgent(pub String);

impl FromStr for AgentKind {
    type Err = UnknownAgent;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownAgent(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in AgentKind::ALL {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
        }
        assert!("ppo".parse::<AgentKind>().is_err());
    }

    #[test]
    fn family_support_matches_constructors() {
        for k in AgentKind::ALL {
            assert_eq!(k.supports(Family::TMaze), k.tmaze_agent().is_some());
            assert_eq!(k.supports(Family::ColorCubes), k.cubes_agent().is_some());
        }
    }
}
