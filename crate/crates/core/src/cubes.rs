//! Color-Cubes.
//!
//! The agent walks a `G x G` grid holding `N` uniquely colored cubes and must
//! `INTERACT` with the cube of the current target color, `K` times in a row.
//! Cube positions and colors are only observed on update events: the start of
//! each phase, and (in Medium/Extreme) the step on which a non-target cube
//! teleports. Extreme-mode teleport updates carry positions but no colors.
//!
//! Observation layout, length `2 + 3N + 1`:
//! `[agent_x, agent_y, (cube_x, cube_y, color) * N, target_color]`.
//! Cube triples are listed in row-major order of their cells, so a slot index
//! never identifies a cube. Hidden entries hold [`MASK`].

use std::fmt;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{validate_config, ConfigError, EnvConfig, Family, Mode, Retarget};
use crate::rng::{RngStream, Stream};
use crate::types::{DiscreteAction, EnvError, Environment, Info, Observation, StepResult, MASK};

pub const SUCCESS_REWARD: f64 = 1.0;
pub const AWAY_PENALTY: f64 = -0.01;
pub const FAILED_INTERACT_PENALTY: f64 = -0.01;

pub fn observation_len(cube_count: usize) -> usize {
    2 + 3 * cube_count + 1
}

/// Grid cell; `y` grows downwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    fn row_major(self) -> (u32, u32) {
        (self.y, self.x)
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.row_major().cmp(&other.row_major())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubesAction {
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    Interact,
}

impl CubesAction {
    pub const MOVES: [CubesAction; 4] = [
        CubesAction::MoveUp,
        CubesAction::MoveDown,
        CubesAction::MoveLeft,
        CubesAction::MoveRight,
    ];

    /// Cell reached by this action, clamped to the grid.
    pub fn apply(self, from: Cell, grid_size: u32) -> Cell {
        let max = grid_size - 1;
        match self {
            CubesAction::MoveUp => Cell::new(from.x, from.y.saturating_sub(1)),
            CubesAction::MoveDown => Cell::new(from.x, (from.y + 1).min(max)),
            CubesAction::MoveLeft => Cell::new(from.x.saturating_sub(1), from.y),
            CubesAction::MoveRight => Cell::new((from.x + 1).min(max), from.y),
            CubesAction::Interact => from,
        }
    }
}

impl fmt::Display for CubesAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CubesAction::MoveUp => "MOVE_UP",
            CubesAction::MoveDown => "MOVE_DOWN",
            CubesAction::MoveLeft => "MOVE_LEFT",
            CubesAction::MoveRight => "MOVE_RIGHT",
            CubesAction::Interact => "INTERACT",
        })
    }
}

impl DiscreteAction for CubesAction {
    const COUNT: usize = 5;

    fn index(self) -> usize {
        self as usize
    }

    fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(CubesAction::MoveUp),
            1 => Some(CubesAction::MoveDown),
            2 => Some(CubesAction::MoveLeft),
            3 => Some(CubesAction::MoveRight),
            4 => Some(CubesAction::Interact),
            _ => None,
        }
    }
}

/// What the next observation reveals about the cubes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PendingUpdate {
    None,
    Full,
    PositionsOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubesState {
    pub grid_size: u32,
    pub agent: Cell,
    pub cube_pos: Vec<Cell>,
    /// `cube_color[i]` is the color id of cube `i`; a permutation of `0..N`.
    pub cube_color: Vec<u32>,
    pub target_color: u32,
    pub subepisodes_done: u32,
    pub subepisode_count: u32,
    pub steps_elapsed: u32,
    pub pending_update: PendingUpdate,
    pub teleports: u32,
    pub done: bool,
    pub success: bool,
}

impl CubesState {
    pub fn target_index(&self) -> usize {
        self.cube_color
            .iter()
            .position(|&c| c == self.target_color)
            .expect("target color belongs to a cube")
    }

    pub fn target_cell(&self) -> Cell {
        self.cube_pos[self.target_index()]
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.cube_pos.contains(&cell)
    }

    fn free_cells(&self) -> Vec<Cell> {
        let g = self.grid_size;
        (0..g)
            .flat_map(|y| (0..g).map(move |x| Cell::new(x, y)))
            .filter(|&c| !self.is_occupied(c))
            .collect()
    }

    /// Moves cube `index` to a uniformly chosen cube-free cell.
    fn relocate(&mut self, index: usize, rng: &mut RngStream) {
        let free = self.free_cells();
        self.cube_pos[index] = *free.choose(rng).expect("at least one free cell");
    }
}

/// Renders an observation and consumes the pending update.
pub fn observe(state: &mut CubesState) -> Observation {
    let mut values = Vec::with_capacity(observation_len(state.cube_pos.len()));
    values.push(f64::from(state.agent.x));
    values.push(f64::from(state.agent.y));
    let mut order: Vec<usize> = (0..state.cube_pos.len()).collect();
    order.sort_by_key(|&i| state.cube_pos[i]);
    for i in order {
        let cell = state.cube_pos[i];
        match state.pending_update {
            PendingUpdate::Full => values.extend([
                f64::from(cell.x),
                f64::from(cell.y),
                f64::from(state.cube_color[i]),
            ]),
            PendingUpdate::PositionsOnly => {
                values.extend([f64::from(cell.x), f64::from(cell.y), MASK])
            }
            PendingUpdate::None => values.extend([MASK, MASK, MASK]),
        }
    }
    values.push(f64::from(state.target_color));
    state.pending_update = PendingUpdate::None;
    Observation::new(values)
}

/// Cube data decoded from an observation.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedObs {
    pub agent: Cell,
    /// Cube cells and colors, present only on update steps.
    pub cubes: Option<Vec<(Cell, Option<u32>)>>,
    pub target_color: u32,
}

impl ParsedObs {
    pub fn parse(obs: &Observation) -> Option<Self> {
        let v = &obs.values;
        if v.len() < observation_len(1) || !(v.len() - 3).is_multiple_of(3) {
            return None;
        }
        let n = (v.len() - 3) / 3;
        let cell = |x: f64, y: f64| Cell::new(x as u32, y as u32);
        let agent = cell(v[0], v[1]);
        let triples: Vec<&[f64]> = v[2..2 + 3 * n].chunks(3).collect();
        let cubes = if triples.iter().all(|t| t[0] == MASK) {
            None
        } else {
            Some(
                triples
                    .iter()
                    .map(|t| (cell(t[0], t[1]), (t[2] != MASK).then(|| t[2] as u32)))
                    .collect(),
            )
        };
        Some(Self {
            agent,
            cubes,
            target_color: v[v.len() - 1] as u32,
        })
    }

    /// True when the observation carries both positions and colors.
    pub fn is_full(&self) -> bool {
        self.cubes
            .as_ref()
            .is_some_and(|c| c.iter().all(|(_, color)| color.is_some()))
    }
}

#[derive(Clone, Debug)]
pub struct ColorCubes {
    config: EnvConfig,
    max_steps: u32,
    state: CubesState,
    layout_rng: RngStream,
    teleport_rng: RngStream,
}

impl ColorCubes {
    pub fn new(config: &EnvConfig) -> Result<Self, ConfigError> {
        let config = validate_config(config)?;
        assert_eq!(
            config.family,
            Family::ColorCubes,
            "ColorCubes built from a non-cubes config"
        );
        let max_steps = config.effective_max_steps();
        let seed = config.seed;
        let mut env = Self {
            state: CubesState {
                grid_size: config.grid_size,
                agent: Cell::new(0, 0),
                cube_pos: Vec::new(),
                cube_color: Vec::new(),
                target_color: 0,
                subepisodes_done: 0,
                subepisode_count: config.subepisode_count,
                steps_elapsed: 0,
                pending_update: PendingUpdate::None,
                teleports: 0,
                done: false,
                success: false,
            },
            config,
            max_steps,
            layout_rng: RngStream::new(seed, Stream::Layout),
            teleport_rng: RngStream::new(seed, Stream::Teleport),
        };
        env.reset(seed);
        Ok(env)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &CubesState {
        &self.state
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    fn next_target(&mut self) -> u32 {
        let n = self.config.cube_count;
        let completed = self.state.target_color;
        match self.config.retarget {
            Retarget::ExcludeCompleted if n > 1 => {
                let pick = self.layout_rng.gen_range(0..n - 1);
                if pick >= completed {
                    pick + 1
                } else {
                    pick
                }
            }
            _ => self.layout_rng.gen_range(0..n),
        }
    }

    fn update_kind_for_teleport(&self) -> PendingUpdate {
        match self.config.mode {
            Mode::Extreme => PendingUpdate::PositionsOnly,
            Mode::Trivial | Mode::Medium => PendingUpdate::Full,
        }
    }
}

impl Environment for ColorCubes {
    type Action = CubesAction;

    fn family(&self) -> Family {
        Family::ColorCubes
    }

    fn reset(&mut self, seed: u64) -> Observation {
        self.layout_rng = RngStream::new(seed, Stream::Layout);
        self.teleport_rng = RngStream::new(seed, Stream::Teleport);
        let g = self.config.grid_size;
        let n = self.config.cube_count as usize;
        let cells = (g * g) as usize;
        let picked = sample(&mut self.layout_rng, cells, n + 1);
        let to_cell = |i: usize| Cell::new(i as u32 % g, i as u32 / g);
        let cube_pos: Vec<Cell> = picked.iter().take(n).map(to_cell).collect();
        let agent = to_cell(picked.index(n));
        let mut cube_color: Vec<u32> = (0..n as u32).collect();
        cube_color.shuffle(&mut self.layout_rng);
        let target_color = self.layout_rng.gen_range(0..n as u32);

        self.state = CubesState {
            grid_size: g,
            agent,
            cube_pos,
            cube_color,
            target_color,
            subepisodes_done: 0,
            subepisode_count: self.config.subepisode_count,
            steps_elapsed: 0,
            pending_update: PendingUpdate::Full,
            teleports: 0,
            done: false,
            success: false,
        };
        observe(&mut self.state)
    }

    fn step(&mut self, action: CubesAction) -> Result<StepResult, EnvError> {
        if self.state.done {
            return Err(EnvError::SteppedAfterDone);
        }
        self.state.steps_elapsed += 1;
        let mut reward = 0.0;
        let mut terminated = false;
        let mut collected = false;
        let mut teleported = false;

        match action {
            CubesAction::Interact => {
                if self.state.agent == self.state.target_cell() {
                    reward += SUCCESS_REWARD;
                    collected = true;
                    self.state.subepisodes_done += 1;
                    if self.state.subepisodes_done == self.state.subepisode_count {
                        terminated = true;
                        self.state.success = true;
                    } else {
                        let idx = self.state.target_index();
                        self.state.relocate(idx, &mut self.layout_rng);
                        self.state.target_color = self.next_target();
                        self.state.pending_update = PendingUpdate::Full;
                    }
                } else {
                    reward += FAILED_INTERACT_PENALTY;
                }
            }
            movement => {
                let target = self.state.target_cell();
                let before = self.state.agent.manhattan(target);
                self.state.agent = movement.apply(self.state.agent, self.state.grid_size);
                if self.state.agent.manhattan(target) > before {
                    reward += AWAY_PENALTY;
                }
            }
        }

        if !collected && self.teleport_rng.gen_bool(self.config.teleport_prob) {
            let target = self.state.target_index();
            let candidates: Vec<usize> = (0..self.state.cube_pos.len())
                .filter(|&i| i != target)
                .collect();
            if let Some(&idx) = candidates.choose(&mut self.teleport_rng) {
                self.state.relocate(idx, &mut self.teleport_rng);
                self.state.pending_update = self.update_kind_for_teleport();
                self.state.teleports += 1;
                teleported = true;
            }
        }

        let truncated = !terminated && self.state.steps_elapsed >= self.max_steps;
        self.state.done = terminated || truncated;
        let full_state_update = self.state.pending_update != PendingUpdate::None;

        let mut info = Info::new();
        info.insert("interaction_success".into(), collected.into());
        info.insert("teleport_occurred".into(), teleported.into());
        info.insert("full_state_update".into(), full_state_update.into());
        info.insert(
            "subepisodes_done".into(),
            i64::from(self.state.subepisodes_done).into(),
        );
        Ok(StepResult {
            obs: observe(&mut self.state),
            reward,
            terminated,
            truncated,
            info,
        })
    }

    fn observation_len(&self) -> usize {
        observation_len(self.config.cube_count as usize)
    }

    fn succeeded(&self) -> bool {
        self.state.success
    }

    fn progress(&self) -> u32 {
        self.state.subepisodes_done
    }

    fn target_progress(&self) -> u32 {
        self.state.subepisode_count
    }

    fn render(&self) -> String {
        let s = &self.state;
        let g = s.grid_size;
        let mut out = format!(
            "target={} phase={}/{} teleports={}\n",
            s.target_color, s.subepisodes_done, s.subepisode_count, s.teleports
        );
        for y in 0..g {
            for x in 0..g {
                let cell = Cell::new(x, y);
                let ch = if cell == s.agent {
                    '@'
                } else if let Some(i) = s.cube_pos.iter().position(|&c| c == cell) {
                    color_char(Some(s.cube_color[i]))
                } else {
                    '.'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

fn color_char(color: Option<u32>) -> char {
    match color {
        Some(c) => char::from_digit(c % 36, 36).unwrap_or('#'),
        None => '?',
    }
}

/// ASCII view of what an observation reveals: `@` agent, color digit per
/// cube, `?` for a cube whose color is hidden, `.` elsewhere.
pub fn render_observation(obs: &Observation, grid_size: u32) -> String {
    let Some(parsed) = ParsedObs::parse(obs) else {
        return String::from("<malformed observation>\n");
    };
    let mut out = format!("target={}", parsed.target_color);
    if parsed.cubes.is_none() {
        out.push_str(" (no update)");
    }
    out.push('\n');
    for y in 0..grid_size {
        for x in 0..grid_size {
            let cell = Cell::new(x, y);
            let cube = parsed
                .cubes
                .as_ref()
                .and_then(|c| c.iter().find(|(pos, _)| *pos == cell));
            out.push(if cell == parsed.agent {
                '@'
            } else if let Some((_, color)) = cube {
                color_char(*color)
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn env(mode: Mode) -> ColorCubes {
        ColorCubes::new(&EnvConfig::cubes(mode)).unwrap()
    }

    #[test]
    fn trivial_observation_has_one_cube() {
        let mut e = env(Mode::Trivial);
        let obs = e.reset(11);
        assert_eq!(obs.len(), observation_len(1));
        let parsed = ParsedObs::parse(&obs).unwrap();
        let cubes = parsed.cubes.unwrap();
        assert_eq!(cubes.len(), 1);
        assert_eq!(cubes[0].1, Some(0));
        assert_eq!(parsed.target_color, 0);
    }

    #[test]
    fn reset_places_distinct_cubes_inside_grid() {
        let mut e = env(Mode::Medium);
        for seed in 0..200 {
            e.reset(seed);
            let s = e.state();
            let cells: HashSet<Cell> = s.cube_pos.iter().copied().collect();
            assert_eq!(cells.len(), 3);
            assert!(s.cube_pos.iter().all(|c| c.x < 5 && c.y < 5));
            assert!(!s.is_occupied(s.agent));
            let mut colors = s.cube_color.clone();
            colors.sort();
            assert_eq!(colors, vec![0, 1, 2]);
        }
    }

    #[test]
    fn reset_is_deterministic() {
        let mut a = env(Mode::Extreme);
        let mut b = env(Mode::Extreme);
        assert_eq!(a.reset(99), b.reset(99));
        assert_eq!(a.state(), b.state());
    }

    #[test]
    fn interact_on_target_rewards_and_retargets() {
        let mut e = env(Mode::Medium);
        e.reset(5);
        let previous = e.state().target_color;
        e.state.agent = e.state().target_cell();
        let r = e.step(CubesAction::Interact).unwrap();
        assert_eq!(r.reward, 1.0);
        assert_eq!(e.state().subepisodes_done, 1);
        assert_ne!(e.state().target_color, previous);
        assert!(ParsedObs::parse(&r.obs).unwrap().is_full());
        assert!(!r.done());
    }

    #[test]
    fn interact_elsewhere_costs_penalty() {
        let mut cfg = EnvConfig::cubes(Mode::Medium);
        cfg.teleport_prob = 0.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(1);
        let before = e.state().clone();
        let r = e.step(CubesAction::Interact).unwrap();
        assert_eq!(r.reward, -0.01);
        assert_eq!(e.state().cube_pos, before.cube_pos);
        assert_eq!(e.state().agent, before.agent);
    }

    #[test]
    fn zero_teleport_keeps_positions() {
        let mut cfg = EnvConfig::cubes(Mode::Medium);
        cfg.teleport_prob = 0.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(3);
        let start = e.state().cube_pos.clone();
        for i in 0..40 {
            e.step(CubesAction::MOVES[i % 4]).unwrap();
            assert_eq!(e.state().cube_pos, start);
        }
    }

    #[test]
    fn movement_reward_tracks_distance() {
        let mut cfg = EnvConfig::cubes(Mode::Medium);
        cfg.teleport_prob = 0.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(8);
        for i in 0..60 {
            let action = CubesAction::MOVES[(i * 7) % 4];
            let target = e.state().target_cell();
            let before = e.state().agent.manhattan(target);
            let r = e.step(action).unwrap();
            let after = e.state().agent.manhattan(target);
            let expected = if after > before { -0.01 } else { 0.0 };
            assert_eq!(r.reward, expected);
            if r.done() {
                break;
            }
        }
    }

    #[test]
    fn moves_clamp_at_edges() {
        assert_eq!(
            CubesAction::MoveUp.apply(Cell::new(2, 0), 5),
            Cell::new(2, 0)
        );
        assert_eq!(
            CubesAction::MoveLeft.apply(Cell::new(0, 3), 5),
            Cell::new(0, 3)
        );
        assert_eq!(
            CubesAction::MoveDown.apply(Cell::new(1, 4), 5),
            Cell::new(1, 4)
        );
        assert_eq!(
            CubesAction::MoveRight.apply(Cell::new(4, 1), 5),
            Cell::new(4, 1)
        );
        assert_eq!(
            CubesAction::MoveRight.apply(Cell::new(3, 1), 5),
            Cell::new(4, 1)
        );
    }

    #[test]
    fn quiet_step_masks_all_cube_fields() {
        let mut cfg = EnvConfig::cubes(Mode::Medium);
        cfg.teleport_prob = 0.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(2);
        let r = e.step(CubesAction::MoveUp).unwrap();
        let v = &r.obs.values;
        assert!(v[2..11].iter().all(|&x| x == MASK));
        assert_eq!(v[0], f64::from(e.state().agent.x));
        assert_eq!(v[1], f64::from(e.state().agent.y));
        assert_eq!(v[11], f64::from(e.state().target_color));
    }

    #[test]
    fn extreme_teleport_hides_colors() {
        let mut cfg = EnvConfig::cubes(Mode::Extreme);
        cfg.teleport_prob = 1.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(4);
        let target_before = e.state().target_cell();
        let r = e.step(CubesAction::MoveLeft).unwrap();
        let parsed = ParsedObs::parse(&r.obs).unwrap();
        let cubes = parsed.cubes.expect("positions visible");
        assert!(cubes.iter().all(|(_, c)| c.is_none()));
        assert_eq!(e.state().target_cell(), target_before);
    }

    #[test]
    fn render_observation_marks_hidden_colors() {
        let mut cfg = EnvConfig::cubes(Mode::Extreme);
        cfg.teleport_prob = 1.0;
        let mut e = ColorCubes::new(&cfg).unwrap();
        e.reset(4);
        let r = e.step(CubesAction::Interact).unwrap();
        let text = render_observation(&r.obs, 5);
        let grid: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(grid.len(), 5);
        assert!(grid
            .iter()
            .all(|row| !row.chars().any(|c| c.is_ascii_digit())));
        assert!(grid.concat().contains('?'));
    }
}
