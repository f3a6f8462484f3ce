use std::collections::HashSet;

use memrw_core::cubes::{observation_len, Cell, ColorCubes, CubesAction, ParsedObs};
use memrw_core::types::{info_flag, DiscreteAction};
use memrw_core::{EnvConfig, Environment, Mode, MASK};
use proptest::prelude::*;

fn cfg(mode: Mode, p: f64) -> EnvConfig {
    let mut c = EnvConfig::cubes(mode);
    c.teleport_prob = p;
    c
}

fn positions_visible(obs: &ParsedObs) -> bool {
    obs.cubes.is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stepping_preserves_cube_invariants(
        seed in any::<u64>(),
        mode in prop_oneof![Just(Mode::Trivial), Just(Mode::Medium), Just(Mode::Extreme)],
        p in 0.0f64..=1.0,
        actions in prop::collection::vec(0usize..5, 1..150),
    ) {
        let mut env = ColorCubes::new(&cfg(mode, p)).unwrap();
        let n = env.config().cube_count as usize;
        let first = env.reset(seed);
        prop_assert_eq!(first.len(), observation_len(n));
        prop_assert!(ParsedObs::parse(&first).unwrap().is_full());

        let mut position_obs_in_phase = 1u32;
        let mut teleports_in_phase = 0u32;
        let mut last_positions: Vec<Cell> = {
            let mut v = env.state().cube_pos.clone();
            v.sort();
            v
        };

        for a in actions {
            let before = env.state().clone();
            let r = env.step(CubesAction::from_index(a).unwrap()).unwrap();
            let after = env.state();

            prop_assert!(r.reward == 1.0 || r.reward == -0.01 || r.reward == 0.0, "reward {}", r.reward);
            let distinct: HashSet<Cell> = after.cube_pos.iter().copied().collect();
            prop_assert_eq!(distinct.len(), n);

            let collected = info_flag(&r.info, "interaction_success");
            let teleported = info_flag(&r.info, "teleport_occurred");
            prop_assert_eq!(after.teleports - before.teleports, u32::from(teleported));
            if !collected {
                prop_assert_eq!(after.target_color, before.target_color);
                prop_assert_eq!(after.target_cell(), before.target_cell());
                let moved = before.cube_pos.iter().zip(&after.cube_pos).filter(|(x, y)| x != y).count();
                prop_assert!(moved <= 1);
                prop_assert_eq!(moved == 1, teleported);
            } else {
                prop_assert!(!teleported);
            }

            let parsed = ParsedObs::parse(&r.obs).unwrap();
            prop_assert_eq!(parsed.target_color, after.target_color);
            prop_assert_eq!(parsed.agent, after.agent);
            if collected {
                // phase boundary: this observation opens the next phase
                position_obs_in_phase = 1;
                teleports_in_phase = 0;
                if !r.terminated {
                    prop_assert!(parsed.is_full());
                }
            } else {
                teleports_in_phase += u32::from(teleported);
                if positions_visible(&parsed) {
                    position_obs_in_phase += 1;
                }
                prop_assert_eq!(position_obs_in_phase, 1 + teleports_in_phase);
            }
            if positions_visible(&parsed) {
                let cubes = parsed.cubes.as_ref().unwrap();
                let mut shown: Vec<Cell> = cubes.iter().map(|(c, _)| *c).collect();
                prop_assert!(shown.windows(2).all(|w| w[0] < w[1]), "row-major order");
                shown.sort();
                let mut truth = after.cube_pos.clone();
                truth.sort();
                prop_assert_eq!(&shown, &truth);
                let hidden = cubes.iter().all(|(_, color)| color.is_none());
                let shown_all = cubes.iter().all(|(_, color)| color.is_some());
                if mode == Mode::Extreme && teleported {
                    prop_assert!(hidden);
                    let changed = shown.iter().filter(|c| !last_positions.contains(c)).count();
                    prop_assert!(changed <= 1);
                } else {
                    prop_assert!(shown_all);
                }
                last_positions = shown;
            } else {
                prop_assert!(r.obs.values[2..2 + 3 * n].iter().all(|&v| v == MASK));
            }
            if r.done() {
                break;
            }
        }
    }

    #[test]
    fn equal_seeds_replay_identically(seed in any::<u64>(), actions in prop::collection::vec(0usize..5, 1..100)) {
        let config = cfg(Mode::Extreme, 0.5);
        let mut a = ColorCubes::new(&config).unwrap();
        let mut b = ColorCubes::new(&config).unwrap();
        prop_assert_eq!(a.reset(seed), b.reset(seed));
        for act in actions {
            let act = CubesAction::from_index(act).unwrap();
            let ra = a.step(act).unwrap();
            let rb = b.step(act).unwrap();
            prop_assert_eq!(&ra, &rb);
            if ra.done() {
                break;
            }
        }
        prop_assert_eq!(a.state(), b.state());
    }
}

#[test]
fn zero_teleport_keeps_positions_fixed_within_phase() {
    let mut env = ColorCubes::new(&cfg(Mode::Medium, 0.0)).unwrap();
    for seed in 0..50 {
        env.reset(seed);
        let start = env.state().cube_pos.clone();
        for i in 0..30 {
            let a = if i % 2 == 0 {
                CubesAction::MoveUp
            } else {
                CubesAction::MoveDown
            };
            let r = env.step(a).unwrap();
            assert!(ParsedObs::parse(&r.obs).unwrap().cubes.is_none());
            if r.done() {
                break;
            }
        }
        assert_eq!(env.state().cube_pos, start);
    }
}

#[test]
fn teleport_counts_match_binomial_moments() {
    // 10-step phases with no interaction: count ~ Binomial(10, 0.3)
    let (steps, p) = (10u32, 0.3);
    let episodes = 10_000u64;
    let mut env = ColorCubes::new(&cfg(Mode::Medium, p)).unwrap();
    let counts: Vec<f64> = (0..episodes)
        .map(|seed| {
            env.reset(seed);
            for i in 0..steps {
                let a = if i % 2 == 0 {
                    CubesAction::MoveLeft
                } else {
                    CubesAction::MoveRight
                };
                env.step(a).unwrap();
            }
            f64::from(env.state().teleports)
        })
        .collect();
    let n = episodes as f64;
    let k = f64::from(steps);
    let mean_true = k * p;
    let var_true = k * p * (1.0 - p);
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);

    let sd_mean = (var_true / n).sqrt();
    // fourth central moment of a binomial
    let mu4 = k * p * (1.0 - p) * (1.0 + 3.0 * (k - 2.0) * p * (1.0 - p));
    let sd_var = ((mu4 - var_true.powi(2) * (n - 3.0) / (n - 1.0)) / n).sqrt();
    assert!(
        (mean - mean_true).abs() < 3.0 * sd_mean,
        "mean {mean} vs {mean_true}"
    );
    assert!(
        (var - var_true).abs() < 3.0 * sd_var,
        "variance {var} vs {var_true}"
    );
}

#[test]
fn layouts_are_valid_across_seeds() {
    for mode in [Mode::Trivial, Mode::Medium, Mode::Extreme] {
        let mut env = ColorCubes::new(&cfg(mode, 0.3)).unwrap();
        for seed in 0..500 {
            env.reset(seed);
            let s = env.state();
            let cells: HashSet<Cell> = s.cube_pos.iter().copied().collect();
            assert_eq!(cells.len(), s.cube_pos.len());
            assert!(!cells.contains(&s.agent));
            let mut colors = s.cube_color.clone();
            colors.sort();
            assert_eq!(colors, (0..s.cube_pos.len() as u32).collect::<Vec<_>>());
            assert!(s.target_color < s.cube_pos.len() as u32);
        }
    }
}
