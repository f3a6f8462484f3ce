//! Evaluation protocol.
//!
//! An [`EvalSpec`] runs `n_runs x episodes_per_run` episodes of one agent on
//! each evaluation config. Each run yields a success rate; the report carries
//! the mean and standard error of those rates, together with a histogram of
//! per-episode progress (corridors passed or phases completed).
//!
//! Episode seeds depend only on `(base_seed, run, episode)`, so every agent
//! faces the same layouts and results do not depend on the worker count.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentKind;
use crate::config::{validate_config, ConfigError, EnvConfig, Family};
use crate::cubes::ColorCubes;
use crate::rng::episode_seed;
use crate::rollout::{progress_metric, run_episode, RolloutError};
use crate::tmaze::TMaze;
use crate::types::{Agent, Environment};

pub const DEFAULT_RUNS: u32 = 10;
pub const DEFAULT_EPISODES: u32 = 100;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("agent {agent} cannot act in {family} environments")]
    AgentEnvMismatch { agent: AgentKind, family: Family },
    #[error("cannot compare a {train} config with a {eval} config")]
    FamilyMismatch { train: Family, eval: Family },
    #[error("invalid evaluation spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("run {run} episode {episode} on {config}: {source}")]
    Rollout {
        run: u32,
        episode: u32,
        config: String,
        #[source]
        source: RolloutError,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSpec {
    pub train_config: EnvConfig,
    pub eval_configs: Vec<EnvConfig>,
    pub n_runs: u32,
    pub episodes_per_run: u32,
    pub agent: AgentKind,
    pub base_seed: u64,
}

impl EvalSpec {
    /// Evaluation on the training config only, with the default run counts.
    pub fn matched(train_config: EnvConfig, agent: AgentKind) -> Self {
        Self {
            eval_configs: vec![train_config.clone()],
            train_config,
            n_runs: DEFAULT_RUNS,
            episodes_per_run: DEFAULT_EPISODES,
            agent,
            base_seed: 0,
        }
    }

    pub fn with_runs(mut self, n_runs: u32, episodes_per_run: u32) -> Self {
        self.n_runs = n_runs;
        self.episodes_per_run = episodes_per_run;
        self
    }

    pub fn with_base_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    /// Normalizes every config and checks counts and family compatibility.
    pub fn validate(&self) -> Result<EvalSpec, EvalError> {
        if self.n_runs == 0 || self.episodes_per_run == 0 {
            return Err(EvalError::InvalidSpec(
                "n_runs and episodes_per_run must be >= 1".into(),
            ));
        }
        if self.eval_configs.is_empty() {
            return Err(EvalError::InvalidSpec("no evaluation configs".into()));
        }
        let train_config = validate_config(&self.train_config)?;
        let family = train_config.family;
        if !self.agent.supports(family) {
            return Err(EvalError::AgentEnvMismatch {
                agent: self.agent,
                family,
            });
        }
        let eval_configs = self
            .eval_configs
            .iter()
            .map(|c| {
                let c = validate_config(c)?;
                if c.family != family {
                    return Err(EvalError::FamilyMismatch {
                        train: family,
                        eval: c.family,
                    });
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvalSpec {
            train_config,
            eval_configs,
            ..self.clone()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generalization {
    Matched,
    Interpolation,
    Extrapolation,
    /// Some dimensions grew and others shrank, or the regime/mode differs.
    Mixed,
}

impl std::fmt::Display for Generalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Generalization::Matched => "matched",
            Generalization::Interpolation => "interpolation",
            Generalization::Extrapolation => "extrapolation",
            Generalization::Mixed => "mixed",
        })
    }
}

/// Compares an evaluation config to the training config.
///
/// T-Maze compares `(corridor_length, corridor_count)`; Color-Cubes compares
/// `(grid_size, cube_count, subepisode_count)`.
pub fn classify_generalization(
    train: &EnvConfig,
    eval: &EnvConfig,
) -> Result<Generalization, EvalError> {
    if train.family != eval.family {
        return Err(EvalError::FamilyMismatch {
            train: train.family,
            eval: eval.family,
        });
    }
    let (a, b): (Vec<u32>, Vec<u32>) = match train.family {
        Family::TMaze => {
            if train.regime_or_default() != eval.regime_or_default() {
                return Ok(Generalization::Mixed);
            }
            (
                vec![train.corridor_length, train.corridor_count],
                vec![eval.corridor_length, eval.corridor_count],
            )
        }
        Family::ColorCubes => {
            if train.mode != eval.mode {
                return Ok(Generalization::Mixed);
            }
            (
                vec![train.grid_size, train.cube_count, train.subepisode_count],
                vec![eval.grid_size, eval.cube_count, eval.subepisode_count],
            )
        }
    };
    let less = a.iter().zip(&b).any(|(t, e)| e < t);
    let more = a.iter().zip(&b).any(|(t, e)| e > t);
    Ok(match (less, more) {
        (false, false) => Generalization::Matched,
        (true, false) => Generalization::Interpolation,
        (false, true) => Generalization::Extrapolation,
        (true, true) => Generalization::Mixed,
    })
}

/// Summary of one finished episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub success: bool,
    pub progress: u32,
    pub total_return: f64,
    pub steps: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub eval_config: EnvConfig,
    pub generalization: Generalization,
    pub success_mean: f64,
    pub success_sem: f64,
    pub per_run_success: Vec<f64>,
    /// `progress_histogram[k]` counts episodes that ended with progress `k`.
    pub progress_histogram: Vec<u64>,
    pub mean_progress: f64,
    pub mean_return: f64,
    pub mean_steps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub agent: AgentKind,
    pub train_config: EnvConfig,
    pub n_runs: u32,
    pub episodes_per_run: u32,
    pub base_seed: u64,
    pub entries: Vec<ConfigReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("EvalReport always serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn matched(&self) -> Option<&ConfigReport> {
        self.entries
            .iter()
            .find(|e| e.generalization == Generalization::Matched)
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn aggregate(
    spec: &EvalSpec,
    eval_config: &EnvConfig,
    outcomes: &[EpisodeOutcome],
) -> Result<ConfigReport, EvalError> {
    let per_run: Vec<f64> = outcomes
        .chunks(spec.episodes_per_run as usize)
        .map(|run| run.iter().filter(|o| o.success).count() as f64 / run.len() as f64)
        .collect();
    let (success_mean, success_sem) = mean_sem(&per_run);
    let target = eval_config.target_progress() as usize;
    let mut progress_histogram = vec![0u64; target + 1];
    for o in outcomes {
        progress_histogram[(o.progress as usize).min(target)] += 1;
    }
    let total = outcomes.len() as f64;
    Ok(ConfigReport {
        eval_config: eval_config.clone(),
        generalization: classify_generalization(&spec.train_config, eval_config)?,
        success_mean,
        success_sem,
        per_run_success: per_run,
        progress_histogram,
        mean_progress: outcomes.iter().map(|o| f64::from(o.progress)).sum::<f64>() / total,
        mean_return: outcomes.iter().map(|o| o.total_return).sum::<f64>() / total,
        mean_steps: outcomes.iter().map(|o| f64::from(o.steps)).sum::<f64>() / total,
    })
}

fn play<E, A>(
    env: &mut E,
    agent: &mut A,
    spec: &EvalSpec,
    config: &EnvConfig,
    run: u32,
    episode: u32,
) -> Result<EpisodeOutcome, EvalError>
where
    E: Environment,
    A: Agent<E::Action> + ?Sized,
{
    let seed = episode_seed(spec.base_seed, u64::from(run), u64::from(episode));
    let log = run_episode(env, agent, seed).map_err(|source| EvalError::Rollout {
        run,
        episode,
        config: config.label(),
        source,
    })?;
    Ok(EpisodeOutcome {
        success: log.success,
        progress: progress_metric(&log),
        total_return: log.total_return,
        steps: log.steps.len() as u32,
    })
}

/// Runs a validated spec with caller-supplied environment and agent factories.
///
/// `workers <= 1` runs sequentially; otherwise episodes fan out over a thread
/// pool of that size. Results are folded in `(run, episode)` order either way.
pub fn run_eval_with<E, A, FE, FA>(
    spec: &EvalSpec,
    workers: usize,
    env_factory: FE,
    agent_factory: FA,
) -> Result<EvalReport, EvalError>
where
    E: Environment,
    A: Agent<E::Action>,
    FE: Fn(&EnvConfig) -> E + Sync,
    FA: Fn() -> A + Sync,
{
    let spec = spec.validate()?;
    let jobs: Vec<(u32, u32)> = (0..spec.n_runs)
        .flat_map(|r| (0..spec.episodes_per_run).map(move |e| (r, e)))
        .collect();

    let pool = if workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| EvalError::Pool(e.to_string()))?,
        )
    } else {
        None
    };

    let mut entries = Vec::with_capacity(spec.eval_configs.len());
    for config in &spec.eval_configs {
        let outcomes: Vec<EpisodeOutcome> = match &pool {
            None => {
                let mut env = env_factory(config);
                let mut agent = agent_factory();
                jobs.iter()
                    .map(|&(r, e)| play(&mut env, &mut agent, &spec, config, r, e))
                    .collect::<Result<_, _>>()?
            }
            Some(pool) => {
                use rayon::prelude::*;
                pool.install(|| {
                    jobs.par_iter()
                        .map_init(
                            || (env_factory(config), agent_factory()),
                            |(env, agent), &(r, e)| play(env, agent, &spec, config, r, e),
                        )
                        .collect::<Result<_, _>>()
                })?
            }
        };
        entries.push(aggregate(&spec, config, &outcomes)?);
    }
    Ok(EvalReport {
        agent: spec.agent,
        train_config: spec.train_config.clone(),
        n_runs: spec.n_runs,
        episodes_per_run: spec.episodes_per_run,
        base_seed: spec.base_seed,
        entries,
    })
}

/// Runs a spec with the built-in environment and the agent it names.
pub fn run_eval(spec: &EvalSpec, workers: usize) -> Result<EvalReport, EvalError> {
    let family = spec.train_config.family;
    let kind = spec.agent;
    match family {
        Family::TMaze => {
            kind.tmaze_agent().ok_or(EvalError::AgentEnvMismatch {
                agent: kind,
                family,
            })?;
            run_eval_with(
                spec,
                workers,
                |c| TMaze::new(c).expect("validated config"),
                || kind.tmaze_agent().expect("checked above"),
            )
        }
        Family::ColorCubes => {
            kind.cubes_agent().ok_or(EvalError::AgentEnvMismatch {
                agent: kind,
                family,
            })?;
            run_eval_with(
                spec,
                workers,
                |c| ColorCubes::new(c).expect("validated config"),
                || kind.cubes_agent().expect("checked above"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, Regime};

    fn tm(l: u32, n: u32) -> EnvConfig {
        EnvConfig::tmaze(Regime::Fixed, l, n)
    }

    #[test]
    fn classification_examples() {
        let g = |a, b| classify_generalization(&a, &b).unwrap();
        assert_eq!(g(tm(5, 5), tm(5, 3)), Generalization::Interpolation);
        assert_eq!(g(tm(5, 5), tm(10, 5)), Generalization::Extrapolation);
        assert_eq!(g(tm(5, 5), tm(5, 5)), Generalization::Matched);
        assert_eq!(g(tm(5, 5), tm(10, 3)), Generalization::Mixed);
        assert_eq!(
            g(tm(5, 5), EnvConfig::tmaze(Regime::Uniform, 5, 5)),
            Generalization::Mixed
        );
        assert!(matches!(
            classify_generalization(&tm(5, 5), &EnvConfig::cubes(Mode::Medium)),
            Err(EvalError::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn sem_of_constant_rates_is_zero() {
        assert_eq!(mean_sem(&[0.0; 10]), (0.0, 0.0));
        assert_eq!(mean_sem(&[0.3; 4]).1, 0.0);
        let (m, s) = mean_sem(&[0.0, 1.0]);
        assert_eq!(m, 0.5);
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_fixed_l5_n5_is_perfect() {
        let spec = EvalSpec::matched(tm(5, 5), AgentKind::Oracle);
        let report = run_eval(&spec, 1).unwrap();
        let e = &report.entries[0];
        assert_eq!((e.success_mean, e.success_sem), (1.0, 0.0));
        assert_eq!(e.progress_histogram, vec![0, 0, 0, 0, 0, 1000]);
        assert_eq!(e.generalization, Generalization::Matched);
    }

    #[test]
    fn all_failures_give_zero_mean_and_sem() {
        // a step limit below the corridor length makes every episode truncate
        let mut cfg = tm(5, 1);
        cfg.max_steps = Some(3);
        let spec = EvalSpec::matched(cfg, AgentKind::Oracle).with_runs(4, 10);
        let e = &run_eval(&spec, 1).unwrap().entries[0];
        assert_eq!((e.success_mean, e.success_sem), (0.0, 0.0));
        assert_eq!(e.progress_histogram, vec![40, 0]);
    }

    #[test]
    fn mismatched_agent_is_rejected() {
        let spec = EvalSpec::matched(EnvConfig::cubes(Mode::Medium), AgentKind::Latch);
        assert!(matches!(
            run_eval(&spec, 1),
            Err(EvalError::AgentEnvMismatch { .. })
        ));
        let spec = EvalSpec::matched(tm(5, 1), AgentKind::Amnesiac);
        assert!(matches!(
            run_eval(&spec, 1),
            Err(EvalError::AgentEnvMismatch { .. })
        ));
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let spec = EvalSpec::matched(EnvConfig::tmaze(Regime::Uniform, 10, 3), AgentKind::Random)
            .with_runs(3, 40)
            .with_base_seed(11);
        let a = run_eval(&spec, 1).unwrap();
        let b = run_eval(&spec, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn report_json_round_trip() {
        let spec =
            EvalSpec::matched(EnvConfig::cubes(Mode::Extreme), AgentKind::Oracle).with_runs(2, 5);
        let report = run_eval(&spec, 1).unwrap();
        assert_eq!(EvalReport::from_json(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn invalid_counts_rejected() {
        let spec = EvalSpec::matched(tm(5, 1), AgentKind::Oracle).with_runs(0, 100);
        assert!(matches!(run_eval(&spec, 1), Err(EvalError::InvalidSpec(_))));
    }
}
