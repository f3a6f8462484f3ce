//! Tabular output: per-sweep summary rows and the aggregate agent tables.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use memrw_core::agents::AgentKind;
use memrw_core::eval::{ConfigReport, EvalReport, Generalization};
use memrw_core::{EnvConfig, Family, Mode, Regime};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed report {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("no report files found in {0}")]
    NoReports(String),
}

pub const SUMMARY_HEADER: &str = "index,agent,family,train,eval,generalization,\
regime_or_mode,corridor_length,corridor_count,grid_size,cube_count,subepisode_count,\
teleport_prob,n_runs,episodes_per_run,success_mean,success_sem,mean_progress,mean_return";

/// `m.mm±s.ss`
pub fn mean_pm_sem(mean: f64, sem: f64) -> String {
    format!("{mean:.2}±{sem:.2}")
}

fn config_columns(c: &EnvConfig) -> [String; 7] {
    match c.family {
        Family::TMaze => [
            c.regime_or_default().to_string(),
            c.corridor_length.to_string(),
            c.corridor_count.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ],
        Family::ColorCubes => [
            c.mode.to_string(),
            String::new(),
            String::new(),
            c.grid_size.to_string(),
            c.cube_count.to_string(),
            c.subepisode_count.to_string(),
            format!("{:.2}", c.teleport_prob),
        ],
    }
}

/// One summary CSV line per evaluation entry of `report`.
pub fn summary_rows(index: usize, report: &EvalReport) -> Vec<String> {
    report
        .entries
        .iter()
        .map(|e| {
            let mut cols = vec![
                index.to_string(),
                report.agent.to_string(),
                report.train_config.family.to_string(),
                report.train_config.label(),
                e.eval_config.label(),
                e.generalization.to_string(),
            ];
            cols.extend(config_columns(&e.eval_config));
            cols.extend([
                report.n_runs.to_string(),
                report.episodes_per_run.to_string(),
                format!("{:.2}", e.success_mean),
                format!("{:.2}", e.success_sem),
                format!("{:.2}", e.mean_progress),
                format!("{:.2}", e.mean_return),
            ]);
            cols.join(",")
        })
        .collect()
}

/// File name for the `index`-th report of a sweep.
pub fn report_file_name(index: usize, agent: AgentKind) -> String {
    format!("{index:03}_{agent}.json")
}

/// Reads every `*.json` report in `dir/reports`, or in `dir` itself when it
/// has no `reports` subdirectory, in file-name order.
pub fn load_reports(dir: &Path) -> Result<Vec<(PathBuf, EvalReport)>, ReportError> {
    let sub = dir.join("reports");
    let root = if sub.is_dir() { sub } else { dir.to_path_buf() };
    let io = |source| ReportError::Io {
        path: root.display().to_string(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&root)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
    paths.sort();
    if paths.is_empty() {
        return Err(ReportError::NoReports(root.display().to_string()));
    }
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(|source| ReportError::Io {
                path: p.display().to_string(),
                source,
            })?;
            let report = EvalReport::from_json(&text).map_err(|e| ReportError::Malformed {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            Ok((p, report))
        })
        .collect()
}

/// A CSV table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn matched_entries(reports: &[EvalReport], family: Family) -> Vec<(AgentKind, &ConfigReport)> {
    reports
        .iter()
        .filter(|r| r.train_config.family == family)
        .flat_map(|r| {
            r.entries
                .iter()
                .filter(|e| e.generalization == Generalization::Matched)
                .map(move |e| (r.agent, e))
        })
        .collect()
}

fn pivot<K: Ord + Clone>(
    entries: &[(AgentKind, &ConfigReport)],
    key: impl Fn(&EnvConfig) -> K,
    key_columns: &[&str],
    key_cells: impl Fn(&K) -> Vec<String>,
) -> Table {
    let agents: BTreeSet<AgentKind> = entries.iter().map(|(a, _)| *a).collect();
    let mut cells: BTreeMap<K, BTreeMap<AgentKind, String>> = BTreeMap::new();
    for (agent, e) in entries {
        cells
            .entry(key(&e.eval_config))
            .or_default()
            .entry(*agent)
            .or_insert_with(|| mean_pm_sem(e.success_mean, e.success_sem));
    }
    let mut header: Vec<String> = key_columns.iter().map(|s| s.to_string()).collect();
    header.extend(agents.iter().map(|a| a.to_string()));
    let rows = cells
        .iter()
        .map(|(k, by_agent)| {
            let mut row = key_cells(k);
            row.extend(
                agents
                    .iter()
                    .map(|a| by_agent.get(a).cloned().unwrap_or_default()),
            );
            row
        })
        .collect();
    Table { header, rows }
}

/// T-Maze success table: one row per (regime, l, n), one column per agent.
pub fn tmaze_table(reports: &[EvalReport]) -> Table {
    pivot(
        &matched_entries(reports, Family::TMaze),
        |c| (c.regime_or_default(), c.corridor_length, c.corridor_count),
        &["regime", "corridor_length", "corridor_count"],
        |(regime, l, n): &(Regime, u32, u32)| {
            vec![regime.to_string(), l.to_string(), n.to_string()]
        },
    )
}

/// Color-Cubes success table: one row per (mode, G, N, K), one column per agent.
pub fn cubes_table(reports: &[EvalReport]) -> Table {
    pivot(
        &matched_entries(reports, Family::ColorCubes),
        |c| (c.mode, c.grid_size, c.cube_count, c.subepisode_count),
        &["mode", "grid_size", "cube_count", "subepisode_count"],
        |(mode, g, n, k): &(Mode, u32, u32, u32)| {
            vec![
                mode.to_string(),
                g.to_string(),
                n.to_string(),
                k.to_string(),
            ]
        },
    )
}
