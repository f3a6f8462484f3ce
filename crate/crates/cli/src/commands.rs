use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use memrw_core::agents::AgentKind;
use memrw_core::cubes::ColorCubes;
use memrw_core::eval::{run_eval, EvalError, EvalReport, EvalSpec};
use memrw_core::rollout::{run_episode_traced, EpisodeLog, RolloutError};
use memrw_core::tmaze::TMaze;
use memrw_core::{validate_config, EnvConfig, Family};

use crate::manifest::SweepManifest;
use crate::plot::{build_panels, render_svg};
use crate::report::{
    cubes_table, load_reports, report_file_name, summary_rows, tmaze_table, SUMMARY_HEADER,
};
use crate::CliError;

pub const BASE_SEED_VAR: &str = "MEMRW_BASE_SEED";

#[derive(Debug, Parser)]
#[command(name = "memrw", version, about = "Memory-rewriting benchmark runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode, print its trace and write the episode log as JSON.
    Run(RunArgs),
    /// Evaluate agents over every spec of a manifest.
    Sweep(SweepArgs),
    /// Aggregate sweep reports into tables and plots.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Environment config file (TOML).
    #[arg(long = "env")]
    pub env: PathBuf,
    #[arg(long)]
    pub agent: AgentKind,
    /// Episode seed; defaults to the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Episode log destination.
    #[arg(long, default_value = "episode.json")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `paper_grid`, `paper_generalization`, or a manifest file.
    #[arg(long)]
    pub manifest: String,
    /// Comma-separated agents; overrides the manifest's agent lists.
    #[arg(long, value_delimiter = ',')]
    pub agent: Vec<AgentKind>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Also write one SVG plot per T-Maze training config.
    #[arg(long)]
    pub plots: bool,
    #[arg(long, value_enum, default_value = "both")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Sweep output directory (or a directory of report JSON files).
    pub results: PathBuf,
    /// Destination directory; defaults to the results directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plots: bool,
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args).map(|_| ()),
        Command::Report(args) => cmd_report(&args),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn rollout_err(e: RolloutError) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = validate_config(&EnvConfig::load(&args.env)?)?;
    if !args.agent.supports(config.family) {
        return Err(EvalError::AgentEnvMismatch {
            agent: args.agent,
            family: config.family,
        }
        .into());
    }
    let seed = args.seed.unwrap_or(config.seed);
    let mut trace = Vec::new();
    let log: EpisodeLog = match config.family {
        Family::TMaze => {
            let mut env = TMaze::new(&config)?;
            let mut agent = args.agent.tmaze_agent().expect("support checked");
            run_episode_traced(&mut env, &mut agent, seed, &mut trace).map_err(rollout_err)?
        }
        Family::ColorCubes => {
            let mut env = ColorCubes::new(&config)?;
            let mut agent = args.agent.cubes_agent().expect("support checked");
            run_episode_traced(&mut env, &mut agent, seed, &mut trace).map_err(rollout_err)?
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in &trace {
        let _ = writeln!(out, "{line}");
    }
    write_file(&args.out, &log.to_json())?;
    let _ = writeln!(
        out,
        "config={} agent={} seed={seed} success={} return={:.2} steps={} log={}",
        config.label(),
        args.agent,
        log.success,
        log.total_return,
        log.steps.len(),
        args.out.display()
    );
    Ok(())
}

/// Base seed for sweeps: `MEMRW_BASE_SEED` when set, else 0.
pub fn base_seed_from_env() -> Result<u64, CliError> {
    match std::env::var(BASE_SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{BASE_SEED_VAR} must be an unsigned integer, got {v:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(CliError::Usage(format!("{BASE_SEED_VAR}: {e}"))),
    }
}

/// Runs a sweep. Every spec is validated first; results are flushed to disk
/// after each spec so an interrupted sweep keeps what it finished.
pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<EvalReport>, CliError> {
    let manifest = SweepManifest::resolve(&args.manifest)?;
    let specs = manifest.expand(&args.manifest, &args.agent, base_seed_from_env()?)?;
    run_sweep(&specs, &args.out, args.workers, args.format, args.plots)
}

pub fn run_sweep(
    specs: &[EvalSpec],
    out_dir: &Path,
    workers: usize,
    format: Format,
    plots: bool,
) -> Result<Vec<EvalReport>, CliError> {
    create_dir(out_dir)?;
    let reports_dir = out_dir.join("reports");
    if format.json() {
        create_dir(&reports_dir)?;
    }
    let csv_path = out_dir.join("summary.csv");
    let mut csv = if format.csv() {
        let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{SUMMARY_HEADER}").map_err(io_err(&csv_path))?;
        Some(w)
    } else {
        None
    };

    let mut reports = Vec::with_capacity(specs.len());
    for (index, spec) in specs.iter().enumerate() {
        let report = run_eval(spec, workers)?;
        if let Some(w) = csv.as_mut() {
            for row in summary_rows(index, &report) {
                writeln!(w, "{row}").map_err(io_err(&csv_path))?;
            }
            w.flush().map_err(io_err(&csv_path))?;
        }
        if format.json() {
            let path = reports_dir.join(report_file_name(index, report.agent));
            write_file(&path, &report.to_json())?;
        }
        if let Some(m) = report.matched() {
            eprintln!(
                "[{}/{}] {} {} {:.2}±{:.2}",
                index + 1,
                specs.len(),
                report.agent,
                report.train_config.label(),
                m.success_mean,
                m.success_sem
            );
        }
        reports.push(report);
    }
    if plots {
        write_plots(&reports, &out_dir.join("plots"))?;
    }
    println!("{} reports written to {}", reports.len(), out_dir.display());
    Ok(reports)
}

fn write_plots(reports: &[EvalReport], dir: &Path) -> Result<usize, CliError> {
    let panels = build_panels(reports);
    create_dir(dir)?;
    for panel in &panels {
        write_file(
            &dir.join(format!("{}.svg", panel.file_stem())),
            &render_svg(panel),
        )?;
    }
    Ok(panels.len())
}

pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let loaded = load_reports(&args.results)?;
    let reports: Vec<EvalReport> = loaded.into_iter().map(|(_, r)| r).collect();
    let out = args.out.clone().unwrap_or_else(|| args.results.clone());
    create_dir(&out)?;
    let table = tmaze_table(&reports);
    write_file(&out.join("table.csv"), &table.to_csv())?;
    let cubes = cubes_table(&reports);
    write_file(&out.join("table_cubes.csv"), &cubes.to_csv())?;
    println!(
        "table.csv: {} rows, table_cubes.csv: {} rows",
        table.rows.len(),
        cubes.rows.len()
    );
    if args.plots {
        let n = write_plots(&reports, &out.join("plots"))?;
        println!("{n} plots written to {}", out.join("plots").display());
    }
    Ok(())
}
