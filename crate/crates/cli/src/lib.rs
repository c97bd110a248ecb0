//! The `vmc` command-line harness.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags, unknown engine or
//! application, unreadable configuration).
//!
//! Engine settings are merged in this order, later sources winning: built-in defaults,
//! the `--config` JSON file, then command-line flags.

pub mod stats;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use vmc_apps::{make_app, write_csv, Hit, ScoringApp, APP_NAMES};
use vmc_core::{
    build_geometry, export_xml, EngineConfig, EngineRegistry, Geometry, McError, PartialConfig, RunSummary, VolumeId,
};

use crate::stats::{clustered_mean, relative_difference, standardized_difference, Estimate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::UnknownEngine(_) | McError::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "vmc",
    version,
    about = "Run example applications on pluggable transport engines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run events and write the hits as CSV.
    Run(RunArgs),
    /// Run one application on two engines and compare hit distributions.
    Compare(CompareArgs),
    /// Inspect an application's geometry.
    Geom {
        #[command(subcommand)]
        command: GeomCommand,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// Random seed (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON engine configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Physics switch, repeatable: loss, mscat or decay.
    #[arg(long = "physics", value_name = "FLAG=BOOL", value_parser = parse_flag)]
    pub physics: Vec<(String, bool)>,
    /// Energy cut for every medium, GeV.
    #[arg(long = "cut", value_name = "GEV")]
    pub cut_gev: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "example01")]
    pub app: String,
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub events: u64,
    /// Hit CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, default_value = "layeredcal")]
    pub app: String,
    /// Two engine names separated by a comma.
    #[arg(long, value_delimiter = ',', required = true)]
    pub engines: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub events: u64,
    #[command(flatten)]
    pub physics: PhysicsArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum GeomCommand {
    /// Print the placement tree.
    Dump {
        #[arg(long, default_value = "example01")]
        app: String,
    },
    /// Write the geometry as XML.
    ExportXml {
        #[arg(long, default_value = "example01")]
        app: String,
        /// Destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_flag(s: &str) -> Result<(String, bool), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected FLAG=BOOL, got {s:?}"))?;
    let on = match value {
        "true" | "on" | "1" => true,
        "false" | "off" | "0" => false,
        _ => return Err(format!("{value:?} is not a boolean")),
    };
    Ok((key.to_string(), on))
}

/// Merges defaults, the configuration file and flags into an engine configuration.
pub fn resolve_config(engine: Option<&str>, physics: &PhysicsArgs) -> Result<EngineConfig, CliError> {
    let file = match &physics.config {
        Some(path) => PartialConfig::from_path(path)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        engine: engine.map(str::to_string),
        seed: physics.seed,
        physics: physics.physics.iter().cloned().collect(),
        cut_gev: physics.cut_gev,
    };
    Ok(file.overlay(flags)?.resolve()?)
}

fn check_app(name: &str) -> Result<(), CliError> {
    if APP_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "unknown app: {name} (expected one of {})",
            APP_NAMES.join(", ")
        )))
    }
}

fn check_engine(registry: &EngineRegistry, name: &str) -> Result<(), CliError> {
    if registry.contains(name) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown engine: {name}")))
    }
}

/// Result of running one application on one engine.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub engine: String,
    pub summary: RunSummary,
    pub hits: Vec<Hit>,
    pub geometry: Arc<Geometry>,
}

/// Creates the engine named in `cfg`, runs `events` events of `app_name` and collects hits.
pub fn run_app(
    registry: &EngineRegistry,
    app_name: &str,
    cfg: &EngineConfig,
    events: u64,
) -> Result<RunOutput, CliError> {
    check_app(app_name)?;
    check_engine(registry, &cfg.engine_name)?;
    let mut app: Box<dyn ScoringApp> = make_app(app_name, cfg.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut mc = registry.create(cfg)?;
    mc.init_mc(app.as_mut())?;
    let summary = mc.run_mc(app.as_mut(), events)?;
    Ok(RunOutput {
        engine: mc.engine_name().to_string(),
        summary,
        hits: app.take_hits(),
        geometry: mc.geometry().expect("initialized").clone(),
    })
}

pub fn format_summary(summary: &RunSummary, hits: usize) -> String {
    format!(
        "events={} tracks={} steps={} total_edep_gev={} hits={}",
        summary.events, summary.tracks, summary.steps, summary.total_edep, hits
    )
}

fn write_hits_file(path: &Path, hits: &[Hit]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    write_csv(BufWriter::new(file), hits)?;
    Ok(())
}

fn cmd_run(args: &RunArgs, registry: &EngineRegistry, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve_config(args.engine.as_deref(), &args.physics)?;
    let result = run_app(registry, &args.app, &cfg, args.events)?;
    let line = format_summary(&result.summary, result.hits.len());
    match &args.out {
        Some(path) => {
            write_hits_file(path, &result.hits)?;
            writeln!(out, "{line}")?;
        }
        None => {
            write_csv(&mut *out, &result.hits)?;
            eprintln!("{line}");
        }
    }
    Ok(())
}

/// Hit statistics of one engine.
#[derive(Debug, Clone)]
pub struct EngineStats {
    pub engine: String,
    pub events: u64,
    pub hits: usize,
    pub x: Option<Estimate>,
    pub z: Option<Estimate>,
    /// Sum of hit deposits, GeV.
    pub total_edep: f64,
}

impl EngineStats {
    pub fn from_run(run: &RunOutput) -> Self {
        let events = run.summary.events;
        Self {
            engine: run.engine.clone(),
            events,
            hits: run.hits.len(),
            x: clustered_mean(&run.hits, events, |h| h.position.x),
            z: clustered_mean(&run.hits, events, |h| h.position.z),
            total_edep: run.hits.iter().map(|h| h.edep).sum(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub a: EngineStats,
    pub b: EngineStats,
    pub smd_x: f64,
    pub smd_z: f64,
    pub edep_rel_diff: f64,
}

fn smd(a: &Option<Estimate>, b: &Option<Estimate>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => standardized_difference(a, b),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

impl Comparison {
    pub fn new(a: EngineStats, b: EngineStats) -> Self {
        Self {
            smd_x: smd(&a.x, &b.x),
            smd_z: smd(&a.z, &b.z),
            edep_rel_diff: relative_difference(a.total_edep, b.total_edep),
            a,
            b,
        }
    }

    pub fn render(&self) -> String {
        let fmt = |e: &Option<Estimate>| match e {
            Some(e) => (format!("{:.6}", e.mean), format!("{:.6}", e.sd)),
            None => ("-".to_string(), "-".to_string()),
        };
        let mut s = format!(
            "{:<10} {:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>14}\n",
            "engine", "events", "hits", "mean_x_cm", "sd_x_cm", "mean_z_cm", "sd_z_cm", "edep_gev"
        );
        for st in [&self.a, &self.b] {
            let (mx, sx) = fmt(&st.x);
            let (mz, sz) = fmt(&st.z);
            s += &format!(
                "{:<10} {:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>14.6}\n",
                st.engine, st.events, st.hits, mx, sx, mz, sz, st.total_edep
            );
        }
        s += &format!(
            "smd_x={:.4} smd_z={:.4} edep_rel_diff={:.4}\n",
            self.smd_x, self.smd_z, self.edep_rel_diff
        );
        s
    }
}

/// Runs `app_name` on both engines concurrently with the same settings and seed.
pub fn compare_engines(
    registry: &EngineRegistry,
    app_name: &str,
    base: &EngineConfig,
    engines: [&str; 2],
    events: u64,
) -> Result<Comparison, CliError> {
    check_app(app_name)?;
    for name in engines {
        check_engine(registry, name)?;
    }
    let configs = engines.map(|name| EngineConfig {
        engine_name: name.to_string(),
        ..base.clone()
    });
    let [ra, rb] = thread::scope(|s| {
        let handles = configs
            .each_ref()
            .map(|cfg| s.spawn(move || run_app(registry, app_name, cfg, events)));
        handles.map(|h| h.join().expect("engine thread panicked"))
    });
    Ok(Comparison::new(
        EngineStats::from_run(&ra?),
        EngineStats::from_run(&rb?),
    ))
}

fn cmd_compare(args: &CompareArgs, registry: &EngineRegistry, out: &mut dyn Write) -> Result<(), CliError> {
    let [a, b] = args.engines.as_slice() else {
        return Err(CliError::Usage(format!(
            "--engines needs exactly two names, got {}",
            args.engines.len()
        )));
    };
    // the engine names come from --engines; any engine in the config file is irrelevant
    let base = resolve_config(Some(a), &args.physics)?;
    let cmp = compare_engines(registry, &args.app, &base, [a, b], args.events)?;
    write!(out, "{}", cmp.render())?;
    Ok(())
}

fn trimmed(geometry: &Geometry, id: VolumeId) -> &str {
    geometry.volume(id).name.trim_end()
}

/// The placement tree, one indented line per placement below a line for the world.
pub fn dump_tree(geometry: &Geometry) -> String {
    fn visit(g: &Geometry, volume: VolumeId, depth: usize, out: &mut String) {
        for &idx in g.daughters(volume) {
            let p = &g.store().placements[idx];
            let node = g.node(idx);
            let child = VolumeId::from_index(node.volume);
            out.push_str(&format!(
                "{:indent$}{} copy={} mother={} shape={} pos=({},{},{}) rot={} {}\n",
                "",
                trimmed(g, child),
                p.copy,
                trimmed(g, volume),
                g.shape(child),
                p.translation[0],
                p.translation[1],
                p.translation[2],
                p.rotation_id,
                p.flag,
                indent = 2 * depth
            ));
            visit(g, child, depth + 1, out);
        }
    }
    let world = geometry.world();
    let mut out = format!("{} shape={}\n", trimmed(geometry, world), geometry.shape(world));
    visit(geometry, world, 1, &mut out);
    out
}

fn app_geometry(app: &str, registry: &EngineRegistry) -> Result<Geometry, CliError> {
    check_app(app)?;
    let mut app = make_app(app, vmc_core::DEFAULT_SEED).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(build_geometry(app.as_mut(), registry.particles())?)
}

fn cmd_geom(cmd: &GeomCommand, registry: &EngineRegistry, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        GeomCommand::Dump { app } => {
            let g = app_geometry(app, registry)?;
            write!(out, "{}", dump_tree(&g))?;
        }
        GeomCommand::ExportXml { app, out: path } => {
            let xml = export_xml(&app_geometry(app, registry)?);
            match path {
                Some(path) => {
                    std::fs::write(path, xml).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?
                }
                None => write!(out, "{xml}")?,
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and executes the command; returns the exit code.
pub fn run_cli<I, T>(args: I, registry: &EngineRegistry, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, registry, out),
        Command::Compare(args) => cmd_compare(args, registry, out),
        Command::Geom { command } => cmd_geom(command, registry, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
