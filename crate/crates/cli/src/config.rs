use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use evanescent_core::analysis::{Axis, AxisScale, GridSpec};
use evanescent_core::analytic::{DilationMode, StepSolution};
use evanescent_core::bbm::BbmConfig;
use evanescent_core::PhysicalParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "EVANESCENT_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveWaveguide,
    SolveStep,
    Population,
    FitSpeed,
    Trajectory,
    BbmRun,
    Dwell,
    Invariance,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveWaveguide => "solve-waveguide",
            Command::SolveStep => "solve-step",
            Command::Population => "population",
            Command::FitSpeed => "fit-speed",
            Command::Trajectory => "trajectory",
            Command::BbmRun => "bbm-run",
            Command::Dwell => "dwell",
            Command::Invariance => "invariance",
            Command::Sweep => "sweep",
        }
    }

    /// Commands that need the reflecting step (`J = 0`, `E < V0`).
    fn needs_step(self, system: System) -> bool {
        matches!(self, Command::SolveStep | Command::BbmRun | Command::Dwell)
            || (self == Command::Trajectory && system == System::Step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Space,
    Time,
}

impl From<Mode> for DilationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Space => DilationMode::Space,
            Mode::Time => DilationMode::Time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    Step,
    Waveguide,
    PlaneWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Linear,
    Log,
}

impl From<Scale> for AxisScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Linear => AxisScale::Linear,
            Scale::Log => AxisScale::Log,
        }
    }
}

/// A fully resolved run. Serialized verbatim as the `config` echo of every
/// summary, and accepted back through `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: PhysicalParams,
    pub seed: u64,
    pub n_particles: u64,
    pub left_extent: Option<f64>,
    pub bins: usize,
    pub bin_range: Option<f64>,
    pub dump_trajectories: bool,
    pub trajectory_cap: u64,
    pub x_max: Option<f64>,
    pub points: usize,
    pub counts: Option<u64>,
    pub input: Option<PathBuf>,
    pub small_x_bound: f64,
    pub alpha: f64,
    pub mode: Mode,
    pub system: System,
    pub x0: f64,
    pub t_end: f64,
    pub grid: GridSpec,
    pub monte_carlo: bool,
    pub format: Format,
}

impl RunConfig {
    pub fn bbm_config(&self) -> Result<BbmConfig> {
        let mut cfg = BbmConfig::new(self.params)?;
        cfg.n_particles = self.n_particles;
        cfg.seed = self.seed;
        cfg.histogram_bins = self.bins;
        if let Some(l) = self.left_extent {
            cfg.left_extent = l;
        }
        if let Some(r) = self.bin_range {
            cfg.bin_range = r;
        }
        Ok(cfg)
    }
}

/// Execution settings that do not change results.
#[derive(Debug, Clone, PartialEq)]
pub struct Runtime {
    pub out_dir: PathBuf,
    pub quiet: bool,
    pub workers: Option<usize>,
}

/// Same fields as [`RunConfig`], all optional, as read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    params: Option<FileParams>,
    seed: Option<u64>,
    n_particles: Option<u64>,
    left_extent: Option<f64>,
    bins: Option<usize>,
    bin_range: Option<f64>,
    dump_trajectories: Option<bool>,
    trajectory_cap: Option<u64>,
    x_max: Option<f64>,
    points: Option<usize>,
    counts: Option<u64>,
    input: Option<PathBuf>,
    small_x_bound: Option<f64>,
    alpha: Option<f64>,
    mode: Option<Mode>,
    system: Option<System>,
    x0: Option<f64>,
    t_end: Option<f64>,
    grid: Option<FileGrid>,
    monte_carlo: Option<bool>,
    format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileParams {
    m: Option<f64>,
    hbar: Option<f64>,
    #[serde(rename = "E")]
    e: Option<f64>,
    #[serde(rename = "V0")]
    v0: Option<f64>,
    #[serde(rename = "J")]
    j: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    m: Option<f64>,
    hbar: Option<f64>,
    v0: Option<Axis>,
    e_over_v0: Option<Axis>,
}

const LONG_ABOUT: &str = "\
Stationary solutions, guidance laws and Monte Carlo dwell times for particles \
in evanescent regions.

Units default to hbar = m = 1. The Monte Carlo seed defaults to 20250707. \
Output goes to --out-dir, else $EVANESCENT_OUT_DIR, else the current directory.";

#[derive(Debug, Parser)]
#[command(name = "evanescent", version, about = "Particle speed in evanescent regimes", long_about = LONG_ABOUT)]
struct Args {
    /// What to compute (may also come from --config)
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,

    /// Incident kinetic energy E
    #[arg(long = "E", allow_negative_numbers = true)]
    e: Option<f64>,
    /// Step height V0
    #[arg(long = "V0", allow_negative_numbers = true)]
    v0: Option<f64>,
    /// Waveguide coupling rate J
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    /// Mass
    #[arg(long = "m", allow_negative_numbers = true)]
    m: Option<f64>,
    /// Action quantum
    #[arg(long, allow_negative_numbers = true)]
    hbar: Option<f64>,

    /// Monte Carlo seed [default: 20250707]
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo particles [default: 100000]
    #[arg(long = "n")]
    n_particles: Option<u64>,
    /// Injection distance L left of the step [default: pi/k]
    #[arg(long)]
    left_extent: Option<f64>,
    /// Histogram bins [default: 200]
    #[arg(long)]
    bins: Option<usize>,
    /// Histogram range [default: 5/(2 kappa)]
    #[arg(long)]
    bin_range: Option<f64>,
    /// Write per-particle trajectories (bbm-run, at most --trajectory-cap particles)
    #[arg(long)]
    dump_trajectories: bool,
    /// Largest ensemble for which trajectories are written [default: 1000]
    #[arg(long)]
    trajectory_cap: Option<u64>,

    /// Largest sampled position
    #[arg(long)]
    x_max: Option<f64>,
    /// Number of sampled positions [default: 100]
    #[arg(long)]
    points: Option<usize>,
    /// Detections per position for binomial noise (fit-speed)
    #[arg(long)]
    counts: Option<u64>,
    /// CSV with columns x,p_a to fit instead of synthetic data (fit-speed)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest Jx/v inside the fit window [default: 0.1]
    #[arg(long)]
    small_x_bound: Option<f64>,

    /// Dilation factor [default: 2]
    #[arg(long)]
    alpha: Option<f64>,
    /// Dilation mode [default: time]
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Stationary state to guide through (trajectory) [default: step]
    #[arg(long, value_enum)]
    system: Option<System>,
    /// Start position (trajectory) [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Integration horizon (trajectory) [default: 2000]
    #[arg(long)]
    t_end: Option<f64>,

    /// First E/V0 of the sweep [default: 0.1]
    #[arg(long)]
    ratio_start: Option<f64>,
    /// Last E/V0 of the sweep [default: 0.9]
    #[arg(long)]
    ratio_stop: Option<f64>,
    /// Number of E/V0 values [default: 9]
    #[arg(long)]
    ratio_count: Option<usize>,
    /// Spacing of E/V0 values [default: linear]
    #[arg(long, value_enum)]
    ratio_scale: Option<Scale>,
    /// First V0 of the sweep [default: --V0]
    #[arg(long)]
    v0_start: Option<f64>,
    /// Last V0 of the sweep [default: --V0]
    #[arg(long)]
    v0_stop: Option<f64>,
    /// Number of V0 values [default: 1]
    #[arg(long)]
    v0_count: Option<usize>,
    /// Also run a Monte Carlo ensemble per sweep row
    #[arg(long)]
    monte_carlo: bool,

    /// Table format [default: csv]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output directory
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// Suppress progress on standard error
    #[arg(long)]
    quiet: bool,
    /// Worker threads for Monte Carlo ensembles [default: all cores]
    #[arg(long)]
    workers: Option<usize>,
}

fn read_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))
}

fn usage(flag: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {message}"))
}

fn positive(flag: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(usage(flag, format!("must be positive, got {value}")))
    }
}

/// Parses the command line (argv without the program name) into a run.
///
/// Errors from clap itself (including `--help`) are returned unchanged so the
/// caller can print them with the right stream and exit code.
pub fn parse_config<I, T>(argv: I) -> Result<std::result::Result<(RunConfig, Runtime), clap::Error>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(
        std::iter::once(OsString::from("evanescent")).chain(argv.into_iter().map(Into::into)),
    ) {
        Ok(args) => args,
        Err(e) => return Ok(Err(e)),
    };
    resolve(args).map(Ok)
}

fn resolve(args: Args) -> Result<(RunConfig, Runtime)> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => ConfigFile::default(),
    };
    let fp = file.params.unwrap_or_default();

    let command = args
        .command
        .or(file.command)
        .ok_or_else(|| CliError::Usage("no command given (positional COMMAND or \"command\" in --config)".into()))?;

    let m = args.m.or(fp.m).unwrap_or(1.0);
    let hbar = args.hbar.or(fp.hbar).unwrap_or(1.0);
    let e = args.e.or(fp.e).unwrap_or(0.5);
    let v0 = args.v0.or(fp.v0).unwrap_or(1.0);
    let j = args.j.or(fp.j).unwrap_or(0.0);
    let params = PhysicalParams::new(m, hbar, e, v0, j).map_err(|err| {
        let flag = match err {
            evanescent_core::Error::InvalidParams(msg) if msg.starts_with("mass") => "--m",
            evanescent_core::Error::InvalidParams(msg) if msg.starts_with("hbar") => "--hbar",
            evanescent_core::Error::InvalidParams(msg) if msg.starts_with("energy") => "--E",
            evanescent_core::Error::InvalidParams(msg) if msg.starts_with("step") => "--V0",
            _ => "--J",
        };
        usage(flag, err)
    })?;

    let system = args.system.or(file.system).unwrap_or(System::Step);
    if command.needs_step(system) {
        StepSolution::new(&params).map_err(|err| usage("--E/--V0/--J", format!("InvalidRegime: {err}")))?;
    }

    let fg = file.grid.unwrap_or_default();
    let ratio_default = Axis {
        start: 0.1,
        stop: 0.9,
        count: 9,
        scale: AxisScale::Linear,
    };
    let file_ratio = fg.e_over_v0.unwrap_or(ratio_default);
    let file_v0 = fg.v0.unwrap_or(Axis::single(v0));
    let grid = GridSpec {
        m: fg.m.unwrap_or(m),
        hbar: fg.hbar.unwrap_or(hbar),
        e_over_v0: Axis {
            start: args.ratio_start.unwrap_or(file_ratio.start),
            stop: args.ratio_stop.unwrap_or(file_ratio.stop),
            count: args.ratio_count.unwrap_or(file_ratio.count),
            scale: args.ratio_scale.map(AxisScale::from).unwrap_or(file_ratio.scale),
        },
        v0: Axis {
            start: args.v0_start.unwrap_or(file_v0.start),
            stop: args.v0_stop.unwrap_or(file_v0.stop),
            count: args.v0_count.unwrap_or(file_v0.count),
            scale: file_v0.scale,
        },
    };

    let config = RunConfig {
        command,
        params,
        seed: args.seed.or(file.seed).unwrap_or(BbmConfig::DEFAULT_SEED),
        n_particles: args
            .n_particles
            .or(file.n_particles)
            .unwrap_or(BbmConfig::DEFAULT_PARTICLES),
        left_extent: args.left_extent.or(file.left_extent),
        bins: args.bins.or(file.bins).unwrap_or(BbmConfig::DEFAULT_BINS),
        bin_range: args.bin_range.or(file.bin_range),
        dump_trajectories: args.dump_trajectories || file.dump_trajectories.unwrap_or(false),
        trajectory_cap: args.trajectory_cap.or(file.trajectory_cap).unwrap_or(1000),
        x_max: args.x_max.or(file.x_max),
        points: args.points.or(file.points).unwrap_or(100),
        counts: args.counts.or(file.counts),
        input: args.input.or(file.input),
        small_x_bound: args.small_x_bound.or(file.small_x_bound).unwrap_or(0.1),
        alpha: args.alpha.or(file.alpha).unwrap_or(2.0),
        mode: args.mode.or(file.mode).unwrap_or(Mode::Time),
        system,
        x0: args.x0.or(file.x0).unwrap_or(0.5),
        t_end: args.t_end.or(file.t_end).unwrap_or(2000.0),
        grid,
        monte_carlo: args.monte_carlo || file.monte_carlo.unwrap_or(false),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
    };
    validate(&config)?;

    let runtime = Runtime {
        out_dir: args.out_dir.unwrap_or_else(|| PathBuf::from(".")),
        quiet: args.quiet,
        workers: args.workers,
    };
    if runtime.workers == Some(0) {
        return Err(usage("--workers", "must be at least 1"));
    }
    Ok((config, runtime))
}

fn validate(c: &RunConfig) -> Result<()> {
    if c.n_particles == 0 {
        return Err(usage("--n", "must be at least 1"));
    }
    if c.bins == 0 {
        return Err(usage("--bins", "must be at least 1"));
    }
    if c.points == 0 {
        return Err(usage("--points", "must be at least 1"));
    }
    if let Some(l) = c.left_extent {
        positive("--left-extent", l)?;
    }
    if let Some(r) = c.bin_range {
        positive("--bin-range", r)?;
    }
    if let Some(x) = c.x_max {
        positive("--x-max", x)?;
    }
    positive("--small-x-bound", c.small_x_bound)?;
    positive("--alpha", c.alpha)?;
    positive("--t-end", c.t_end)?;
    if !c.x0.is_finite() {
        return Err(usage("--x0", "must be finite"));
    }
    if c.system == System::Waveguide && c.command == Command::Trajectory && c.x0 < 0.0 {
        return Err(usage("--x0", "waveguide trajectories start at x >= 0"));
    }
    if c.command == Command::FitSpeed && c.input.is_none() && c.params.j() <= 0.0 {
        return Err(usage("--J", "fit-speed needs a positive coupling"));
    }
    if c.command == Command::Sweep {
        let g = &c.grid;
        if g.e_over_v0.scale == AxisScale::Log && g.e_over_v0.count > 1 {
            positive("--ratio-start", g.e_over_v0.start)?;
            positive("--ratio-stop", g.e_over_v0.stop)?;
        }
    }
    Ok(())
}
