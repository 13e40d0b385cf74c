//! `berryline` command-line front end.
//!
//! Commands: `berry`, `spectrum`, `broaden`, `scaling`, `mead-compare`.
//! Values come from flags, then from `--config <file>` (`key = value` lines,
//! keys are long flag names), then from defaults. Exit codes: 0 success,
//! 2 configuration error, 3 numerical failure.

mod config;
mod json;
mod output;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::berry::{
    connection_integral_su3, wilson_loop_phase, Branch, ParameterLoop, Tracking, WilsonOptions,
    MIN_LOOP_POINTS,
};
use crate::broadening::{
    compare_with_mead, mead_scaling, scaling_study, sweep_patch, sweep_patch_su3, PatchConfig,
    ScalingModel,
};
use crate::error::Error;
use crate::models::{
    collective_derivative, CollectiveKind, CollectiveModel, ThreeLevelModel, TwoLevelModel,
};
use crate::quantize::spectrum;

pub use config::{parse_config_text, render_config};
pub use json::{format_float, Json};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// An invalid input, named by its configuration key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: String) -> Self {
        Self {
            key: key.to_string(),
            message,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid value for --{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "two-level")]
    TwoLevel,
    Su3,
}

impl ModelArg {
    fn label(self) -> &'static str {
        match self {
            ModelArg::TwoLevel => "two-level",
            ModelArg::Su3 => "su3",
        }
    }

    fn scaling(self) -> ScalingModel {
        match self {
            ModelArg::TwoLevel => ScalingModel::TwoLevel,
            ModelArg::Su3 => ScalingModel::Su3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum H0Arg {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "berryline",
    version,
    about = "Berry phases, Berry-corrected spectra and fundamental-length line broadening",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output format [default: json].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output path; stdout when absent. With `both`, `.json` and `.csv`
    /// replace the extension.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Reduced Planck constant [default: 1].
    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    /// Suppress warnings on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Minimum spectral gap along a loop [default: 1e-8].
    #[arg(long = "gap-tol", global = true)]
    pub gap_tol: Option<f64>,

    /// Maximum phase change on doubling loop points [default: 1e-6].
    #[arg(long = "phase-tol", global = true)]
    pub phase_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geometric phase around a parameter loop.
    Berry(BerryArgs),
    /// Berry-corrected semiclassical spectrum of the two-level model.
    Spectrum(SpectrumArgs),
    /// Line broadening from a patch of size l.
    Broaden(BroadenArgs),
    /// Log-log fit of the broadening against l/Rc.
    Scaling(ScalingArgs),
    /// Berry broadening against the linear Mead bound.
    #[command(name = "mead-compare")]
    MeadCompare(MeadArgs),
}

#[derive(Debug, Args)]
pub struct CollectiveArgs {
    /// Collective Hamiltonian kind [default: linear].
    #[arg(long, value_enum)]
    pub h0: Option<H0Arg>,
    /// ω of the linear kind [default: 1].
    #[arg(long)]
    pub omega: Option<f64>,
    /// I of the quadratic kind [default: 1].
    #[arg(long)]
    pub inertia: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BerryArgs {
    /// two-level or su3.
    #[arg(value_enum)]
    pub model_pos: Option<ModelArg>,
    /// Same as the positional model; the config-file spelling.
    #[arg(long = "model", value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long = "Rc")]
    pub rc: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Two-level branch; both when absent.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Two-level φ winding number [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub winding: Option<i32>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub chi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub chi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n1: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub n2: Option<i32>,
    /// Amplitude of θ oscillation along an SU(3) loop [default: 0].
    #[arg(long = "theta-wobble", allow_hyphen_values = true)]
    pub theta_wobble: Option<f64>,
    /// Amplitude of φ oscillation along an SU(3) loop [default: 0].
    #[arg(long = "phi-wobble", allow_hyphen_values = true)]
    pub phi_wobble: Option<f64>,
    /// SU(3) level, ascending energy index [default: 2, the μ₁ level].
    #[arg(long)]
    pub level: Option<usize>,
    /// Loop points K [default: 4096].
    #[arg(long)]
    pub points: Option<usize>,
    /// Diagonalize at every point even for the μ₁ level.
    #[arg(long, value_parser = clap::value_parser!(bool), num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
    pub eigen: Option<bool>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "Rc")]
    pub rc: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub collective: CollectiveArgs,
    #[arg(long = "m-min", allow_hyphen_values = true)]
    pub m_min: Option<i64>,
    #[arg(long = "m-max", allow_hyphen_values = true)]
    pub m_max: Option<i64>,
}

#[derive(Debug, Args)]
pub struct PatchArgs {
    #[arg(long = "Rc")]
    pub rc: Option<f64>,
    /// r-grid size over [0, l/2] [default: 101].
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub collective: CollectiveArgs,
    /// Quantum number m [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
}

#[derive(Debug, Args)]
pub struct BroadenArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Fundamental length [default: 1e-3].
    #[arg(long)]
    pub l: Option<f64>,
    #[command(flatten)]
    pub patch: PatchArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub which: Option<ModelArg>,
    /// Comma-separated l/Rc values [default: 1e-4,3e-4,1e-3,3e-3,1e-2].
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    #[command(flatten)]
    pub patch: PatchArgs,
    #[arg(long)]
    pub nu0: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MeadArgs {
    #[arg(long)]
    pub nu0: Option<f64>,
    /// l/Rc [default: 1e-3].
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub patch: PatchArgs,
}

/// Validated inputs for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<(String, String)>,
    pub task: Task,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    BerryTwoLevel {
        lp: ParameterLoop,
        branches: Vec<Branch>,
        opts: WilsonOptions,
    },
    BerrySu3 {
        lp: ParameterLoop,
        level: usize,
        opts: WilsonOptions,
    },
    Spectrum {
        collective: CollectiveModel,
        internal: TwoLevelModel,
        m_min: i64,
        m_max: i64,
    },
    Broaden {
        model: ModelArg,
        patch: PatchConfig,
    },
    Scaling {
        model: ModelArg,
        ratios: Vec<f64>,
        base: PatchConfig,
        nu0: f64,
        beta: f64,
    },
    MeadCompare {
        patch: PatchConfig,
        nu0: f64,
        beta: f64,
    },
}

/// Collects resolved values and echoes them in canonical text form.
struct Echo(Vec<(String, String)>);

impl Echo {
    fn f(&mut self, key: &str, v: f64) -> f64 {
        self.0.push((key.into(), format!("{v:e}")));
        v
    }

    fn i<T: fmt::Display + Copy>(&mut self, key: &str, v: T) -> T {
        self.0.push((key.into(), v.to_string()));
        v
    }

    fn s(&mut self, key: &str, v: &str) {
        self.0.push((key.into(), v.into()));
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(
            key,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be finite, got {v}")))
    }
}

fn lib_err(key: &str) -> impl Fn(Error) -> ConfigError + '_ {
    move |e| ConfigError::new(key, e.to_string())
}

fn collective(
    args: &CollectiveArgs,
    hbar: f64,
    echo: &mut Echo,
    default_omega: f64,
) -> Result<CollectiveModel, ConfigError> {
    let kind = args.h0.unwrap_or(H0Arg::Linear);
    match kind {
        H0Arg::Linear => {
            echo.s("h0", "linear");
            let omega = echo.f(
                "omega",
                positive("omega", args.omega.unwrap_or(default_omega))?,
            );
            CollectiveModel::new(CollectiveKind::Linear, omega, hbar).map_err(lib_err("omega"))
        }
        H0Arg::Quadratic => {
            echo.s("h0", "quadratic");
            let inertia = echo.f("inertia", positive("inertia", args.inertia.unwrap_or(1.0))?);
            CollectiveModel::new(CollectiveKind::Quadratic, inertia, hbar)
                .map_err(lib_err("inertia"))
        }
    }
}

fn patch(
    args: &PatchArgs,
    l_key: &str,
    l: f64,
    hbar: f64,
    echo: &mut Echo,
    default_omega: f64,
) -> Result<PatchConfig, ConfigError> {
    let rc = echo.f("Rc", positive("Rc", args.rc.unwrap_or(1.0))?);
    let samples = echo.i(
        "samples",
        args.samples.unwrap_or(crate::broadening::DEFAULT_SAMPLES),
    );
    if samples < 2 {
        return Err(ConfigError::new(
            "samples",
            format!("need at least 2, got {samples}"),
        ));
    }
    let col = collective(&args.collective, hbar, echo, default_omega)?;
    let m = echo.i("m", args.m.unwrap_or(0));
    let branch = args.branch.unwrap_or(BranchArg::Plus);
    echo.s("branch", Branch::from(branch).label());
    let l_abs = if l_key == "ratio" { l * rc } else { l };
    PatchConfig::new(l_abs, rc, samples, col, m, branch.into()).map_err(lib_err(l_key))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let g = &cli.global;
        let mut echo = Echo(Vec::new());
        let hbar = echo.f("hbar", positive("hbar", g.hbar.unwrap_or(1.0))?);

        let (command, task) = match &cli.command {
            Command::Berry(a) => {
                let model = a.model_pos.or(a.model).ok_or_else(|| {
                    ConfigError::new("model", "required: two-level or su3".into())
                })?;
                echo.s("model", model.label());
                let points = echo.i("points", a.points.unwrap_or(4096));
                if points < MIN_LOOP_POINTS {
                    return Err(ConfigError::new(
                        "points",
                        format!("loop needs K >= {MIN_LOOP_POINTS}, got {points}"),
                    ));
                }
                let gap_tol = echo.f(
                    "gap-tol",
                    positive(
                        "gap-tol",
                        g.gap_tol.unwrap_or(crate::berry::DEFAULT_GAP_TOL),
                    )?,
                );
                let phase_tol = echo.f(
                    "phase-tol",
                    positive(
                        "phase-tol",
                        g.phase_tol.unwrap_or(crate::berry::DEFAULT_PHASE_TOL),
                    )?,
                );
                let eigen = echo.i("eigen", a.eigen.unwrap_or(false));
                let opts = WilsonOptions {
                    gap_tol,
                    phase_tol,
                    tracking: if eigen {
                        Tracking::Eigen
                    } else {
                        Tracking::Auto
                    },
                };
                match model {
                    ModelArg::TwoLevel => {
                        let rc = echo.f("Rc", finite("Rc", a.rc.unwrap_or(1.0))?);
                        if rc < 0.0 {
                            return Err(ConfigError::new("Rc", format!("must be >= 0, got {rc}")));
                        }
                        let r = echo.f("r", finite("r", a.r.unwrap_or(1.0))?);
                        let internal =
                            TwoLevelModel::new_unchecked_scale(rc, r).map_err(lib_err("r"))?;
                        let winding = echo.i("winding", a.winding.unwrap_or(1));
                        let branches = match a.branch {
                            Some(b) => {
                                echo.s("branch", Branch::from(b).label());
                                vec![b.into()]
                            }
                            None => vec![Branch::Minus, Branch::Plus],
                        };
                        let lp = ParameterLoop::two_level(internal, winding, points)
                            .map_err(lib_err("points"))?;
                        ("berry", Task::BerryTwoLevel { lp, branches, opts })
                    }
                    ModelArg::Su3 => {
                        let theta = echo.f(
                            "theta",
                            finite("theta", a.theta.unwrap_or(std::f64::consts::FRAC_PI_3))?,
                        );
                        let phi = echo.f(
                            "phi",
                            finite("phi", a.phi.unwrap_or(std::f64::consts::FRAC_PI_4))?,
                        );
                        let chi1 = echo.f("chi1", finite("chi1", a.chi1.unwrap_or(0.0))?);
                        let chi2 = echo.f("chi2", finite("chi2", a.chi2.unwrap_or(0.0))?);
                        let n1 = echo.i("n1", a.n1.unwrap_or(1));
                        let n2 = echo.i("n2", a.n2.unwrap_or(1));
                        let tw = echo.f(
                            "theta-wobble",
                            finite("theta-wobble", a.theta_wobble.unwrap_or(0.0))?,
                        );
                        let pw = echo.f(
                            "phi-wobble",
                            finite("phi-wobble", a.phi_wobble.unwrap_or(0.0))?,
                        );
                        let level = echo.i("level", a.level.unwrap_or(2));
                        if level > 2 {
                            return Err(ConfigError::new(
                                "level",
                                format!("must be 0, 1 or 2, got {level}"),
                            ));
                        }
                        let m = ThreeLevelModel::new(theta, phi, chi1, chi2)
                            .map_err(lib_err("theta"))?;
                        let lp = ParameterLoop::su3(m, n1, n2, points)
                            .and_then(|lp| lp.with_wobble(tw, pw))
                            .map_err(lib_err("theta-wobble"))?;
                        ("berry", Task::BerrySu3 { lp, level, opts })
                    }
                }
            }
            Command::Spectrum(a) => {
                let rc = echo.f("Rc", positive("Rc", a.rc.unwrap_or(1.0))?);
                let r = echo.f("r", finite("r", a.r.unwrap_or(1.0))?);
                let internal = TwoLevelModel::new(rc, r).map_err(lib_err("r"))?;
                let collective = collective(&a.collective, hbar, &mut echo, 1.0)?;
                let m_min = echo.i("m-min", a.m_min.unwrap_or(-2));
                let m_max = echo.i("m-max", a.m_max.unwrap_or(2));
                if m_min > m_max {
                    return Err(ConfigError::new(
                        "m-max",
                        format!("m-max {m_max} below m-min {m_min}"),
                    ));
                }
                if m_max - m_min > 100_000 {
                    return Err(ConfigError::new(
                        "m-max",
                        "at most 100001 values of m".into(),
                    ));
                }
                (
                    "spectrum",
                    Task::Spectrum {
                        collective,
                        internal,
                        m_min,
                        m_max,
                    },
                )
            }
            Command::Broaden(a) => {
                let model = a.model.unwrap_or(ModelArg::TwoLevel);
                echo.s("model", model.label());
                let l = echo.f("l", positive("l", a.l.unwrap_or(1e-3))?);
                let patch = patch(&a.patch, "l", l, hbar, &mut echo, 1.0)?;
                ("broaden", Task::Broaden { model, patch })
            }
            Command::Scaling(a) => {
                let model = a.which.unwrap_or(ModelArg::TwoLevel);
                echo.s("which", model.label());
                let ratios = a
                    .ratios
                    .clone()
                    .unwrap_or_else(|| vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2]);
                echo.s(
                    "ratios",
                    &ratios
                        .iter()
                        .map(|x| format!("{x:e}"))
                        .collect::<Vec<_>>()
                        .join(","),
                );
                if let Some(bad) = ratios
                    .iter()
                    .find(|x| !(**x > 0.0 && **x <= crate::broadening::SCALING_MAX_RATIO))
                {
                    return Err(ConfigError::new(
                        "ratios",
                        format!("{bad} outside (0, 0.01]"),
                    ));
                }
                let nu0 = echo.f("nu0", positive("nu0", a.nu0.unwrap_or(1.0))?);
                let beta = echo.f("beta", positive("beta", a.beta.unwrap_or(1.0))?);
                let smallest = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let base = patch(&a.patch, "ratios", smallest.min(1e-3), hbar, &mut echo, 1.0)?;
                (
                    "scaling",
                    Task::Scaling {
                        model,
                        ratios,
                        base,
                        nu0,
                        beta,
                    },
                )
            }
            Command::MeadCompare(a) => {
                let nu0 = echo.f("nu0", positive("nu0", a.nu0.unwrap_or(1.0))?);
                let ratio = echo.f("ratio", positive("ratio", a.ratio.unwrap_or(1e-3))?);
                let beta = echo.f("beta", positive("beta", a.beta.unwrap_or(1.0))?);
                let patch = patch(&a.patch, "ratio", ratio, hbar, &mut echo, nu0)?;
                ("mead-compare", Task::MeadCompare { patch, nu0, beta })
            }
        };

        Ok(RunConfig {
            command,
            inputs: echo.0,
            task,
            format: g.format.unwrap_or(Format::Json),
            out: g.out.clone(),
            quiet: g.quiet,
        })
    }
}

/// Known config keys (long flag names) for a subcommand, plus its switches.
fn known_keys(subcommand: &str) -> Option<(BTreeSet<String>, BTreeSet<String>)> {
    let cmd = Cli::command();
    let sub = cmd.find_subcommand(subcommand)?;
    let mut known = BTreeSet::new();
    let mut switches = BTreeSet::new();
    for arg in cmd.get_arguments().chain(sub.get_arguments()) {
        if let Some(long) = arg.get_long() {
            known.insert(long.to_string());
            if matches!(arg.get_action(), ArgAction::SetTrue) {
                switches.insert(long.to_string());
            }
        }
    }
    Some((known, switches))
}

/// Parse argv plus an optional config file into a [`RunConfig`].
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let split = config::split_args(args.clone());
    let mut argv = args;
    if let (Some(path), Some(sub)) = (&split.config_path, &split.subcommand) {
        let entries =
            config::read_config_file(std::path::Path::new(path)).map_err(ParseFailure::Config)?;
        let sub_name = sub.to_string_lossy().into_owned();
        if let Some((known, switches)) = known_keys(&sub_name) {
            let flags = config::entries_to_flags(&entries, &known, &switches)
                .map_err(ParseFailure::Config)?;
            argv = std::iter::once(split.program.clone())
                .chain(std::iter::once(sub.clone()))
                .chain(flags)
                .chain(split.leading_globals.iter().cloned())
                .chain(split.rest.iter().cloned())
                .collect();
        }
    }
    let cli = Cli::try_parse_from(argv).map_err(ParseFailure::Clap)?;
    RunConfig::from_cli(cli).map_err(ParseFailure::Config)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Config(ConfigError),
}

/// Outcome of a run before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub envelope: Json,
    pub csv: String,
    pub warnings: Vec<String>,
}

fn num_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| format_float(*v)).collect()
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Execute a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, Error> {
    let mut warnings = Vec::new();
    let (results, csv) = match &cfg.task {
        Task::BerryTwoLevel { lp, branches, opts } => {
            let mut rows = Vec::new();
            let mut phases = Vec::new();
            for b in branches {
                let res = wilson_loop_phase(lp, b.level(), opts)?;
                rows.push(vec![
                    res.level.to_string(),
                    b.label().to_string(),
                    opt_cell(res.analytic),
                    format_float(res.numerical),
                    format_float(res.unwrapped),
                    opt_cell(res.discrepancy),
                ]);
                phases.push(
                    Json::obj()
                        .int("level", res.level as i64)
                        .str("branch", b.label())
                        .field("analytic", Json::opt_num(res.analytic))
                        .num("numerical", res.numerical)
                        .num("unwrapped", res.unwrapped)
                        .field("discrepancy", Json::opt_num(res.discrepancy))
                        .num("refined", res.refined)
                        .int("points", res.points as i64)
                        .build(),
                );
            }
            let csv = output::csv_table(
                &[
                    "level",
                    "branch",
                    "analytic",
                    "numerical",
                    "unwrapped",
                    "discrepancy",
                ],
                &rows,
            );
            (Json::obj().field("phases", Json::Arr(phases)).build(), csv)
        }
        Task::BerrySu3 { lp, level, opts } => {
            let res = wilson_loop_phase(lp, *level, opts)?;
            let quadrature = if *level == 2 {
                Some(connection_integral_su3(lp, lp.points())?)
            } else {
                None
            };
            let csv = output::csv_table(
                &[
                    "level",
                    "analytic",
                    "connection_integral",
                    "numerical",
                    "unwrapped",
                    "discrepancy",
                ],
                &[vec![
                    res.level.to_string(),
                    opt_cell(res.analytic),
                    opt_cell(quadrature),
                    format_float(res.numerical),
                    format_float(res.unwrapped),
                    opt_cell(res.discrepancy),
                ]],
            );
            let json = Json::obj()
                .int("level", res.level as i64)
                .field("analytic", Json::opt_num(res.analytic))
                .field("connection_integral", Json::opt_num(quadrature))
                .num("numerical", res.numerical)
                .num("unwrapped", res.unwrapped)
                .field("discrepancy", Json::opt_num(res.discrepancy))
                .num("refined", res.refined)
                .int("points", res.points as i64)
                .build();
            (json, csv)
        }
        Task::Spectrum {
            collective,
            internal,
            m_min,
            m_max,
        } => {
            let levels = spectrum(collective, internal, *m_min..=*m_max)?;
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| {
                    let mut row = vec![l.m.to_string(), l.branch.label().to_string()];
                    row.extend(num_row(&[
                        l.gamma,
                        l.p_quantized,
                        l.energy_exact,
                        l.energy_first_order,
                    ]));
                    row
                })
                .collect();
            let csv = output::csv_table(
                &[
                    "m",
                    "branch",
                    "gamma",
                    "p_quantized",
                    "energy_exact",
                    "energy_first_order",
                ],
                &rows,
            );
            let max_residual = levels
                .iter()
                .map(|l| l.truncation_residual())
                .fold(0.0, f64::max);
            let json = Json::obj()
                .num("max_truncation_residual", max_residual)
                .field(
                    "levels",
                    Json::Arr(
                        levels
                            .iter()
                            .map(|l| {
                                Json::obj()
                                    .int("m", l.m)
                                    .str("branch", l.branch.label())
                                    .num("gamma", l.gamma)
                                    .num("p_quantized", l.p_quantized)
                                    .num("energy_exact", l.energy_exact)
                                    .num("energy_first_order", l.energy_first_order)
                                    .build()
                            })
                            .collect(),
                    ),
                )
                .build();
            (json, csv)
        }
        Task::Broaden { model, patch } => {
            let rep = match model {
                ModelArg::TwoLevel => sweep_patch(patch)?,
                ModelArg::Su3 => sweep_patch_su3(patch)?,
            };
            warnings.extend(rep.warnings.iter().cloned());
            let slope =
                collective_derivative(&patch.collective, patch.m as f64 * patch.collective.hbar());
            let coefficient =
                rep.de_berry / (patch.collective.hbar() * patch.ratio().powi(2) * slope.abs());
            let rows: Vec<Vec<String>> = rep
                .samples
                .iter()
                .map(|s| num_row(&[s.r, s.berry_shift, s.internal_shift]))
                .collect();
            let csv = output::csv_table(&["r", "berry_shift", "internal_shift"], &rows);
            let json = Json::obj()
                .num("de_berry", rep.de_berry)
                .num("de_predicted", rep.de_predicted)
                .num("relative_error", rep.relative_error)
                .num("coefficient", coefficient)
                .num("de_gap", rep.de_gap)
                .num("gap_to_berry", rep.gap_to_berry)
                .field(
                    "samples",
                    Json::Arr(
                        rep.samples
                            .iter()
                            .map(|s| {
                                Json::obj()
                                    .num("r", s.r)
                                    .num("berry_shift", s.berry_shift)
                                    .num("internal_shift", s.internal_shift)
                                    .build()
                            })
                            .collect(),
                    ),
                )
                .build();
            (json, csv)
        }
        Task::Scaling {
            model,
            ratios,
            base,
            nu0,
            beta,
        } => {
            let study = scaling_study(ratios, model.scaling(), base)?;
            let mead = mead_scaling(ratios, *nu0, *beta)?;
            let rows: Vec<Vec<String>> = study
                .points
                .iter()
                .map(|(x, y)| num_row(&[*x, *y]))
                .collect();
            let csv = output::csv_table(&["ratio", "de_berry"], &rows);
            let json = Json::obj()
                .str("which", study.model.label())
                .num("slope", study.fit.slope)
                .num("intercept", study.fit.intercept)
                .num("rms_residual", study.fit.rms_residual)
                .int("n_points", study.fit.n_points as i64)
                .num("mead_slope", mead.slope)
                .field(
                    "points",
                    Json::Arr(
                        study
                            .points
                            .iter()
                            .map(|(x, y)| Json::obj().num("ratio", *x).num("de_berry", *y).build())
                            .collect(),
                    ),
                )
                .build();
            (json, csv)
        }
        Task::MeadCompare { patch, nu0, beta } => {
            let cmp = compare_with_mead(patch, *nu0, *beta)?;
            warnings.extend(cmp.broadening.warnings.iter().cloned());
            let values = [
                cmp.mead.nu0,
                cmp.mead.l_over_rc,
                cmp.mead.beta,
                cmp.mead.bound,
                cmp.broadening.de_berry,
                cmp.broadening.de_predicted,
                cmp.geometric_spread,
                cmp.ratio,
                cmp.predicted_ratio,
            ];
            let names = [
                "nu0",
                "l_over_rc",
                "beta",
                "mead_bound",
                "de_berry",
                "de_predicted",
                "geometric_spread",
                "geometric_over_mead",
                "predicted_over_mead",
            ];
            let csv = output::csv_table(&names, &[num_row(&values)]);
            let json = Json::Obj(
                names
                    .iter()
                    .zip(values)
                    .map(|(k, v)| (k.to_string(), Json::Num(v)))
                    .collect(),
            );
            (json, csv)
        }
    };

    let envelope = Json::obj()
        .str("schema_version", SCHEMA_VERSION)
        .str("command", cfg.command)
        .field(
            "inputs",
            Json::Obj(
                cfg.inputs
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Str(v.clone())))
                    .collect(),
            ),
        )
        .field("results", results)
        .field(
            "warnings",
            Json::Arr(warnings.iter().map(|w| Json::Str(w.clone())).collect()),
        )
        .build();
    Ok(RunOutput {
        envelope,
        csv,
        warnings,
    })
}

/// Full CLI entry point; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(ParseFailure::Clap(e)) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
        Err(ParseFailure::Config(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = match execute(&cfg) {
        Ok(out) => out,
        Err(e) => {
            let _ = writeln!(stderr, "{}: {e}", e.name());
            return if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            };
        }
    };
    if !cfg.quiet {
        for w in &out.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
    }
    match output::emit(&cfg, &out, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            EXIT_CONFIG
        }
    }
}
