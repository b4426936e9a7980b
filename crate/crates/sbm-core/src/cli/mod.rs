//! Command-line front end: configuration parsing, experiment dispatch,
//! CSV/JSON/SVG output, and unit conversion.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure,
//! 3 numerical failure (convergence, degenerate, missing peaks).
//!
//! Every written output is accompanied by a `<name>.manifest.json`
//! recording the fully resolved configuration; `--config` accepts
//! either a configuration document or such a manifest, so any run can
//! be reproduced bit-for-bit from its manifest (modulo the duration
//! field).

pub mod csvio;
pub mod svg;
pub mod units;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Result, SbmError};
use crate::evolve::TimeSeries;
use crate::experiments::{
    self, amplitude_grid, AuditMode, ResonanceScan, RisetimeScan, ScanOptions,
};
use crate::model::{
    ConfigDocument, DriveKind, DriveSection, InitialState, ModelParams, ModelSection,
    NumericsConfig, NumericsSection, DEFAULT_T_END,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Map an error to the CLI exit-code contract.
fn exit_code(err: &SbmError) -> i32 {
    match err {
        SbmError::Config(_) | SbmError::Io(_) => 1,
        SbmError::InvalidParams(_)
        | SbmError::UnsupportedRegime(_)
        | SbmError::RangeExceeded(_)
        | SbmError::NoOscillation(_)
        | SbmError::DomainExceeded(_)
        | SbmError::InconsistentMeasurement(_) => 2,
        SbmError::Numerical(_)
        | SbmError::TruncationInadequate(_)
        | SbmError::DimMismatch { .. }
        | SbmError::NotHermitian
        | SbmError::ExperimentFailed(_) => 3,
    }
}

#[derive(Parser)]
#[command(
    name = "sbm",
    version,
    about = "Driven spin-boson model: exact propagation, resonance scans, coupling estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-resolved observables for one parameter set.
    Dynamics(DynamicsArgs),
    /// Long-time mean of sigma_z over a drive-amplitude grid.
    ScanAmplitude(ScanAmplitudeArgs),
    /// Resonant-peak magnitude against the drive rise time.
    ScanRisetime(ScanRisetimeArgs),
    /// Recover the coupling from two resonance peaks (roundtrip).
    EstimateG(EstimateArgs),
    /// Predicted resonance positions and peak means.
    ResonanceTable(TableArgs),
    /// Physical-unit conversions for a platform frequency.
    ConvertUnits(UnitsArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON configuration document or a run manifest; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output basename: writes <out>.csv and <out>.manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write <out>.svg.
    #[arg(long)]
    svg: bool,
    /// Worker threads for scans (default: all cores, env SBM_JOBS).
    #[arg(long)]
    jobs: Option<usize>,
    /// Root RNG seed (env SBM_SEED; flag wins).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct ModelFlags {
    /// Atom-photon coupling in units of omega.
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Atomic resonant frequency in units of omega.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    drive: Option<DriveKindArg>,
    /// Nominal drive amplitude in units of omega.
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    /// Linear switch-on time Tc (0 = instantaneous).
    #[arg(long, allow_negative_numbers = true)]
    rise_time: Option<f64>,
    /// Fock truncation (default: picked from the parameters).
    #[arg(long)]
    n_max: Option<usize>,
    /// Propagation/sampling step in units of 1/omega.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Final time in units of 1/omega.
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Keep one sample every this many steps.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DriveKindArg {
    Photon,
    Atom,
    None,
}

impl From<DriveKindArg> for DriveKind {
    fn from(value: DriveKindArg) -> Self {
        match value {
            DriveKindArg::Photon => DriveKind::Photon,
            DriveKindArg::Atom => DriveKind::Atom,
            DriveKindArg::None => DriveKind::None,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InitialArg {
    Polaron,
    Ground,
    Random,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AuditArg {
    Off,
    Corners,
}

#[derive(Args, Clone)]
struct DynamicsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    /// Highest Fock level populated by the random initial state.
    #[arg(long)]
    random_n_cut: Option<usize>,
}

#[derive(Args, Clone)]
struct ScanAmplitudeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    /// Averaging horizon T_L (default 50π).
    #[arg(long, allow_negative_numbers = true)]
    t_long: Option<f64>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long)]
    random_n_cut: Option<usize>,
    /// Relative peak threshold (fraction of max |M|).
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    /// Absolute peak floor.
    #[arg(long, allow_negative_numbers = true)]
    peak_floor: Option<f64>,
    #[arg(long, value_enum)]
    audit: Option<AuditArg>,
}

#[derive(Args, Clone)]
struct ScanRisetimeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelFlags,
    /// Resonance indices, e.g. --m 1,2,3.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u32>>,
    /// Rise-time grid, e.g. --tc 0,5,10,20,50.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    tc: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    t_long: Option<f64>,
}

#[derive(Args, Clone)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelFlags,
    /// Lower resonance index.
    #[arg(long)]
    m: Option<u32>,
    /// Index offset to the second resonance.
    #[arg(long)]
    i: Option<u32>,
    /// Half-width of each scan window, in grid steps.
    #[arg(long)]
    half_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_long: Option<f64>,
}

#[derive(Args, Clone)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long)]
    m_max: Option<u32>,
}

#[derive(Args, Clone)]
struct UnitsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Photon frequency f in GHz (omega = 2π·f).
    #[arg(long, allow_negative_numbers = true)]
    omega_ghz: Option<f64>,
    /// Coupling in GHz (same 2π convention).
    #[arg(long, allow_negative_numbers = true)]
    g_ghz: Option<f64>,
    /// Photon loss rate in MHz (same 2π convention).
    #[arg(long, allow_negative_numbers = true)]
    kappa_mhz: Option<f64>,
    /// Fill the platform numbers of the flux-qubit preset.
    #[arg(long)]
    preset: Option<PresetArg>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    FluxQubit,
}

/// Record of a run: resolved configuration plus subcommand options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: ConfigDocument,
    pub run: serde_json::Value,
    pub root_seed: u64,
    pub artifact_version: String,
    pub outputs: Vec<String>,
    pub duration_ms: u64,
}

/// Entry point; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let common = match &cli.command {
        Command::Dynamics(args) => args.common.clone(),
        Command::ScanAmplitude(args) => args.common.clone(),
        Command::ScanRisetime(args) => args.common.clone(),
        Command::EstimateG(args) => args.common.clone(),
        Command::ResonanceTable(args) => args.common.clone(),
        Command::ConvertUnits(args) => args.common.clone(),
    };
    configure_workers(&common);
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Dynamics(args) => run_dynamics(args, started),
        Command::ScanAmplitude(args) => run_scan_amplitude(args, started),
        Command::ScanRisetime(args) => run_scan_risetime(args, started),
        Command::EstimateG(args) => run_estimate(args, started),
        Command::ResonanceTable(args) => run_table(args, started),
        Command::ConvertUnits(args) => run_units(args, started),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn configure_workers(common: &CommonArgs) {
    let jobs = common
        .jobs
        .or_else(|| std::env::var("SBM_JOBS").ok().and_then(|v| v.parse().ok()));
    if let Some(jobs) = jobs {
        // The global pool can only be set once per process; later calls
        // keep the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
}

fn root_seed(common: &CommonArgs) -> u64 {
    common
        .seed
        .or_else(|| std::env::var("SBM_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

/// Load `--config` as either a manifest (returning its embedded config
/// and run options when the subcommand matches) or a bare document.
fn load_config(
    path: Option<&Path>,
    subcommand: &str,
) -> Result<(Option<ConfigDocument>, Option<serde_json::Value>)> {
    let Some(path) = path else {
        return Ok((None, None));
    };
    let text = std::fs::read_to_string(path)?;
    if let Ok(manifest) = serde_json::from_str::<RunManifest>(&text) {
        if manifest.subcommand != subcommand {
            return Err(SbmError::Config(format!(
                "manifest records subcommand {:?}, not {subcommand:?}",
                manifest.subcommand
            )));
        }
        return Ok((Some(manifest.config), Some(manifest.run)));
    }
    Ok((Some(ConfigDocument::parse(&text)?), None))
}

/// Merge the flag layer over a base document, producing the resolved
/// parameter and numerics structs plus the fully explicit document.
fn resolve_model(
    base: Option<ConfigDocument>,
    flags: &ModelFlags,
    default_kind: DriveKind,
    require_g: bool,
) -> Result<(ModelParams, NumericsConfig, ConfigDocument)> {
    let mut document = base.unwrap_or(ConfigDocument {
        model: ModelSection { omega: None, epsilon: 0.0, g: f64::NAN },
        drive: DriveSection { kind: default_kind, amplitude: 0.0, rise_time: None },
        numerics: NumericsSection::default(),
        physical: None,
    });
    if let Some(g) = flags.g {
        document.model.g = g;
    }
    if document.model.g.is_nan() {
        if require_g {
            return Err(SbmError::Config(
                "--g (or a config file providing it) is required".into(),
            ));
        }
        document.model.g = 0.0;
    }
    if let Some(epsilon) = flags.epsilon {
        document.model.epsilon = epsilon;
    }
    if let Some(kind) = flags.drive {
        document.drive.kind = kind.into();
    }
    if let Some(amplitude) = flags.amplitude {
        document.drive.amplitude = amplitude;
    }
    if let Some(rise_time) = flags.rise_time {
        document.drive.rise_time = Some(rise_time);
    }
    if let Some(n_max) = flags.n_max {
        document.numerics.n_max = Some(n_max);
    }
    if let Some(dt) = flags.dt {
        document.numerics.dt = Some(dt);
    }
    if let Some(t_end) = flags.t_end {
        document.numerics.t_end = Some(t_end);
    }
    if let Some(stride) = flags.stride {
        document.numerics.sample_stride = Some(stride);
    }
    let (params, cfg) = document.resolve()?;
    let resolved = ConfigDocument::from_resolved(&params, &cfg);
    Ok((params, cfg, resolved))
}

fn initial_state(arg: Option<InitialArg>, seed: u64, n_cut: Option<usize>) -> InitialState {
    match arg.unwrap_or(InitialArg::Polaron) {
        InitialArg::Polaron => InitialState::Polaron,
        InitialArg::Ground => InitialState::Ground,
        InitialArg::Random => InitialState::Random { seed, n_cut: n_cut.unwrap_or(5) },
    }
}

fn write_outputs(
    common: &CommonArgs,
    mut manifest: RunManifest,
    csv: Option<String>,
    svg_content: Option<String>,
    started: Instant,
) -> Result<()> {
    let Some(base) = &common.out else {
        return Ok(());
    };
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let with_ext = |ext: &str| -> PathBuf {
        let mut path = base.clone().into_os_string();
        path.push(ext);
        PathBuf::from(path)
    };
    let mut outputs = Vec::new();
    if let Some(csv) = csv {
        let path = with_ext(".csv");
        std::fs::write(&path, csv)?;
        outputs.push(path.display().to_string());
    }
    if common.svg {
        if let Some(svg_content) = svg_content {
            let path = with_ext(".svg");
            std::fs::write(&path, svg_content)?;
            outputs.push(path.display().to_string());
        }
    }
    let manifest_path = with_ext(".manifest.json");
    outputs.push(manifest_path.display().to_string());
    manifest.outputs = outputs;
    manifest.duration_ms = started.elapsed().as_millis() as u64;
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| SbmError::Config(e.to_string()))?;
    std::fs::write(&manifest_path, text)?;
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn manifest_skeleton(
    subcommand: &str,
    config: ConfigDocument,
    run: serde_json::Value,
    seed: u64,
) -> RunManifest {
    RunManifest {
        subcommand: subcommand.to_string(),
        config,
        run,
        root_seed: seed,
        artifact_version: VERSION.to_string(),
        outputs: Vec::new(),
        duration_ms: 0,
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| SbmError::Config(e.to_string()))
}

fn from_json<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value)
        .map_err(|e| SbmError::Config(format!("bad manifest run options: {e}")))
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DynamicsRun {
    initial: InitialState,
}

fn run_dynamics(args: DynamicsArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "dynamics")?;
    let (params, cfg, resolved) = resolve_model(base_config, &args.model, DriveKind::Photon, true)?;
    let initial = match (args.initial, base_run) {
        (None, Some(run)) => from_json::<DynamicsRun>(run)?.initial,
        (arg, _) => initial_state(arg, seed, args.random_n_cut),
    };
    let series = experiments::dynamics_experiment(&params, &cfg, initial)?;
    let mean = crate::evolve::mean_over_time(&series, cfg.t_end)?;
    println!(
        "dynamics: {} samples over t ∈ [0, {:.6}], mean sigma_z = {:.6}",
        series.len(),
        cfg.t_end,
        mean
    );
    println!(
        "          sigma_z(0) = {:.6}, final = {:.6}, max norm drift = {:.2e}",
        series.sigma_z[0],
        series.sigma_z.last().unwrap(),
        series.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    );
    let manifest =
        manifest_skeleton("dynamics", resolved, to_json(&DynamicsRun { initial })?, seed);
    let svg_content = args.common.svg.then(|| plot_series(&series));
    write_outputs(
        &args.common,
        manifest,
        Some(csvio::write_time_series(&series)?),
        svg_content,
        started,
    )
}

fn plot_series(series: &TimeSeries) -> String {
    let curves = [
        svg::Curve { label: "sigma_z", color: svg::PALETTE[0], x: &series.t, y: &series.sigma_z },
        svg::Curve { label: "sigma_x", color: svg::PALETTE[1], x: &series.t, y: &series.sigma_x },
    ];
    svg::line_plot("driven spin-boson dynamics", "t [1/omega]", "expectation", &curves)
}

// ---------------------------------------------------------------------------
// scan-amplitude
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScanRun {
    min: f64,
    max: f64,
    step: f64,
    t_long: f64,
    initial: InitialState,
    threshold: f64,
    peak_floor: f64,
    audit: AuditArg,
    dt: f64,
    stride: usize,
    n_max: Option<usize>,
}

fn run_scan_amplitude(args: ScanAmplitudeArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "scan-amplitude")?;
    let (params, _cfg, resolved) =
        resolve_model(base_config, &args.model, DriveKind::Photon, true)?;
    let base: Option<ScanRun> = base_run.map(from_json).transpose()?;
    let defaults = ScanOptions::default();
    let run = ScanRun {
        min: args.min.or(base.as_ref().map(|b| b.min)).unwrap_or(0.0),
        max: args.max.or(base.as_ref().map(|b| b.max)).unwrap_or(4.0),
        step: args.step.or(base.as_ref().map(|b| b.step)).unwrap_or(0.01),
        t_long: args.t_long.or(base.as_ref().map(|b| b.t_long)).unwrap_or(DEFAULT_T_END),
        initial: match args.initial {
            Some(arg) => initial_state(Some(arg), seed, args.random_n_cut),
            None => base.as_ref().map(|b| b.initial).unwrap_or(InitialState::Polaron),
        },
        threshold: args
            .threshold
            .or(base.as_ref().map(|b| b.threshold))
            .unwrap_or(defaults.threshold),
        peak_floor: args
            .peak_floor
            .or(base.as_ref().map(|b| b.peak_floor))
            .unwrap_or(defaults.peak_floor),
        audit: args.audit.or(base.as_ref().map(|b| b.audit)).unwrap_or(AuditArg::Corners),
        dt: args.model.dt.or(base.as_ref().map(|b| b.dt)).unwrap_or(defaults.dt),
        stride: args.model.stride.or(base.as_ref().map(|b| b.stride)).unwrap_or(1),
        n_max: args.model.n_max.or(base.as_ref().and_then(|b| b.n_max)),
    };
    let options = ScanOptions {
        threshold: run.threshold,
        peak_floor: run.peak_floor,
        audit: match run.audit {
            AuditArg::Off => AuditMode::Off,
            AuditArg::Corners => AuditMode::Corners,
        },
        dt: run.dt,
        sample_stride: run.stride,
        n_max: run.n_max,
    };
    let grid = amplitude_grid(run.min, run.max, run.step);
    let scan = experiments::amplitude_scan(&params, &grid, run.t_long, run.initial, &options)?;
    print_scan_summary(&scan);
    let manifest = manifest_skeleton("scan-amplitude", resolved, to_json(&run)?, seed);
    let svg_content = args.common.svg.then(|| plot_scan(&scan));
    write_outputs(
        &args.common,
        manifest,
        Some(csvio::write_resonance_scan(&scan)?),
        svg_content,
        started,
    )?;
    if scan.degraded {
        return Err(SbmError::Numerical(format!(
            "scan degraded: convergence audit failed at grid indices {:?}",
            scan.failed_points
        )));
    }
    Ok(())
}

fn print_scan_summary(scan: &ResonanceScan) {
    println!(
        "scan-amplitude: {} points on [{}, {}], T_L = {:.6}",
        scan.grid.len(),
        scan.grid.first().unwrap(),
        scan.grid.last().unwrap(),
        scan.t_long
    );
    if scan.peaks.is_empty() {
        println!("  no peaks above threshold");
    }
    for peak in &scan.peaks {
        println!(
            "  peak: amplitude = {:.4}, M = {:+.5}, inferred m = {}",
            peak.position, peak.mean, peak.m
        );
    }
    if scan.degraded {
        println!("  WARNING: convergence audit failed at indices {:?}", scan.failed_points);
    }
}

fn plot_scan(scan: &ResonanceScan) -> String {
    let curves = [svg::Curve {
        label: "mean sigma_z",
        color: svg::PALETTE[0],
        x: &scan.grid,
        y: &scan.means,
    }];
    svg::line_plot("long-time mean vs drive amplitude", "drive amplitude [omega]", "M", &curves)
}

// ---------------------------------------------------------------------------
// scan-risetime
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RisetimeRun {
    m_list: Vec<u32>,
    tc_grid: Vec<f64>,
    t_long: f64,
    dt: f64,
    stride: usize,
    n_max: Option<usize>,
}

fn run_scan_risetime(args: ScanRisetimeArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "scan-risetime")?;
    let (params, _cfg, resolved) =
        resolve_model(base_config, &args.model, DriveKind::Photon, true)?;
    let base: Option<RisetimeRun> = base_run.map(from_json).transpose()?;
    let run = RisetimeRun {
        m_list: args.m.or(base.as_ref().map(|b| b.m_list.clone())).unwrap_or_else(|| vec![1, 2, 3]),
        tc_grid: args
            .tc
            .or(base.as_ref().map(|b| b.tc_grid.clone()))
            .unwrap_or_else(|| vec![0.0, 5.0, 10.0, 20.0, 50.0]),
        t_long: args.t_long.or(base.as_ref().map(|b| b.t_long)).unwrap_or(DEFAULT_T_END),
        dt: args.model.dt.or(base.as_ref().map(|b| b.dt)).unwrap_or(1e-3),
        stride: args.model.stride.or(base.as_ref().map(|b| b.stride)).unwrap_or(1),
        n_max: args.model.n_max.or(base.as_ref().and_then(|b| b.n_max)),
    };
    let options = ScanOptions {
        dt: run.dt,
        sample_stride: run.stride,
        n_max: run.n_max,
        audit: AuditMode::Off,
        ..ScanOptions::default()
    };
    let scan =
        experiments::risetime_scan(&params, &run.m_list, &run.tc_grid, run.t_long, &options)?;
    println!("scan-risetime: T_L = {:.6}, Tc grid {:?}", scan.t_long, scan.tc_grid);
    for (k, &m) in scan.m_list.iter().enumerate() {
        let row: Vec<String> = scan.magnitudes[k].iter().map(|v| format!("{v:.5}")).collect();
        println!("  m = {m}: |M| = [{}]", row.join(", "));
    }
    let manifest = manifest_skeleton("scan-risetime", resolved, to_json(&run)?, seed);
    let svg_content = args.common.svg.then(|| plot_risetime(&scan));
    write_outputs(
        &args.common,
        manifest,
        Some(csvio::write_risetime_scan(&scan)?),
        svg_content,
        started,
    )
}

fn plot_risetime(scan: &RisetimeScan) -> String {
    let labels: Vec<String> = scan.m_list.iter().map(|m| format!("m = {m}")).collect();
    let curves: Vec<svg::Curve> = scan
        .magnitudes
        .iter()
        .enumerate()
        .map(|(k, row)| svg::Curve {
            label: &labels[k],
            color: svg::PALETTE[k % svg::PALETTE.len()],
            x: &scan.tc_grid,
            y: row,
        })
        .collect();
    svg::line_plot("resonant peak vs rise time", "Tc [1/omega]", "|M|", &curves)
}

// ---------------------------------------------------------------------------
// estimate-g
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EstimateRun {
    m: u32,
    i: u32,
    half_steps: usize,
    step: f64,
    t_long: f64,
    dt: f64,
    stride: usize,
}

fn run_estimate(args: EstimateArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "estimate-g")?;
    let (params, _cfg, resolved) =
        resolve_model(base_config, &args.model, DriveKind::Photon, true)?;
    let base: Option<EstimateRun> = base_run.map(from_json).transpose()?;
    let run = EstimateRun {
        m: args.m.or(base.as_ref().map(|b| b.m)).unwrap_or(1),
        i: args.i.or(base.as_ref().map(|b| b.i)).unwrap_or(1),
        half_steps: args.half_steps.or(base.as_ref().map(|b| b.half_steps)).unwrap_or(5),
        step: args.step.or(base.as_ref().map(|b| b.step)).unwrap_or(0.01),
        t_long: args.t_long.or(base.as_ref().map(|b| b.t_long)).unwrap_or(DEFAULT_T_END),
        dt: args.model.dt.or(base.as_ref().map(|b| b.dt)).unwrap_or(1e-3),
        stride: args.model.stride.or(base.as_ref().map(|b| b.stride)).unwrap_or(1),
    };
    let options = ScanOptions {
        dt: run.dt,
        sample_stride: run.stride,
        audit: AuditMode::Off,
        ..ScanOptions::default()
    };
    let mut grid =
        experiments::resonance_window_grid(params.g, params.omega, run.m, run.half_steps, run.step);
    grid.extend(experiments::resonance_window_grid(
        params.g,
        params.omega,
        run.m + run.i,
        run.half_steps,
        run.step,
    ));
    grid.retain(|&a| a >= 0.0);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let estimate = experiments::coupling_estimation_experiment(
        &params, run.m, run.i, &grid, run.t_long, &options,
    )?;
    println!(
        "estimate-g: peaks m = {} (M = {:+.5}) and m = {} (M = {:+.5})",
        estimate.m,
        estimate.mean_low,
        estimate.m + estimate.i,
        estimate.mean_high
    );
    println!(
        "            g_true = {:.6}, g_estimated = {:.6}, relative error = {:.3e}",
        estimate.g_true, estimate.g_estimated, estimate.relative_error
    );
    let manifest = manifest_skeleton("estimate-g", resolved, to_json(&run)?, seed);
    // The estimate rides along as extra metadata on the window-scan CSV.
    let scan =
        experiments::amplitude_scan(&params, &grid, run.t_long, InitialState::Polaron, &options)?;
    let mut csv = format!(
        "# estimate={}\n",
        serde_json::to_string(&estimate).map_err(|e| SbmError::Config(e.to_string()))?
    );
    csv.push_str(&csvio::write_resonance_scan(&scan)?);
    write_outputs(&args.common, manifest, Some(csv), None, started)
}

// ---------------------------------------------------------------------------
// resonance-table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableRun {
    g: f64,
    m_max: u32,
}

fn run_table(args: TableArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "resonance-table")?;
    let base: Option<TableRun> = base_run.map(from_json).transpose()?;
    let g = args
        .g
        .or(base.as_ref().map(|b| b.g))
        .or(base_config.as_ref().map(|c| c.model.g))
        .ok_or_else(|| SbmError::Config("--g is required".into()))?;
    let m_max = args.m_max.or(base.as_ref().map(|b| b.m_max)).unwrap_or(4);
    if m_max > analytic::bessel::MAX_ORDER {
        return Err(SbmError::DomainExceeded(format!(
            "m_max {m_max} exceeds supported order {}",
            analytic::bessel::MAX_ORDER
        )));
    }
    let positions = analytic::resonance_positions(g, 1.0, m_max);
    if positions.is_empty() {
        println!("resonance-table: g = {g} has no resonances");
    } else {
        println!("resonance-table: g = {g}");
        println!("  {:>3} {:>12} {:>14}", "m", "amplitude", "predicted M");
    }
    let prefactor = (-2.0 * g * g).exp();
    let mut rows = String::from("m,amplitude,predicted_mean\n");
    for (idx, &position) in positions.iter().enumerate() {
        let m = idx as u32 + 1;
        let mean = -prefactor * analytic::bessel_j(m, m as f64)?;
        println!("  {m:>3} {position:>12.4} {mean:>+14.5}");
        rows.push_str(&format!("{m},{position},{mean}\n"));
    }
    let config = ConfigDocument {
        model: ModelSection { omega: Some(1.0), epsilon: 0.0, g },
        drive: DriveSection { kind: DriveKind::Photon, amplitude: 0.0, rise_time: Some(0.0) },
        numerics: NumericsSection::default(),
        physical: None,
    };
    let manifest =
        manifest_skeleton("resonance-table", config, to_json(&TableRun { g, m_max })?, seed);
    let mut csv = format!("# artifact=sbm v{VERSION}\n# record=resonance-table\n");
    csv.push_str(&rows);
    write_outputs(&args.common, manifest, Some(csv), None, started)
}

// ---------------------------------------------------------------------------
// convert-units
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UnitsRun {
    omega_ghz: f64,
    g_ghz: Option<f64>,
    kappa_mhz: Option<f64>,
}

fn run_units(args: UnitsArgs, started: Instant) -> Result<()> {
    let seed = root_seed(&args.common);
    let (base_config, base_run) = load_config(args.common.config.as_deref(), "convert-units")?;
    let base: Option<UnitsRun> = base_run.map(from_json).transpose()?;
    let preset = args.preset.map(|PresetArg::FluxQubit| UnitsRun {
        omega_ghz: units::FLUX_QUBIT_OMEGA_GHZ,
        g_ghz: Some(units::FLUX_QUBIT_G_GHZ),
        kappa_mhz: Some(units::FLUX_QUBIT_KAPPA_MHZ),
    });
    let from_physical =
        base_config.as_ref().and_then(|c| c.physical.as_ref()).map(|p| p.omega_ghz);
    let layered = preset.or(base);
    let omega_ghz = args
        .omega_ghz
        .or(layered.as_ref().map(|l| l.omega_ghz))
        .or(from_physical)
        .ok_or_else(|| {
            SbmError::Config("--omega-ghz (or --preset flux-qubit) is required".into())
        })?;
    let run = UnitsRun {
        omega_ghz,
        g_ghz: args.g_ghz.or(layered.as_ref().and_then(|l| l.g_ghz)),
        kappa_mhz: args.kappa_mhz.or(layered.as_ref().and_then(|l| l.kappa_mhz)),
    };
    let report = units::convert_units(run.omega_ghz, run.g_ghz, run.kappa_mhz)?;
    print!("{}", report.render());
    let config = base_config.unwrap_or(ConfigDocument {
        model: ModelSection { omega: Some(1.0), epsilon: 0.0, g: 0.0 },
        drive: DriveSection { kind: DriveKind::None, amplitude: 0.0, rise_time: Some(0.0) },
        numerics: NumericsSection::default(),
        physical: None,
    });
    let manifest = manifest_skeleton("convert-units", config, to_json(&run)?, seed);
    let mut csv = format!("# artifact=sbm v{VERSION}\n# record=unit-report\nkey,value\n");
    csv.push_str(&format!("t_long_ns,{}\n", report.t_long_ns));
    if let Some(t_d) = report.t_decoherence_ns {
        csv.push_str(&format!("t_decoherence_ns,{t_d}\n"));
    }
    if let Some(ratio) = report.g_ratio {
        csv.push_str(&format!("g_ratio,{ratio}\n"));
    }
    write_outputs(&args.common, manifest, Some(csv), None, started)
}
