//! Command-line front end: fit transition kernels, evaluate frames, detect
//! transitions and counters, build team profiles and generate synthetic
//! leagues.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pitchvalue::analytics::{counter_comparison, transition_profiles, EvalContext};
use pitchvalue::config::RunConfig;
use pitchvalue::evaluator::{Evaluator, ScalarMode, SurfaceKind, ValueSurface};
use pitchvalue::export::{surface_to_csv, surface_to_ppm};
use pitchvalue::geometry::{AreaPartition, AttackDir, N_AREAS};
use pitchvalue::pipeline::detect::{
    detect_counters, detect_transitions, filter_deep_transitions, CounterMode, DistanceMetric,
    TransitionEvent,
};
use pitchvalue::pipeline::events::{extract_pass_samples, load_events};
use pitchvalue::pipeline::synth::{generate_synthetic, GeneratorSpec};
use pitchvalue::pipeline::tracking::{load_tracking, snapshot_from_frame, TrackingFrame};
use pitchvalue::transition::{fit_transition_kernel, KernelModel};
use pitchvalue::Error;

#[derive(Parser)]
#[command(name = "pitchvalue", version, about = "Pitch-wide space evaluation for soccer data")]
struct Cli {
    /// Config file; falls back to $PITCHVALUE_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override any config key, e.g. --set ppcf.lambda=3.9 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the per-area transition kernel model from pass events.
    FitKernel(FitKernelArgs),
    /// Evaluate one tracking frame into a value surface.
    EvalFrame(EvalFrameArgs),
    /// Detect possession transitions and filter them by goal distance.
    Detect(DetectArgs),
    /// Compare successful and failed counter-attacks.
    AnalyzeCounters(AnalyzeCountersArgs),
    /// Per-team transition profiles, optionally correlated with covariates.
    TeamProfiles(TeamProfilesArgs),
    /// Generate a synthetic league.
    Synth(SynthArgs),
}

#[derive(Args)]
struct FitKernelArgs {
    #[arg(long)]
    events: PathBuf,
    /// Skip the centerline mirroring of pass data.
    #[arg(long)]
    no_mirror: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalFrameArgs {
    #[arg(long)]
    tracking: PathBuf,
    /// Frame id to evaluate.
    #[arg(long)]
    frame: u64,
    /// Kernel model file (required for the kernel transition source).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Surface kind: obpv or obso.
    #[arg(long, default_value = "obpv")]
    mode: String,
    /// Attacking team id; defaults to the team nearest the ball.
    #[arg(long)]
    attacking: Option<String>,
    /// Attack direction of the attacking team: +x or -x.
    #[arg(long, default_value = "+x")]
    direction: String,
    /// Write the surface as CSV.
    #[arg(long)]
    heatmap: Option<PathBuf>,
    /// Write the surface as a P3 pixmap.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Fixed color-scale maximum for the pixmap.
    #[arg(long)]
    image_max: Option<f64>,
    /// Write a JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    events: PathBuf,
    /// Goal-distance filter radius in meters.
    #[arg(long)]
    radius: Option<f64>,
    /// Distance metric: euclidean or x_only.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeCountersArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    tracking: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Detection mode: label or rule.
    #[arg(long)]
    counter_mode: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TeamProfilesArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    tracking: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// CSV table `team_id,value` joined against team means.
    #[arg(long)]
    covariates: Option<PathBuf>,
    /// Comma-separated team ids excluded from the correlation.
    #[arg(long)]
    exclude: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let mut config = match RunConfig::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("config error: {err}");
            return ExitCode::from(1);
        }
    };
    if let Err(err) = config.apply_overrides(&cli.overrides) {
        eprintln!("config error: {err}");
        return ExitCode::from(1);
    }
    match run(cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Data(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

enum RunError {
    Usage(String),
    Data(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

/// Report envelope shared by all JSON outputs.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    timestamp_unix: u64,
    command: &'a str,
    config: &'a BTreeMap<String, String>,
    #[serde(flatten)]
    payload: T,
}

fn write_report<T: Serialize>(
    path: &Path,
    command: &str,
    config: &RunConfig,
    payload: T,
) -> Result<(), RunError> {
    let report = Report {
        tool: "pitchvalue",
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        command,
        config: config.echo(),
        payload,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| RunError::Data(Error::InvalidFormat(format!("report encode: {e}"))))?;
    std::fs::write(path, json + "\n").map_err(|e| RunError::Data(Error::Io(e)))?;
    Ok(())
}

fn build_evaluator(config: &RunConfig, model: Option<KernelModel>) -> Result<Evaluator, RunError> {
    let pitch = config.pitch()?;
    let grid = config.grid(&pitch)?;
    let eval_cfg = config.evaluation(&grid)?;
    Ok(Evaluator::new(pitch, grid, eval_cfg, model)?)
}

fn load_model(path: &Option<PathBuf>) -> Result<Option<KernelModel>, RunError> {
    match path {
        Some(p) => Ok(Some(KernelModel::load(p)?)),
        None => Ok(None),
    }
}

fn run(command: Command, config: &RunConfig) -> Result<(), RunError> {
    match command {
        Command::FitKernel(args) => {
            let log = load_events(&args.events)?;
            let samples = extract_pass_samples(&log);
            let mut opts = config.fit_options()?;
            if args.no_mirror {
                opts.mirror = false;
            }
            let pitch = config.pitch()?;
            let part = AreaPartition::new();
            let model = fit_transition_kernel(&samples, &part, &pitch, opts)?;
            model.save(&args.out)?;
            let fitted = (1..=N_AREAS).filter(|a| model.is_fitted(*a)).count();
            println!(
                "fitted kernel model from {} passes ({fitted} of {N_AREAS} areas, {} malformed lines) -> {}",
                samples.len(),
                log.malformed,
                args.out.display()
            );
            Ok(())
        }
        Command::EvalFrame(args) => run_eval_frame(args, config),
        Command::Detect(args) => {
            let log = load_events(&args.events)?;
            let pitch = config.pitch()?;
            let radius = args.radius.map_or_else(|| config.transition_radius(), Ok)?;
            let metric = match args.metric.as_deref() {
                None => config.distance_metric()?,
                Some("euclidean") => DistanceMetric::Euclidean,
                Some("x_only") => DistanceMetric::XOnly,
                Some(other) => return Err(usage(format!("unknown metric {other:?}"))),
            };
            let all = detect_transitions(&log.events);
            let kept = filter_deep_transitions(&all, radius, metric, &pitch);
            #[derive(Serialize)]
            struct DetectPayload {
                radius: f64,
                detected: usize,
                kept: usize,
                transitions: Vec<TransitionEvent>,
            }
            write_report(
                &args.out,
                "detect",
                config,
                DetectPayload {
                    radius,
                    detected: all.len(),
                    kept: kept.len(),
                    transitions: kept,
                },
            )?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
        Command::AnalyzeCounters(args) => {
            let log = load_events(&args.events)?;
            let frames = load_tracking(&args.tracking)?;
            let mode = match args.counter_mode.as_deref() {
                None => match config.echo()["counter.mode"].as_str() {
                    "label" => CounterMode::Label,
                    "rule" => CounterMode::Rule,
                    other => return Err(usage(format!("unknown counter.mode {other:?}"))),
                },
                Some("label") => CounterMode::Label,
                Some("rule") => CounterMode::Rule,
                Some(other) => return Err(usage(format!("unknown counter mode {other:?}"))),
            };
            let pitch = config.pitch()?;
            let counters = detect_counters(&log.events, mode, &config.counter_rule()?, &pitch)?;
            let evaluator = build_evaluator(config, load_model(&args.model)?)?;
            let ctx = EvalContext {
                evaluator: &evaluator,
                frames: &frames,
                sync: config.sync()?,
            };
            let report = counter_comparison(&counters, &ctx)?;
            #[derive(Serialize)]
            struct CountersPayload {
                counter_mode: &'static str,
                scalar_mode: ScalarMode,
                transition_norm: pitchvalue::transition::Normalization,
                detected: usize,
                #[serde(flatten)]
                report: pitchvalue::analytics::CounterReport,
            }
            write_report(
                &args.out,
                "analyze-counters",
                config,
                CountersPayload {
                    counter_mode: match mode {
                        CounterMode::Label => "label",
                        CounterMode::Rule => "rule",
                    },
                    scalar_mode: config.scalar_mode()?,
                    transition_norm: evaluator.config().obpv_norm(),
                    detected: counters.len(),
                    report,
                },
            )?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
        Command::TeamProfiles(args) => {
            let log = load_events(&args.events)?;
            let frames = load_tracking(&args.tracking)?;
            let pitch = config.pitch()?;
            let all = detect_transitions(&log.events);
            let deep = filter_deep_transitions(
                &all,
                config.transition_radius()?,
                config.distance_metric()?,
                &pitch,
            );
            let covariates = match &args.covariates {
                Some(path) => Some(load_covariates(path)?),
                None => None,
            };
            let exclude: Vec<String> = args
                .exclude
                .as_deref()
                .map(|s| {
                    s.split(',')
                        .map(|t| t.trim().to_string())
                        .filter(|t| !t.is_empty())
                        .collect()
                })
                .unwrap_or_default();
            let evaluator = build_evaluator(config, load_model(&args.model)?)?;
            let ctx = EvalContext {
                evaluator: &evaluator,
                frames: &frames,
                sync: config.sync()?,
            };
            let report = transition_profiles(&deep, &ctx, covariates.as_ref(), &exclude)?;
            #[derive(Serialize)]
            struct ProfilesPayload {
                detected: usize,
                kept: usize,
                #[serde(flatten)]
                report: pitchvalue::analytics::ProfilesReport,
            }
            write_report(
                &args.out,
                "team-profiles",
                config,
                ProfilesPayload {
                    detected: all.len(),
                    kept: deep.len(),
                    report,
                },
            )?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
        Command::Synth(args) => {
            let spec = GeneratorSpec::from_json(&args.spec)?;
            let out = generate_synthetic(&spec, args.seed, &args.out)?;
            println!(
                "wrote {}, {}, {}",
                out.events_path.display(),
                out.tracking_path.display(),
                out.ground_truth_path.display()
            );
            Ok(())
        }
    }
}

fn run_eval_frame(args: EvalFrameArgs, config: &RunConfig) -> Result<(), RunError> {
    let frames = load_tracking(&args.tracking)?;
    let frame = frames
        .iter()
        .find(|f| f.frame_id == args.frame)
        .ok_or_else(|| {
            RunError::Data(Error::InvalidArgument(format!(
                "frame {} not in tracking file",
                args.frame
            )))
        })?;
    let attacking = match &args.attacking {
        Some(team) => team.clone(),
        None => nearest_team_to_ball(frame).ok_or_else(|| {
            RunError::Data(Error::InvalidArgument("frame has no players".into()))
        })?,
    };
    let dir = match args.direction.as_str() {
        "+x" => AttackDir::PlusX,
        "-x" => AttackDir::MinusX,
        other => return Err(usage(format!("direction must be +x or -x, got {other:?}"))),
    };
    let snapshot = snapshot_from_frame(frame, &attacking, dir)?;
    let evaluator = build_evaluator(config, load_model(&args.model)?)?;
    let kind = match args.mode.as_str() {
        "obpv" => SurfaceKind::Obpv,
        "obso" => SurfaceKind::Obso,
        other => return Err(usage(format!("mode must be obpv or obso, got {other:?}"))),
    };
    let surface: ValueSurface = match kind {
        SurfaceKind::Obpv => evaluator.obpv_surface(&snapshot)?,
        SurfaceKind::Obso => evaluator.obso_surface(&snapshot)?,
    };
    if let Some(path) = &args.heatmap {
        std::fs::write(path, surface_to_csv(&surface)?).map_err(Error::Io)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.image {
        std::fs::write(path, surface_to_ppm(&surface, args.image_max)?).map_err(Error::Io)?;
        println!("wrote {}", path.display());
    }
    let grid_max = evaluator.event_scalar(&surface, &snapshot, ScalarMode::GridMax)?;
    let player_max = evaluator
        .event_scalar(&surface, &snapshot, ScalarMode::PlayerMax)
        .ok();
    if let Some(path) = &args.out {
        #[derive(Serialize)]
        struct EvalPayload {
            frame: u64,
            mode: SurfaceKind,
            attacking_team: String,
            grid_max: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            player_max: Option<f64>,
        }
        write_report(
            path,
            "eval-frame",
            config,
            EvalPayload {
                frame: args.frame,
                mode: kind,
                attacking_team: attacking.clone(),
                grid_max,
                player_max,
            },
        )?;
        println!("wrote {}", path.display());
    } else {
        println!(
            "frame {} {} attacking={} grid_max={:.6} player_max={}",
            args.frame,
            match kind {
                SurfaceKind::Obpv => "obpv",
                SurfaceKind::Obso => "obso",
            },
            attacking,
            grid_max,
            player_max.map_or("n/a".to_string(), |v| format!("{v:.6}")),
        );
    }
    Ok(())
}

fn nearest_team_to_ball(frame: &TrackingFrame) -> Option<String> {
    frame
        .players
        .iter()
        .min_by(|a, b| {
            a.position
                .distance(frame.ball)
                .total_cmp(&b.position.distance(frame.ball))
        })
        .map(|p| p.team_id.clone())
}

fn load_covariates(path: &Path) -> Result<BTreeMap<String, f64>, RunError> {
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    let mut table = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("team_id")) {
            continue;
        }
        let (team, value) = line.split_once(',').ok_or_else(|| {
            RunError::Data(Error::InvalidFormat(format!(
                "covariates line {}: expected team_id,value",
                lineno + 1
            )))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            RunError::Data(Error::InvalidFormat(format!(
                "covariates line {}: bad value {value:?}",
                lineno + 1
            )))
        })?;
        table.insert(team.trim().to_string(), value);
    }
    Ok(table)
}
