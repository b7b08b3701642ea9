//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use thiserror::Error;
use wayfarer_core::analytics::{
    classify_report, parse_responses, score, stats_report, ClassifierConfig, ClassifyOptions, Dataset, IpqConfig,
    Questionnaire, Score, SplitSpec,
};
use wayfarer_core::gaze::{read_gaze_log, recording_features, write_feature_csv, FeatureConfig};
use wayfarer_core::intent::{resolve_command, Outcome, ResolverConfig};
use wayfarer_core::locomotion::{agent_script, parse_script, run_session, write_trace_jsonl, AgentConfig, SessionConfig};
use wayfarer_core::world::{load_scene, Pose, TownLayout, Vec3};
use wayfarer_core::Technique;

use crate::service::{self, AppState, ServiceConfig, SystemClock};
use crate::BackendKind;

#[derive(Debug, Parser)]
#[command(name = "wayfarer", version, about = "Voice-driven VR locomotion simulator and gaze analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a command script (or a scripted agent) and write the trace.
    Simulate(SimulateArgs),
    /// Resolve one free-form command from a pose.
    Resolve(ResolveArgs),
    /// Eye-tracking log processing.
    #[command(subcommand)]
    Gaze(GazeCommand),
    /// Classification and group statistics over a feature matrix.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Score questionnaire responses.
    Score(ScoreArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["script", "agent"]))]
pub struct SimulateArgs {
    /// Scene JSON; the bundled town when omitted.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long)]
    pub technique: Technique,
    /// Timed command script (JSON array of {t, transcript?, aim?, yaw?}).
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Use the built-in scripted agent for the technique.
    #[arg(long)]
    pub agent: bool,
    /// Trace output (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "mock")]
    pub backend: BackendKind,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Current pose as X,Y,Z,YAW.
    #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
    pub pose: Pose,
    #[arg(long)]
    pub command: String,
    #[arg(long, default_value = "mock")]
    pub backend: BackendKind,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum GazeCommand {
    /// Windowed feature vectors from a raw gaze log.
    Features(FeaturesArgs),
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub log: PathBuf,
    /// Window length in seconds.
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Technique the recording belongs to.
    #[arg(long, default_value = "llm")]
    pub label: Technique,
    /// Participant id written to a `group` column.
    #[arg(long)]
    pub group: Option<String>,
    /// End of the pupil baseline interval, seconds.
    #[arg(long, allow_hyphen_values = true)]
    pub baseline_t0: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Majority baseline, k-NN accuracy and permutation importance.
    Classify(ClassifyArgs),
    /// One-way ANOVA and Kruskal-Wallis per feature.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Shuffles per feature for permutation importance.
    #[arg(long, default_value_t = 30)]
    pub repeats: usize,
    /// Skip cross-validated k selection.
    #[arg(long)]
    pub no_cv: bool,
    /// Keep each participant group on one side of the split.
    #[arg(long)]
    pub by_group: bool,
    /// Features listed in the importance ranking.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// `label` or `group`.
    #[arg(long, default_value = "label")]
    pub group_by: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// sus, ipq, csqvr or tlx.
    #[arg(long)]
    pub questionnaire: Questionnaire,
    /// One response or a list of responses (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Subscale mapping for the presence questionnaire (JSON).
    #[arg(long)]
    pub ipq_config: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Defaults to WAYFARER_PORT, then 8080.
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Backend for sessions that do not choose one.
    #[arg(long, default_value = "mock")]
    pub backend: BackendKind,
}

/// A failure after arguments parsed; exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Domain(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn in_file(path: &Path) -> impl FnOnce(String) -> CliError + '_ {
    move |msg| CliError::Domain(format!("{}: {msg}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn scene(path: Option<&Path>) -> Result<TownLayout> {
    match path {
        Some(p) => load_scene(p).map_err(|e| in_file(p)(e.to_string())),
        None => Ok(TownLayout::default_scene()),
    }
}

/// Parses `X,Y,Z,YAW`.
pub fn parse_pose(s: &str) -> std::result::Result<Pose, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z, yaw] = parts.as_slice() else {
        return Err(format!("expected X,Y,Z,YAW, got `{s}`"));
    };
    let num = |v: &str| -> std::result::Result<f64, String> {
        v.parse::<f64>()
            .ok()
            .filter(|n| n.is_finite())
            .ok_or_else(|| format!("`{v}` is not a finite number"))
    };
    Ok(Pose::new(Vec3::new(num(x)?, num(y)?, num(z)?), num(yaw)?))
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// Parses `args` (program name first) and dispatches. Returns the exit code:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    if !rendered.contains("Usage:") {
                        let _ = write!(err, "\n{}\n", Cli::command().render_usage());
                    }
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        // Reader went away (e.g. piped into `head`); nothing left to report.
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a, out),
        Command::Resolve(a) => resolve(a, out),
        Command::Gaze(GazeCommand::Features(a)) => gaze_features(a, out),
        Command::Analyze(AnalyzeCommand::Classify(a)) => classify(a, out),
        Command::Analyze(AnalyzeCommand::Stats(a)) => stats(a, out),
        Command::Score(a) => score_cmd(a, out),
        Command::Serve(a) => serve(a),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
    };
}

fn fmt_vec(v: Vec3) -> String {
    format!("({:.3}, {:.3}, {:.3})", v.x, v.y, v.z)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let layout = scene(a.scene.as_deref())?;
    let cfg = SessionConfig::default();
    let script = match &a.script {
        Some(p) => parse_script(&read(p)?).map_err(|e| in_file(p)(e.to_string()))?,
        None => {
            let agent = AgentConfig { steering: cfg.steering.clone(), dt: cfg.dt, ..AgentConfig::default() };
            agent_script(&layout, a.technique, &agent)
                .ok_or_else(|| domain("no road route connects the start pose and the targets"))?
        }
    };
    let backend = a.backend.build().map_err(domain)?;
    let report = run_session(&layout, a.technique, &script, backend.as_ref(), &cfg).map_err(domain)?;
    let mut w = create(&a.out)?;
    write_trace_jsonl(&report.trace, &mut w)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Io { path: a.out.clone(), source })?;
    say!(out, "technique: {}", a.technique)?;
    say!(out, "commands: {}", script.len())?;
    say!(out, "targets reached: {}/{}", report.final_state.next_target_index, layout.targets.len())?;
    match report.completion_time {
        Some(t) => say!(out, "completion time: {t:.2} s")?,
        None => say!(out, "completion time: not finished by {:.0} s", cfg.time_cap)?,
    }
    say!(out, "trace: {} events -> {}", report.trace.len(), a.out.display())
}

fn resolve(a: ResolveArgs, out: &mut dyn Write) -> Result<()> {
    let layout = scene(a.scene.as_deref())?;
    let backend = a.backend.build().map_err(domain)?;
    let cfg = ResolverConfig::default();
    let r = resolve_command(&a.command, &a.pose, &layout, &cfg, backend.as_ref(), 0.0).map_err(domain)?;
    if a.json {
        say!(out, "{}", serde_json::to_string_pretty(&r).map_err(domain)?)?;
    } else {
        say!(out, "outcome: {}", r.outcome.name())?;
        match &r.outcome {
            Outcome::Scheduled { target, execute_at } => {
                say!(out, "target: {}", fmt_vec(*target))?;
                say!(out, "execute_at: {execute_at:.3} s")?;
            }
            Outcome::OutOfRange { distance } => say!(out, "distance: {distance:.3} m (limit {:.0} m)", cfg.max_travel)?,
            Outcome::BackendError { message } => say!(out, "message: {message}")?,
            Outcome::NoTarget => {}
        }
        if let Some(raw) = r.raw_target {
            say!(out, "raw target: {}", fmt_vec(raw))?;
        }
        say!(
            out,
            "latency: stt {:.3} s, llm {:.3} s, total {:.3} s",
            r.stt_latency_s,
            r.llm_latency_s,
            r.stt_latency_s + r.llm_latency_s
        )?;
    }
    match r.outcome {
        Outcome::BackendError { message } => Err(CliError::Domain(format!("backend failed: {message}"))),
        _ => Ok(()),
    }
}

fn gaze_features(a: FeaturesArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.window.is_finite() && a.window > 0.0) {
        return Err(domain(format!("window must be positive, got {}", a.window)));
    }
    let file = fs::File::open(&a.log).map_err(|source| CliError::Io { path: a.log.clone(), source })?;
    let samples = read_gaze_log(io::BufReader::new(file)).map_err(|e| in_file(&a.log)(e.to_string()))?;
    let cfg = FeatureConfig { window_s: a.window, baseline_t0: a.baseline_t0, ..FeatureConfig::default() };
    let rows = recording_features(&samples, &cfg, a.label).map_err(|e| in_file(&a.log)(e.to_string()))?;
    let groups = a.group.as_ref().map(|g| vec![g.clone(); rows.len()]);
    let mut w = create(&a.out)?;
    write_feature_csv(&rows, groups.as_deref(), &mut w).map_err(domain)?;
    w.flush().map_err(|source| CliError::Io { path: a.out.clone(), source })?;
    say!(out, "samples: {}", samples.len())?;
    say!(out, "windows: {} -> {}", rows.len(), a.out.display())
}

fn load_features(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Dataset::read_csv(io::BufReader::new(file)).map_err(|e| in_file(path)(e.to_string()))
}

fn counts(m: &std::collections::BTreeMap<Technique, usize>) -> String {
    Technique::ALL
        .iter()
        .map(|t| format!("{t} {}", m.get(t).copied().unwrap_or(0)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<()> {
    let ds = load_features(&a.features)?;
    let opts = ClassifyOptions {
        split: SplitSpec { test_fraction: a.test_fraction, seed: a.seed, by_group: a.by_group, ..SplitSpec::default() },
        classifier: ClassifierConfig { k: a.k, ..ClassifierConfig::default() },
        repeats: a.repeats,
        cross_validate: !a.no_cv,
    };
    let r = classify_report(&ds, &opts).map_err(domain)?;
    if a.json {
        return say!(out, "{}", serde_json::to_string_pretty(&r).map_err(domain)?);
    }
    say!(out, "train: {} ({})", r.n_train, counts(&r.train_counts))?;
    say!(out, "test: {} ({})", r.n_test, counts(&r.test_counts))?;
    say!(out, "majority baseline ({}): {:.4}", r.majority_label, r.baseline_accuracy)?;
    say!(out, "k-NN accuracy (k={}): {:.4}", r.k, r.knn_accuracy)?;
    if let (Some(cv), Some(acc)) = (&r.cv, r.cv_knn_accuracy) {
        say!(out, "cross-validated k={}: {:.4}", cv.best_k, acc)?;
    }
    if !r.dropped_features.is_empty() {
        say!(out, "constant features dropped: {}", r.dropped_features.join(", "))?;
    }
    say!(out, "permutation importance (mean accuracy drop):")?;
    for imp in r.importance.iter().take(a.top) {
        say!(out, "  {:<28} {:+.4}", imp.feature, imp.drop)?;
    }
    Ok(())
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Result<()> {
    let ds = load_features(&a.features)?;
    let r = stats_report(&ds, &a.group_by).map_err(domain)?;
    if a.json {
        return say!(out, "{}", serde_json::to_string_pretty(&r).map_err(domain)?);
    }
    let groups: Vec<String> = r.groups.iter().map(|(g, n)| format!("{g} {n}")).collect();
    say!(out, "groups by {}: {}", r.group_by, groups.join(", "))?;
    say!(out, "{:<28} {:>10} {:>8} {:>10}", "feature", "F", "eta2", "H")?;
    for f in &r.features {
        let cell = |v: Option<f64>, w: usize, p: usize| v.map_or_else(|| format!("{:>w$}", "-"), |x| format!("{x:>w$.p$}"));
        let line = format!(
            "{:<28} {} {} {}",
            f.feature,
            cell(f.anova.as_ref().map(|x| x.f), 10, 3),
            cell(f.anova.as_ref().map(|x| x.eta_squared), 8, 4),
            cell(f.kruskal.as_ref().map(|x| x.h), 10, 3),
        );
        match &f.note {
            Some(n) => say!(out, "{line}  ({n})")?,
            None => say!(out, "{line}")?,
        }
    }
    Ok(())
}

fn render_score(s: &Score) -> String {
    match s {
        Score::Single(v) => format!("{v:.2}"),
        Score::Subscales(m) => m.iter().map(|(k, v)| format!("{k}={v:.2}")).collect::<Vec<_>>().join(" "),
        Score::CsqVr(c) => format!(
            "nausea={:.2} vestibular={:.2} oculomotor={:.2} total={:.2}",
            c.nausea, c.vestibular, c.oculomotor, c.total
        ),
    }
}

fn score_cmd(a: ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let responses = parse_responses(&read(&a.input)?).map_err(|e| in_file(&a.input)(e.to_string()))?;
    let ipq: Option<IpqConfig> = match &a.ipq_config {
        Some(p) => Some(serde_json::from_str(&read(p)?).map_err(|e| in_file(p)(e.to_string()))?),
        None => None,
    };
    let mut scored = Vec::with_capacity(responses.len());
    for (i, r) in responses.iter().enumerate() {
        let id = r.id().map_or_else(|| format!("#{}", i + 1), str::to_string);
        let s = score(a.questionnaire, r.items(), ipq.as_ref()).map_err(|e| domain(format!("response {id}: {e}")))?;
        scored.push((id, s));
    }
    if a.json {
        let v: Vec<_> = scored.iter().map(|(id, s)| serde_json::json!({ "id": id, "score": s })).collect();
        return say!(out, "{}", serde_json::to_string_pretty(&v).map_err(domain)?);
    }
    for (id, s) in &scored {
        say!(out, "{id}\t{}", render_score(s))?;
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<()> {
    let port = match a.port {
        Some(p) => p,
        None => match std::env::var("WAYFARER_PORT") {
            Ok(v) => v.trim().parse().map_err(|_| domain(format!("WAYFARER_PORT=`{v}` is not a port number")))?,
            Err(_) => 8080,
        },
    };
    let layout = scene(a.scene.as_deref())?;
    // Fail at startup rather than on the first session.
    a.backend.build().map_err(domain)?;
    let cfg = ServiceConfig { scene: Arc::new(layout), backend: a.backend, ..ServiceConfig::default() };
    let app = AppState::new(cfg, Arc::new(SystemClock::default()));
    let rt = tokio::runtime::Runtime::new().map_err(domain)?;
    rt.block_on(service::serve(SocketAddr::new(a.host, port), app)).map_err(domain)
}
