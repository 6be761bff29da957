//! Subcommand implementations. Each returns data plus the files it wrote;
//! printing and exit codes are left to the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use galerkin_nn::catalog::{self, RuleKind};
use galerkin_nn::driver::run_adaptive_observed;
use galerkin_nn::network::init_hidden;
use galerkin_nn::{
    evaluate_solution, Clock, IterationRecord, NoClock, SolverState, TerminationReason, VariationalProblem,
};
use serde_json::{json, Map, Value};

use crate::checkpoint::{self, CheckpointError};
use crate::config::{nest, CheckpointFormat, ConfigError, RunConfig};
use crate::report;

/// Environment variable naming the output root.
pub const OUTPUT_ENV: &str = "GALERKIN_NN_OUTPUT";
pub const DEFAULT_ROOT: &str = "galerkin-out";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] CheckpointError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_FAILURE,
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `$GALERKIN_NN_OUTPUT`, or `galerkin-out` in the working directory.
pub fn output_root() -> PathBuf {
    match std::env::var_os(OUTPUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_ROOT),
    }
}

/// `output.dir` joined onto `root` (absolute paths replace it), or
/// `root/<fallback>`.
pub fn output_dir(cfg: &RunConfig, root: &Path, fallback: &str) -> PathBuf {
    match &cfg.output {
        Some(d) => root.join(d),
        None => root.join(fallback),
    }
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Builds the problem and checks that the network settings fit it.
pub fn prepare(cfg: &RunConfig) -> Result<VariationalProblem, CliError> {
    let p = catalog::build(&cfg.problem, &cfg.quadrature)
        .map_err(|e| ConfigError { location: None, key: Some("quadrature".into()), message: e.to_string() })?;
    let act = cfg.options.activation;
    if act.max_order() < p.derivative_order() {
        return Err(ConfigError {
            location: None,
            key: Some("network.activation".into()),
            message: format!(
                "{} supplies derivatives up to order {}, {} needs {}",
                act.name(),
                act.max_order(),
                p.name,
                p.derivative_order()
            ),
        }
        .into());
    }
    init_hidden(cfg.options.init, 1, p.dim(), 0).map_err(|e| ConfigError {
        location: None,
        key: Some("network.init.kind".into()),
        message: e.to_string(),
    })?;
    Ok(p)
}

/// A file written by a command, relative to its output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub kind: &'static str,
    pub path: String,
}

impl Artifact {
    fn json(&self) -> Value {
        json!({"kind": self.kind, "path": self.path})
    }
}

struct Sink {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Sink {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        Ok(Sink { dir, artifacts: Vec::new() })
    }

    fn path(&mut self, kind: &'static str, rel: String) -> Result<PathBuf, CliError> {
        let full = self.dir.join(&rel);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent).map_err(io(parent))?;
        }
        self.artifacts.push(Artifact { kind, path: rel });
        Ok(full)
    }

    fn manifest(&self, mut body: Map<String, Value>) -> Result<PathBuf, CliError> {
        body.insert("artifacts".into(), Value::Array(self.artifacts.iter().map(Artifact::json).collect()));
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&Value::Object(body)).expect("json values serialize");
        fs::write(&path, text + "\n").map_err(io(&path))?;
        Ok(path)
    }
}

/// The config with every quadrature size spelled out.
fn resolved(cfg: &RunConfig) -> Result<RunConfig, CliError> {
    let sz = catalog::resolve_sizes(&cfg.problem, &cfg.quadrature)
        .map_err(|e| ConfigError { location: None, key: Some("quadrature".into()), message: e.to_string() })?;
    let mut out = cfg.clone();
    out.quadrature.interior = Some(sz.interior);
    out.quadrature.boundary = sz.boundary;
    out.quadrature.interface = sz.interface;
    out.quadrature.validation = Some(sz.validation);
    out.quadrature.interior_kind = sz.interior_kind;
    Ok(out)
}

fn problem_info(p: &VariationalProblem) -> Value {
    let penalties: Map<String, Value> = p.penalties.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
    json!({
        "dim": p.dim(),
        "form_kind": p.form_kind.name(),
        "load_kind": p.load_kind.name(),
        "exact_solution": p.exact.is_some(),
        "penalties": penalties,
    })
}

fn termination_json(t: &TerminationReason) -> Value {
    match t {
        TerminationReason::Degenerate(msg) => json!({"reason": t.name(), "message": msg}),
        _ => json!({"reason": t.name()}),
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub state: SolverState,
    pub artifacts: Vec<Artifact>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        match self.state.termination {
            TerminationReason::Degenerate(_) => EXIT_NUMERICAL,
            _ => EXIT_OK,
        }
    }
}

/// Runs the adaptive loop and writes its artifacts into
/// [`output_dir`]`(cfg, root, problem)`.
pub fn cmd_run(
    cfg: &RunConfig,
    root: &Path,
    observe: &mut dyn FnMut(&IterationRecord),
) -> Result<RunOutcome, CliError> {
    let p = prepare(cfg)?;
    let wall = WallClock(Instant::now());
    let clock: &dyn Clock = if cfg.report.timing { &wall } else { &NoClock };
    let state = run_adaptive_observed(&p, &cfg.options, clock, observe).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut sink = Sink::new(output_dir(cfg, root, &cfg.problem))?;
    write_run(&mut sink, cfg, &p, &state)?;

    let full = resolved(cfg)?;
    let mut body = nest(full.to_pairs());
    let last = state.history.last();
    body.insert(
        "result".into(),
        json!({
            "termination": termination_json(&state.termination),
            "iterations": state.iteration(),
            "basis_size": state.basis.len(),
            "final_eta": last.map(|r| r.eta),
            "final_true_energy": last.and_then(|r| r.true_energy),
            "problem": problem_info(&p),
        }),
    );
    let manifest = sink.manifest(body)?;
    Ok(RunOutcome {
        dir: sink.dir,
        manifest,
        state,
        artifacts: sink.artifacts,
    })
}

fn write_run(sink: &mut Sink, cfg: &RunConfig, p: &VariationalProblem, state: &SolverState) -> Result<(), CliError> {
    let d = p.dim();
    report::write_history(&sink.path("history", "history.csv".into())?, &state.history)?;
    report::write_diagnostics(&sink.path("diagnostics", "diagnostics.csv".into())?, &state.history)?;
    report::write_cond(&sink.path("cond", "cond.csv".into())?, &state.history)?;
    if cfg.report.epochs {
        report::write_epochs(&sink.path("epochs", "epochs.csv".into())?, &state.epochs)?;
    }
    let m = state.basis.len();
    report::write_matrix(&sink.path("gram", "gram.csv".into())?, m, &state.gram)?;
    report::write_coefficients(&sink.path("coefficients", "coefficients.csv".into())?, &state.coefficients)?;

    let pts = report::grid(&p.domain, cfg.report.grid);
    let u = if m == 0 {
        vec![0.0; pts.len() / d]
    } else {
        evaluate_solution(state, &pts, 0)
            .map_err(|e| CliError::Numerical(e.to_string()))?
            .values()
            .to_vec()
    };
    report::write_samples(&sink.path("solution", "solution.csv".into())?, d, &pts, &[("u", &u)])?;
    if cfg.report.exact {
        if let Some(exact) = &p.exact {
            let ex: Vec<f64> = pts.chunks(d).map(|x| exact.value(x)).collect();
            report::write_samples(&sink.path("exact", "exact.csv".into())?, d, &pts, &[("u", &ex)])?;
        }
    }
    for (k, net) in state.basis.iter().enumerate() {
        let tag = format!("phi_{:03}", k + 1);
        if cfg.report.basis {
            let v = net.eval_stack(&pts, 0).map_err(|e| CliError::Numerical(e.to_string()))?;
            let path = sink.path("basis", format!("basis/{tag}.csv"))?;
            report::write_samples(&path, d, &pts, &[("phi", v.values())])?;
        }
        if let Some(fmt) = cfg.report.checkpoint {
            match fmt {
                CheckpointFormat::Binary => {
                    let path = sink.path("checkpoint", format!("checkpoints/{tag}.bin"))?;
                    let f = fs::File::create(&path).map_err(io(&path))?;
                    checkpoint::write_binary(net, std::io::BufWriter::new(f))?;
                }
                CheckpointFormat::Csv => {
                    let path = sink.path("checkpoint", format!("checkpoints/{tag}.csv"))?;
                    let f = fs::File::create(&path).map_err(io(&path))?;
                    checkpoint::write_csv(net, std::io::BufWriter::new(f))?;
                }
            }
        }
    }
    if cfg.report.rules {
        write_rules(sink, p)?;
    }
    Ok(())
}

fn write_rules(sink: &mut Sink, p: &VariationalProblem) -> Result<(), CliError> {
    for (set, disc) in [("training", p.training()), ("validation", p.validation())] {
        for (k, rule) in disc.rules().iter().enumerate() {
            report::write_rule(&sink.path("rule", format!("rules/{set}_{k}.csv"))?, rule)?;
        }
    }
    Ok(())
}

/// Writes the sampled exact solution and/or the quadrature rules of a
/// problem without running it.
pub fn cmd_export(cfg: &RunConfig, root: &Path, rules: bool, exact: bool) -> Result<Vec<PathBuf>, CliError> {
    if !rules && !exact {
        return Err(CliError::Usage("nothing to export; pass --rules and/or --exact".into()));
    }
    let p = prepare(cfg)?;
    if exact && p.exact.is_none() {
        return Err(ConfigError {
            location: None,
            key: Some("problem.name".into()),
            message: format!("{} has no exact solution", p.name),
        }
        .into());
    }
    let mut sink = Sink::new(output_dir(cfg, root, &cfg.problem))?;
    if let Some(ex) = p.exact.as_ref().filter(|_| exact) {
        let d = p.dim();
        let pts = report::grid(&p.domain, cfg.report.grid);
        let u: Vec<f64> = pts.chunks(d).map(|x| ex.value(x)).collect();
        report::write_samples(&sink.path("exact", "exact.csv".into())?, d, &pts, &[("u", &u)])?;
    }
    if rules {
        write_rules(&mut sink, &p)?;
    }
    Ok(sink.artifacts.iter().map(|a| sink.dir.join(&a.path)).collect())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StudyRow {
    pub kind: String,
    pub nodes: usize,
    pub iteration: usize,
    pub n_i: usize,
    pub eta: f64,
    pub l2_eta: f64,
    pub true_l2: Option<f64>,
    pub true_energy: Option<f64>,
    pub cond: Option<f64>,
}

#[derive(Debug)]
pub struct StudyOutcome {
    pub dir: PathBuf,
    pub rows: Vec<StudyRow>,
    pub runs: Vec<(RuleKind, usize, SolverState)>,
}

impl StudyOutcome {
    pub fn exit_code(&self) -> u8 {
        let degenerate = self
            .runs
            .iter()
            .any(|(_, _, s)| matches!(s.termination, TerminationReason::Degenerate(_)));
        if degenerate {
            EXIT_NUMERICAL
        } else {
            EXIT_OK
        }
    }
}

/// Reruns `cfg` once per (rule kind, interior node count), in order, and
/// collects the error histories into `study.csv`.
pub fn cmd_quadrature_study(
    cfg: &RunConfig,
    nodes: &[usize],
    kinds: &[RuleKind],
    root: &Path,
    observe: &mut dyn FnMut(RuleKind, usize, &IterationRecord),
) -> Result<StudyOutcome, CliError> {
    if nodes.is_empty() {
        return Err(CliError::Usage("quadrature-study needs at least one node count".into()));
    }
    if kinds.is_empty() {
        return Err(CliError::Usage("quadrature-study needs at least one rule kind".into()));
    }
    if let Some(bad) = nodes.iter().find(|n| **n == 0) {
        return Err(CliError::Usage(format!("node counts must be positive, got {bad}")));
    }
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let mut summary = Vec::new();
    for &kind in kinds {
        for &n in nodes {
            let mut sub = cfg.clone();
            sub.quadrature.interior = Some(n);
            sub.quadrature.interior_kind = kind;
            let p = prepare(&sub)?;
            let state = run_adaptive_observed(&p, &sub.options, &NoClock, &mut |r| observe(kind, n, r))
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            for r in &state.history {
                rows.push(StudyRow {
                    kind: kind.name().into(),
                    nodes: n,
                    iteration: r.iteration,
                    n_i: r.width,
                    eta: r.eta,
                    l2_eta: r.l2_eta,
                    true_l2: r.true_l2,
                    true_energy: r.true_energy,
                    cond: r.cond,
                });
            }
            summary.push(json!({
                "kind": kind.name(),
                "nodes": n,
                "iterations": state.iteration(),
                "termination": termination_json(&state.termination),
            }));
            runs.push((kind, n, state));
        }
    }
    let mut sink = Sink::new(output_dir(cfg, root, &format!("quadrature_study_{}", cfg.problem)))?;
    let path = sink.path("study", "study.csv".into())?;
    let mut w = csv::Writer::from_path(&path)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io(&path))?;
    let mut body = nest(cfg.to_pairs());
    body.insert(
        "result".into(),
        json!({
            "study": {
                "nodes": nodes,
                "kinds": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
            },
            "runs": summary,
        }),
    );
    sink.manifest(body)?;
    Ok(StudyOutcome { dir: sink.dir, rows, runs })
}

/// One catalog entry as printed by `list`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub form_kind: String,
    pub load_kind: String,
    pub exact_solution: bool,
    pub penalties: Map<String, Value>,
    pub schedules: Value,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    catalog::problem_catalog()
        .iter()
        .map(|p| {
            let cfg = RunConfig::defaults(&p.name).expect("catalog names have defaults");
            let mut all = nest(cfg.to_pairs());
            let schedules = all.remove("schedules").unwrap_or(Value::Null);
            CatalogEntry {
                name: p.name.clone(),
                dim: p.dim(),
                form_kind: p.form_kind.name().into(),
                load_kind: p.load_kind.name().into(),
                exact_solution: p.exact.is_some(),
                penalties: p.penalties.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect(),
                schedules,
            }
        })
        .collect()
}

fn describe_width(cfg: &RunConfig) -> String {
    use galerkin_nn::driver::WidthSchedule::*;
    match &cfg.options.schedules.width {
        Geometric { base, ratio } if *ratio == 1.0 => format!("{base}"),
        Geometric { base, ratio } => format!("{base}*{ratio}^(i-1)"),
        Stepped { base, increment, every } => format!("{base}+{increment}*floor((i-1)/{every})"),
        List(v) => format!("{v:?}"),
    }
}

fn describe_scale(cfg: &RunConfig) -> String {
    use galerkin_nn::driver::ScaleSchedule::*;
    match &cfg.options.schedules.scale {
        Affine { start, step } if *step == 0.0 => format!("{start}"),
        Affine { start, step } => format!("{start}+{step}(i-1)"),
        Geometric { offset, factor, ratio } => format!("{offset}+{factor}*{ratio}^(i-1)"),
        List(v) => format!("{v:?}"),
    }
}

/// The catalog as an aligned text table or a JSON array.
pub fn cmd_list(as_json: bool) -> String {
    let entries = catalog_entries();
    if as_json {
        return serde_json::to_string_pretty(&entries).expect("json values serialize") + "\n";
    }
    let mut rows = vec![[
        "name", "dim", "form", "load", "exact", "width n_i", "beta_i", "lr A/rho", "tol", "epochs",
    ]
    .map(String::from)];
    for e in &entries {
        let cfg = RunConfig::defaults(&e.name).expect("catalog names have defaults");
        let s = &cfg.options.schedules;
        rows.push([
            e.name.clone(),
            e.dim.to_string(),
            e.form_kind.clone(),
            e.load_kind.clone(),
            if e.exact_solution { "yes" } else { "no" }.into(),
            describe_width(&cfg),
            describe_scale(&cfg),
            format!("{:e}/{}", s.learning_rate.initial, s.learning_rate.decay),
            format!("{:e}", s.tol),
            s.epochs.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
