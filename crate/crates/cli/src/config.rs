//! Run configuration: flat `key = value` files with dotted keys, or JSON
//! objects whose nesting spells the same keys.
//!
//! ```text
//! # string with a coarser rule
//! problem.name = string_1d
//! schedules.width.kind = geometric
//! schedules.width.base = 5
//! schedules.width.ratio = 2
//! quadrature.interior.n = 256
//! ```
//!
//! Every value starts at the catalog default of `problem.name`; keys given
//! later override earlier ones. The top-level namespaces `result` and
//! `artifacts` are ignored so a run manifest is itself a valid config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use galerkin_nn::catalog::{self, QuadratureOverrides, RuleKind};
use galerkin_nn::driver::{ScaleSchedule, WidthSchedule};
use galerkin_nn::{Activation, InitStrategy, RunOptions};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    /// `file:line`, a file name, or the flag a value came from.
    pub location: Option<String>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(loc) = &self.location {
            write!(f, "{loc}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            location: None,
            key: None,
            message: message.into(),
        }
    }

    fn at(entry: &Entry, key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            location: Some(entry.origin.clone()),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            location: None,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

/// A raw value and where it was read.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub origin: String,
}

/// Ordered raw key-value pairs; later entries win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Entries(Vec<(String, Entry)>);

impl Entries {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>, origin: impl Into<String>) {
        self.0.push((
            key.into(),
            Entry {
                value: value.into(),
                origin: origin.into(),
            },
        ));
    }

    pub fn extend(&mut self, other: Entries) {
        self.0.extend(other.0);
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.0.iter().rev().find(|(k, _)| k == key).map(|(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.0.iter().map(|(k, e)| (k.as_str(), e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parses `key = value` lines. `#` starts a comment; values may be quoted.
pub fn parse_key_values(text: &str, label: &str) -> Result<Entries, ConfigError> {
    let mut out = Entries::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let origin = format!("{label}:{line_no}");
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError {
                location: Some(origin),
                key: None,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        let key = k.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(ConfigError {
                location: Some(origin),
                key: None,
                message: format!("malformed key `{key}`"),
            });
        }
        if let Some(prev) = seen.insert(key.to_string(), line_no) {
            return Err(ConfigError {
                location: Some(origin),
                key: Some(key.to_string()),
                message: format!("duplicate key (first set on line {prev})"),
            });
        }
        out.push(key, unquote(v.trim()), origin);
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

/// Flattens a JSON object to dotted keys. Arrays become comma-separated
/// lists.
pub fn parse_json(text: &str, label: &str) -> Result<Entries, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError {
        location: Some(format!("{label}:{}", e.line())),
        key: None,
        message: format!("invalid JSON: {e}"),
    })?;
    let Value::Object(map) = value else {
        return Err(ConfigError {
            location: Some(label.to_string()),
            key: None,
            message: "top level must be an object".into(),
        });
    };
    let mut out = Entries::default();
    flatten(&map, "", label, &mut out)?;
    Ok(out)
}

fn flatten(map: &Map<String, Value>, prefix: &str, label: &str, out: &mut Entries) -> Result<(), ConfigError> {
    for (k, v) in map {
        if prefix.is_empty() && IGNORED.contains(&k.as_str()) {
            continue;
        }
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten(inner, &key, label, out)?,
            Value::Array(items) => {
                let parts: Result<Vec<String>, ConfigError> = items
                    .iter()
                    .map(|x| scalar(x).ok_or_else(|| list_error(label, &key)))
                    .collect();
                out.push(key, parts?.join(","), label);
            }
            other => match scalar(other) {
                Some(s) => out.push(key, s, label),
                None => out.push(key, String::new(), label),
            },
        }
    }
    Ok(())
}

fn list_error(label: &str, key: &str) -> ConfigError {
    ConfigError {
        location: Some(label.to_string()),
        key: Some(key.to_string()),
        message: "arrays may only hold numbers, strings or booleans".into(),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Reads a config file; `.json` files and text starting with `{` are JSON.
pub fn read_file(path: &Path) -> Result<Entries, ConfigError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        location: Some(label.clone()),
        key: None,
        message: format!("cannot read config: {e}"),
    })?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
    if is_json {
        parse_json(&text, &label)
    } else {
        parse_key_values(&text, &label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckpointFormat {
    Binary,
    Csv,
}

impl CheckpointFormat {
    pub fn name(self) -> &'static str {
        match self {
            CheckpointFormat::Binary => "binary",
            CheckpointFormat::Csv => "csv",
        }
    }
}

/// Which artifacts a run writes besides the manifest and history.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Record wall-clock times; off keeps histories byte-reproducible.
    pub timing: bool,
    pub epochs: bool,
    /// Grid points per direction for solution, basis and exact samples.
    pub grid: usize,
    pub basis: bool,
    pub checkpoint: Option<CheckpointFormat>,
    pub rules: bool,
    pub exact: bool,
}

impl Default for Report {
    fn default() -> Self {
        Report {
            timing: false,
            epochs: true,
            grid: 101,
            basis: true,
            checkpoint: Some(CheckpointFormat::Binary),
            rules: false,
            exact: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub options: RunOptions,
    pub quadrature: QuadratureOverrides,
    pub output: Option<PathBuf>,
    pub report: Report,
}

const IGNORED: [&str; 2] = ["result", "artifacts"];

impl RunConfig {
    /// Catalog defaults for `problem`.
    pub fn defaults(problem: &str) -> Result<Self, ConfigError> {
        let options = catalog::default_options(problem).map_err(|e| ConfigError::key("problem.name", e.to_string()))?;
        Ok(RunConfig {
            problem: problem.to_string(),
            options,
            quadrature: QuadratureOverrides::default(),
            output: None,
            report: Report::default(),
        })
    }

    pub fn from_entries(entries: &Entries) -> Result<Self, ConfigError> {
        let Some(name) = entries.get("problem.name") else {
            return Err(ConfigError::key("problem.name", "missing; run `galerkin-nn list` for the catalog"));
        };
        let mut cfg = RunConfig::defaults(&name.value).map_err(|mut e| {
            e.location = Some(name.origin.clone());
            e
        })?;
        let mut width = BTreeMap::new();
        let mut scale = BTreeMap::new();
        let mut init = BTreeMap::new();
        let mut latest: BTreeMap<&str, &Entry> = BTreeMap::new();
        for (key, entry) in entries.iter() {
            if IGNORED.iter().any(|ns| key == *ns || key.starts_with(&format!("{ns}."))) {
                continue;
            }
            latest.insert(key, entry);
        }
        for (&key, &e) in &latest {
            let o = &mut cfg.options;
            let s = &mut o.schedules;
            match key {
                "problem.name" => {}
                "seed" => o.seed = parse(e, key)?,
                "network.activation" => {
                    o.activation = match e.value.as_str() {
                        "tanh" => Activation::Tanh,
                        "relu" => Activation::Relu,
                        _ => return Err(ConfigError::at(e, key, "expected `tanh` or `relu`")),
                    }
                }
                "solver.cond_cap" => o.cond_cap = positive(e, key)?,
                "schedules.epochs" => s.epochs = parse(e, key)?,
                "schedules.tol" => s.tol = positive(e, key)?,
                "schedules.max_iterations" => s.max_iterations = parse(e, key)?,
                "schedules.learning_rate.initial" => s.learning_rate.initial = parse(e, key)?,
                "schedules.learning_rate.decay" => s.learning_rate.decay = parse(e, key)?,
                "quadrature.interior.n" => cfg.quadrature.interior = Some(count(e, key)?),
                "quadrature.boundary.n" => cfg.quadrature.boundary = Some(count(e, key)?),
                "quadrature.interface.n" => cfg.quadrature.interface = Some(count(e, key)?),
                "quadrature.validation.n" => cfg.quadrature.validation = Some(count(e, key)?),
                "quadrature.interior.kind" => {
                    cfg.quadrature.interior_kind = match e.value.as_str() {
                        "gauss" => RuleKind::Gauss,
                        "riemann" => RuleKind::Riemann,
                        _ => return Err(ConfigError::at(e, key, "expected `gauss` or `riemann`")),
                    }
                }
                "output.dir" => cfg.output = Some(PathBuf::from(&e.value)),
                "report.timing" => cfg.report.timing = boolean(e, key)?,
                "report.epochs" => cfg.report.epochs = boolean(e, key)?,
                "report.grid" => {
                    cfg.report.grid = parse(e, key)?;
                    if cfg.report.grid < 2 {
                        return Err(ConfigError::at(e, key, "grid needs at least 2 points per direction"));
                    }
                }
                "report.basis" => cfg.report.basis = boolean(e, key)?,
                "report.rules" => cfg.report.rules = boolean(e, key)?,
                "report.exact" => cfg.report.exact = boolean(e, key)?,
                "report.checkpoint" => {
                    cfg.report.checkpoint = match e.value.as_str() {
                        "binary" => Some(CheckpointFormat::Binary),
                        "csv" => Some(CheckpointFormat::Csv),
                        "none" => None,
                        _ => return Err(ConfigError::at(e, key, "expected `binary`, `csv` or `none`")),
                    }
                }
                _ => {
                    if let Some(k) = key.strip_prefix("schedules.width.") {
                        width.insert(k, e);
                    } else if let Some(k) = key.strip_prefix("schedules.scale.") {
                        scale.insert(k, e);
                    } else if let Some(k) = key.strip_prefix("network.init.") {
                        init.insert(k, e);
                    } else {
                        return Err(ConfigError::at(e, key, "unknown key"));
                    }
                }
            }
        }
        cfg.options.schedules.width = resolve_width(&cfg.options.schedules.width, &width)?;
        cfg.options.schedules.scale = resolve_scale(&cfg.options.schedules.scale, &scale)?;
        cfg.options.init = resolve_init(cfg.options.init, &init)?;
        cfg.options
            .schedules
            .validate()
            .map_err(|err| ConfigError::key("schedules", err.to_string()))?;
        catalog::resolve_sizes(&cfg.problem, &cfg.quadrature)
            .map_err(|err| ConfigError::key("quadrature", err.to_string()))?;
        Ok(cfg)
    }

    /// The config as typed dotted keys, in a stable order.
    pub fn to_pairs(&self) -> Vec<(String, Value)> {
        let o = &self.options;
        let s = &o.schedules;
        let mut v: Vec<(String, Value)> = vec![("problem.name".into(), self.problem.clone().into())];
        v.push(("seed".into(), o.seed.into()));
        v.push(("network.activation".into(), o.activation.name().into()));
        match o.init {
            InitStrategy::UniformBias1d => v.push(("network.init.kind".into(), "uniform_bias_1d".into())),
            InitStrategy::AxisDiagonal2d { lo, hi } | InitStrategy::Box { lo, hi } => {
                let kind = if matches!(o.init, InitStrategy::Box { .. }) { "box" } else { "axis_diagonal_2d" };
                v.push(("network.init.kind".into(), kind.into()));
                v.push(("network.init.lo".into(), floats(&lo)));
                v.push(("network.init.hi".into(), floats(&hi)));
            }
        }
        match &s.width {
            WidthSchedule::Geometric { base, ratio } => {
                v.push(("schedules.width.kind".into(), "geometric".into()));
                v.push(("schedules.width.base".into(), (*base).into()));
                v.push(("schedules.width.ratio".into(), (*ratio).into()));
            }
            WidthSchedule::Stepped { base, increment, every } => {
                v.push(("schedules.width.kind".into(), "stepped".into()));
                v.push(("schedules.width.base".into(), (*base).into()));
                v.push(("schedules.width.increment".into(), (*increment).into()));
                v.push(("schedules.width.every".into(), (*every).into()));
            }
            WidthSchedule::List(l) => {
                v.push(("schedules.width.kind".into(), "list".into()));
                v.push(("schedules.width.values".into(), l.clone().into()));
            }
        }
        match &s.scale {
            ScaleSchedule::Affine { start, step } => {
                v.push(("schedules.scale.kind".into(), "affine".into()));
                v.push(("schedules.scale.start".into(), (*start).into()));
                v.push(("schedules.scale.step".into(), (*step).into()));
            }
            ScaleSchedule::Geometric { offset, factor, ratio } => {
                v.push(("schedules.scale.kind".into(), "geometric".into()));
                v.push(("schedules.scale.offset".into(), (*offset).into()));
                v.push(("schedules.scale.factor".into(), (*factor).into()));
                v.push(("schedules.scale.ratio".into(), (*ratio).into()));
            }
            ScaleSchedule::List(l) => {
                v.push(("schedules.scale.kind".into(), "list".into()));
                v.push(("schedules.scale.values".into(), floats(l)));
            }
        }
        v.push(("schedules.learning_rate.initial".into(), s.learning_rate.initial.into()));
        v.push(("schedules.learning_rate.decay".into(), s.learning_rate.decay.into()));
        v.push(("schedules.epochs".into(), s.epochs.into()));
        v.push(("schedules.tol".into(), s.tol.into()));
        v.push(("schedules.max_iterations".into(), s.max_iterations.into()));
        v.push(("solver.cond_cap".into(), o.cond_cap.into()));
        let q = &self.quadrature;
        v.push(("quadrature.interior.kind".into(), q.interior_kind.name().into()));
        for (k, n) in [
            ("interior", q.interior),
            ("boundary", q.boundary),
            ("interface", q.interface),
            ("validation", q.validation),
        ] {
            if let Some(n) = n {
                v.push((format!("quadrature.{k}.n"), n.into()));
            }
        }
        let r = &self.report;
        v.push(("report.timing".into(), r.timing.into()));
        v.push(("report.epochs".into(), r.epochs.into()));
        v.push(("report.grid".into(), r.grid.into()));
        v.push(("report.basis".into(), r.basis.into()));
        v.push(("report.rules".into(), r.rules.into()));
        v.push(("report.exact".into(), r.exact.into()));
        let ck = r.checkpoint.map_or("none", CheckpointFormat::name);
        v.push(("report.checkpoint".into(), ck.into()));
        v
    }

    /// Renders the config in the key-value format.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_pairs() {
            let text = match v {
                Value::String(s) => s,
                Value::Array(items) => items.iter().filter_map(scalar).collect::<Vec<_>>().join(", "),
                other => other.to_string(),
            };
            out.push_str(&format!("{k} = {text}\n"));
        }
        out
    }
}

/// Nests dotted pairs into a JSON object.
pub fn nest(pairs: Vec<(String, Value)>) -> Map<String, Value> {
    let mut root = Map::new();
    for (key, value) in pairs {
        let mut parts: Vec<&str> = key.split('.').collect();
        let leaf = parts.pop().unwrap_or_default();
        let mut node = &mut root;
        for p in parts {
            node = node
                .entry(p.to_string())
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .expect("config keys never nest under a leaf");
        }
        node.insert(leaf.to_string(), value);
    }
    root
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::from(*x)).collect())
}

fn parse<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<T, ConfigError> {
    e.value
        .trim()
        .parse()
        .map_err(|_| ConfigError::at(e, key, format!("cannot parse `{}`", e.value)))
}

fn positive(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse(e, key)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::at(e, key, "must be positive"))
    }
}

fn count(e: &Entry, key: &str) -> Result<usize, ConfigError> {
    match parse(e, key)? {
        0 => Err(ConfigError::at(e, key, "node counts must be positive")),
        n => Ok(n),
    }
}

fn boolean(e: &Entry, key: &str) -> Result<bool, ConfigError> {
    match e.value.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::at(e, key, "expected a boolean")),
    }
}

fn list<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<Vec<T>, ConfigError> {
    let text = e.value.trim();
    let text = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(text);
    let items: Result<Vec<T>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(ConfigError::at(e, key, format!("cannot parse list `{}`", e.value))),
    }
}

fn point(e: &Entry, key: &str) -> Result<[f64; 2], ConfigError> {
    let v: Vec<f64> = list(e, key)?;
    match v.as_slice() {
        [x] => Ok([*x, 0.0]),
        [x, y] => Ok([*x, *y]),
        _ => Err(ConfigError::at(e, key, "expected one or two coordinates")),
    }
}

type Section<'a> = BTreeMap<&'a str, &'a Entry>;

fn check_fields(sec: &Section, prefix: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    for (k, e) in sec {
        if *k != "kind" && !allowed.contains(k) {
            let key = format!("{prefix}.{k}");
            return Err(ConfigError::at(e, &key, "unknown key for this kind"));
        }
    }
    Ok(())
}

fn field<T: std::str::FromStr + Copy>(
    sec: &Section,
    prefix: &str,
    name: &str,
    current: Option<T>,
) -> Result<T, ConfigError> {
    match sec.get(name) {
        Some(e) => parse(e, &format!("{prefix}.{name}")),
        None => current.ok_or_else(|| ConfigError::key(&format!("{prefix}.{name}"), "required for this kind")),
    }
}

fn kind<'a>(sec: &'a Section, default: &'a str) -> &'a str {
    sec.get("kind").map_or(default, |e| e.value.as_str())
}

fn resolve_width(cur: &WidthSchedule, sec: &Section) -> Result<WidthSchedule, ConfigError> {
    const P: &str = "schedules.width";
    let cur_kind = match cur {
        WidthSchedule::Geometric { .. } => "geometric",
        WidthSchedule::Stepped { .. } => "stepped",
        WidthSchedule::List(_) => "list",
    };
    let k = kind(sec, cur_kind);
    let same = k == cur_kind;
    let cur_base = match cur {
        WidthSchedule::Geometric { base, .. } | WidthSchedule::Stepped { base, .. } => Some(*base),
        WidthSchedule::List(_) => None,
    };
    match k {
        "geometric" => {
            check_fields(sec, P, &["base", "ratio"])?;
            let ratio = match cur {
                WidthSchedule::Geometric { ratio, .. } if same => Some(*ratio),
                _ => Some(2.0),
            };
            Ok(WidthSchedule::Geometric {
                base: field(sec, P, "base", cur_base)?,
                ratio: field(sec, P, "ratio", ratio)?,
            })
        }
        "stepped" => {
            check_fields(sec, P, &["base", "increment", "every"])?;
            let (inc, every) = match cur {
                WidthSchedule::Stepped { increment, every, .. } => (Some(*increment), Some(*every)),
                _ => (None, Some(1)),
            };
            Ok(WidthSchedule::Stepped {
                base: field(sec, P, "base", cur_base)?,
                increment: field(sec, P, "increment", inc)?,
                every: field(sec, P, "every", every)?,
            })
        }
        "list" => {
            check_fields(sec, P, &["values"])?;
            match (sec.get("values"), cur) {
                (Some(e), _) => Ok(WidthSchedule::List(list(e, &format!("{P}.values"))?)),
                (None, WidthSchedule::List(v)) => Ok(WidthSchedule::List(v.clone())),
                _ => Err(ConfigError::key(&format!("{P}.values"), "required for this kind")),
            }
        }
        other => Err(ConfigError::at(
            sec["kind"],
            &format!("{P}.kind"),
            format!("unknown width schedule `{other}`; expected geometric, stepped or list"),
        )),
    }
}

fn resolve_scale(cur: &ScaleSchedule, sec: &Section) -> Result<ScaleSchedule, ConfigError> {
    const P: &str = "schedules.scale";
    let cur_kind = match cur {
        ScaleSchedule::Affine { .. } => "affine",
        ScaleSchedule::Geometric { .. } => "geometric",
        ScaleSchedule::List(_) => "list",
    };
    match kind(sec, cur_kind) {
        "affine" => {
            check_fields(sec, P, &["start", "step"])?;
            let (start, step) = match cur {
                ScaleSchedule::Affine { start, step } => (Some(*start), Some(*step)),
                _ => (None, Some(0.0)),
            };
            Ok(ScaleSchedule::Affine {
                start: field(sec, P, "start", start)?,
                step: field(sec, P, "step", step)?,
            })
        }
        "geometric" => {
            check_fields(sec, P, &["offset", "factor", "ratio"])?;
            let (o, f, r) = match cur {
                ScaleSchedule::Geometric { offset, factor, ratio } => (Some(*offset), Some(*factor), Some(*ratio)),
                _ => (Some(0.0), None, None),
            };
            Ok(ScaleSchedule::Geometric {
                offset: field(sec, P, "offset", o)?,
                factor: field(sec, P, "factor", f)?,
                ratio: field(sec, P, "ratio", r)?,
            })
        }
        "list" => {
            check_fields(sec, P, &["values"])?;
            match (sec.get("values"), cur) {
                (Some(e), _) => Ok(ScaleSchedule::List(list(e, &format!("{P}.values"))?)),
                (None, ScaleSchedule::List(v)) => Ok(ScaleSchedule::List(v.clone())),
                _ => Err(ConfigError::key(&format!("{P}.values"), "required for this kind")),
            }
        }
        other => Err(ConfigError::at(
            sec["kind"],
            &format!("{P}.kind"),
            format!("unknown scale schedule `{other}`; expected affine, geometric or list"),
        )),
    }
}

fn resolve_init(cur: InitStrategy, sec: &Section) -> Result<InitStrategy, ConfigError> {
    const P: &str = "network.init";
    let (cur_kind, cur_box) = match cur {
        InitStrategy::UniformBias1d => ("uniform_bias_1d", ([0.0, 0.0], [1.0, 0.0])),
        InitStrategy::AxisDiagonal2d { lo, hi } => ("axis_diagonal_2d", (lo, hi)),
        InitStrategy::Box { lo, hi } => ("box", (lo, hi)),
    };
    let corner = |name: &str, current: [f64; 2]| match sec.get(name) {
        Some(e) => point(e, &format!("{P}.{name}")),
        None => Ok(current),
    };
    match kind(sec, cur_kind) {
        "uniform_bias_1d" => {
            check_fields(sec, P, &[])?;
            Ok(InitStrategy::UniformBias1d)
        }
        "axis_diagonal_2d" => {
            check_fields(sec, P, &["lo", "hi"])?;
            Ok(InitStrategy::AxisDiagonal2d {
                lo: corner("lo", cur_box.0)?,
                hi: corner("hi", cur_box.1)?,
            })
        }
        "box" => {
            check_fields(sec, P, &["lo", "hi"])?;
            Ok(InitStrategy::Box {
                lo: corner("lo", cur_box.0)?,
                hi: corner("hi", cur_box.1)?,
            })
        }
        other => Err(ConfigError::at(
            sec["kind"],
            &format!("{P}.kind"),
            format!("unknown init `{other}`; expected uniform_bias_1d, axis_diagonal_2d or box"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_entries(&parse_key_values(text, "t.cfg")?)
    }

    #[test]
    fn defaults_follow_the_catalog() {
        let c = kv("problem.name = string_1d\n").unwrap();
        assert_eq!(c.options, catalog::default_options("string_1d").unwrap());
        assert_eq!(c.report, Report::default());
    }

    #[test]
    fn overrides_apply() {
        let c = kv(
            "# comment\nproblem.name = l2_fit\nschedules.width.base = 8 # trailing\n\
             schedules.tol = 1e-3\nquadrature.interior.n = 64\nquadrature.interior.kind = \"riemann\"\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(c.options.schedules.width, WidthSchedule::Geometric { base: 8, ratio: 2.0 });
        assert_eq!(c.options.schedules.tol, 1e-3);
        assert_eq!(c.quadrature.interior, Some(64));
        assert_eq!(c.quadrature.interior_kind, RuleKind::Riemann);
        assert_eq!(c.options.seed, 7);
    }

    #[test]
    fn switching_kind_requires_its_fields() {
        let e = kv("problem.name = l2_fit\nschedules.width.kind = stepped\n").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("schedules.width.increment"));
        let c = kv("problem.name = l2_fit\nschedules.width.kind = stepped\nschedules.width.increment = 3\n").unwrap();
        assert_eq!(c.options.schedules.width, WidthSchedule::Stepped { base: 4, increment: 3, every: 1 });
        let c = kv("problem.name = l2_fit\nschedules.width.kind = list\nschedules.width.values = 3, 5,9\n").unwrap();
        assert_eq!(c.options.schedules.width, WidthSchedule::List(vec![3, 5, 9]));
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = kv("problem.name = l2_fit\n\nschedules.epochs = lots\n").unwrap_err();
        assert_eq!(e.location.as_deref(), Some("t.cfg:3"));
        assert_eq!(e.key.as_deref(), Some("schedules.epochs"));
        assert_eq!(e.to_string(), "t.cfg:3: key `schedules.epochs`: cannot parse `lots`");
        let e = kv("problem.name = l2_fit\nschedules.widht.base = 3\n").unwrap_err();
        assert_eq!(e.location.as_deref(), Some("t.cfg:2"));
        let e = kv("problem.name = l2_fit\nseed 3\n").unwrap_err();
        assert_eq!(e.location.as_deref(), Some("t.cfg:2"));
        let e = kv("seed = 1\nseed = 2\n").unwrap_err();
        assert!(e.message.contains("line 1"));
        let e = kv("seed = 1\n").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("problem.name"));
    }

    #[test]
    fn invalid_values_rejected() {
        let e = kv("problem.name = nope\n").unwrap_err();
        assert!(e.message.contains("membrane_2d"), "{e}");
        assert!(kv("problem.name = l2_fit\nquadrature.interior.n = 0\n").is_err());
        assert!(kv("problem.name = membrane_2d\nquadrature.interior.kind = riemann\n").is_err());
        assert!(kv("problem.name = l2_fit\nschedules.tol = -1\n").is_err());
        assert!(kv("problem.name = l2_fit\nschedules.learning_rate.decay = 0.5\n").is_err());
        assert!(kv("problem.name = l2_fit\nreport.timing = maybe\n").is_err());
    }

    #[test]
    fn json_and_key_value_agree() {
        let json = r#"{"problem": {"name": "beam_couple_1d"},
            "schedules": {"width": {"base": 12}, "scale": {"kind": "list", "values": [1, 2.5]}},
            "network": {"init": {"kind": "box", "lo": [0], "hi": [1]}},
            "result": {"termination": "tol_reached"}}"#;
        let a = RunConfig::from_entries(&parse_json(json, "t.json").unwrap()).unwrap();
        let b = kv(
            "problem.name = beam_couple_1d\nschedules.width.base = 12\nschedules.scale.kind = list\n\
             schedules.scale.values = [1, 2.5]\nnetwork.init.kind = box\nnetwork.init.lo = 0\nnetwork.init.hi = 1\n",
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rendered_configs_parse_back() {
        for name in catalog::NAMES {
            let mut c = RunConfig::defaults(name).unwrap();
            c.options.seed = 99;
            c.options.schedules.tol = 0.1 + 0.2;
            c.quadrature.validation = Some(33);
            c.report.checkpoint = None;
            let kv = parse_key_values(&c.to_key_values(), "r").unwrap();
            assert_eq!(RunConfig::from_entries(&kv).unwrap(), c);
            let json = serde_json::to_string(&nest(c.to_pairs())).unwrap();
            assert_eq!(RunConfig::from_entries(&parse_json(&json, "r").unwrap()).unwrap(), c);
        }
    }
}
