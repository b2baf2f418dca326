//! Resolution of a run configuration from defaults, a flat `key = value`
//! file and command-line overrides, with per-key diagnostics.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::registry::{keys_for, lookup, CommandKind, KeySpec, ValueKind};
use crate::closedform::{ElasticaParams, TorsionSign};
use crate::curve::{BoundaryData, FixedLengthClass, MIN_SEGMENTS};
use crate::solver::{Constraint, Representation, SolverConfig, MIN_SOLVER_SEGMENTS};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    Vector(Vec<f64>),
}

/// Where a resolved value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Default,
    File { path: PathBuf, line: usize },
    Cli,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: Option<PathBuf>,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl Diagnostic {
    fn at(source: Option<&Source>, key: &str, message: String) -> Self {
        let (path, line) = match source {
            Some(Source::File { path, line }) => (Some(path.clone()), Some(*line)),
            _ => (None, None),
        };
        let key = match source {
            Some(Source::Cli) => format!("--{}", key.replace('_', "-")),
            _ => key.to_string(),
        };
        Self {
            path,
            line,
            key: Some(key),
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{}:", p.display())?;
            if let Some(l) = self.line {
                write!(f, "{l}:")?;
            }
            write!(f, " ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        write!(f, "{}", self.message)
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: BTreeMap<String, Value>,
    pub sources: BTreeMap<String, Source>,
}

fn parse_vector(text: &str) -> Option<Vec<f64>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let v: Option<Vec<f64>> = inner.split(',').map(|t| t.trim().parse::<f64>().ok()).collect();
    v.filter(|v| (v.len() == 2 || v.len() == 3) && v.iter().all(|x| x.is_finite()))
}

/// Parses a command-line (or default) string for `spec`.
pub fn parse_str(spec: &KeySpec, text: &str) -> Result<Value, String> {
    let bad = || format!("expected {}, found `{text}`", spec.kind.describe());
    let v = match spec.kind {
        ValueKind::Int => Value::Int(text.trim().parse().map_err(|_| bad())?),
        ValueKind::Float => {
            let x: f64 = text.trim().parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            Value::Float(x)
        }
        ValueKind::Bool => Value::Bool(text.trim().parse().map_err(|_| bad())?),
        ValueKind::Str => Value::Str(text.to_string()),
        ValueKind::Vector => Value::Vector(parse_vector(text).ok_or_else(bad)?),
    };
    check_choice(spec, v)
}

fn check_choice(spec: &KeySpec, v: Value) -> Result<Value, String> {
    if let Value::Str(s) = &v {
        if !spec.choices.is_empty() && !spec.choices.contains(&s.as_str()) {
            return Err(format!("`{s}` is not one of {}", spec.choices.join(", ")));
        }
    }
    Ok(v)
}

fn from_toml(spec: &KeySpec, v: &toml::Value) -> Result<Value, String> {
    let bad = || format!("expected {}, found {}", spec.kind.describe(), v);
    let out = match (spec.kind, v) {
        (ValueKind::Int, toml::Value::Integer(i)) => Value::Int(*i),
        (ValueKind::Float, toml::Value::Integer(i)) => Value::Float(*i as f64),
        (ValueKind::Float, toml::Value::Float(x)) if x.is_finite() => Value::Float(*x),
        (ValueKind::Bool, toml::Value::Boolean(b)) => Value::Bool(*b),
        (ValueKind::Str, toml::Value::String(s)) => Value::Str(s.clone()),
        (ValueKind::Vector, toml::Value::String(s)) => Value::Vector(parse_vector(s).ok_or_else(bad)?),
        (ValueKind::Vector, toml::Value::Array(a)) => {
            let xs: Option<Vec<f64>> = a
                .iter()
                .map(|e| match e {
                    toml::Value::Integer(i) => Some(*i as f64),
                    toml::Value::Float(x) if x.is_finite() => Some(*x),
                    _ => None,
                })
                .collect();
            Value::Vector(xs.filter(|x| x.len() == 2 || x.len() == 3).ok_or_else(bad)?)
        }
        _ => return Err(bad()),
    };
    check_choice(spec, out)
}

/// Line of the first `key = ...` assignment.
fn key_line(text: &str, key: &str) -> usize {
    for (i, line) in text.lines().enumerate() {
        if let Some((lhs, _)) = line.split_once('=') {
            let lhs = lhs.trim().trim_matches('"').trim_matches('\'');
            if lhs == key {
                return i + 1;
            }
        }
    }
    1
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Key-value pairs of a config file with their lines. The optional
/// `command` entry is returned separately.
#[allow(clippy::type_complexity)]
pub fn parse_file(path: &Path, text: &str) -> Result<(Option<(String, usize)>, Vec<(String, toml::Value, usize)>), Vec<Diagnostic>> {
    let table: toml::Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            let line = e.span().map(|s| line_of_offset(text, s.start)).unwrap_or(1);
            return Err(vec![Diagnostic {
                path: Some(path.to_path_buf()),
                line: Some(line),
                key: None,
                message: e.message().to_string(),
            }]);
        }
    };
    let mut command = None;
    let mut entries = Vec::new();
    let mut diags = Vec::new();
    for (k, v) in table {
        let line = key_line(text, &k);
        if k == "command" {
            match v {
                toml::Value::String(s) => command = Some((s, line)),
                other => diags.push(Diagnostic {
                    path: Some(path.to_path_buf()),
                    line: Some(line),
                    key: Some(k),
                    message: format!("expected a command name, found {other}"),
                }),
            }
            continue;
        }
        if matches!(v, toml::Value::Table(_)) {
            diags.push(Diagnostic {
                path: Some(path.to_path_buf()),
                line: Some(line),
                key: Some(k),
                message: "sections are not supported; use flat `key = value` lines".into(),
            });
            continue;
        }
        entries.push((k, v, line));
    }
    entries.sort_by_key(|e| e.2);
    if diags.is_empty() {
        Ok((command, entries))
    } else {
        Err(diags)
    }
}

impl RunConfig {
    /// Defaults, then `file` entries, then `cli` overrides. Unknown keys and
    /// keys that do not apply to `command` are rejected.
    pub fn resolve(
        command: CommandKind,
        file: Option<(&Path, &str)>,
        cli: &[(String, String)],
    ) -> Result<Self, Vec<Diagnostic>> {
        let mut params = BTreeMap::new();
        let mut sources = BTreeMap::new();
        let mut diags = Vec::new();
        for spec in keys_for(command) {
            if let Some(d) = spec.default {
                params.insert(spec.name.to_string(), parse_str(spec, d).expect("registry default parses"));
                sources.insert(spec.name.to_string(), Source::Default);
            }
        }
        if let Some((path, text)) = file {
            let (cmd, entries) = parse_file(path, text)?;
            if let Some((name, line)) = cmd {
                if name != command.name() {
                    diags.push(Diagnostic {
                        path: Some(path.to_path_buf()),
                        line: Some(line),
                        key: Some("command".into()),
                        message: format!("file is for `{name}`, but `{}` was requested", command.name()),
                    });
                }
            }
            for (k, v, line) in entries {
                let source = Source::File {
                    path: path.to_path_buf(),
                    line,
                };
                match lookup(&k) {
                    Some(spec) if spec.applies_to(command) => match from_toml(spec, &v) {
                        Ok(val) => {
                            params.insert(k.clone(), val);
                            sources.insert(k, source);
                        }
                        Err(m) => diags.push(Diagnostic::at(Some(&source), &k, m)),
                    },
                    Some(_) => diags.push(Diagnostic::at(
                        Some(&source),
                        &k,
                        format!("not used by `{}`", command.name()),
                    )),
                    None => diags.push(Diagnostic::at(Some(&source), &k, "unknown key".into())),
                }
            }
        }
        for (k, text) in cli {
            match lookup(k) {
                Some(spec) if spec.applies_to(command) => match parse_str(spec, text) {
                    Ok(val) => {
                        params.insert(k.clone(), val);
                        sources.insert(k.clone(), Source::Cli);
                    }
                    Err(m) => diags.push(Diagnostic::at(Some(&Source::Cli), k, m)),
                },
                _ => diags.push(Diagnostic::at(Some(&Source::Cli), k, format!("unknown key for `{}`", command.name()))),
            }
        }
        for spec in keys_for(command) {
            if spec.required && !params.contains_key(spec.name) {
                diags.push(Diagnostic::at(None, spec.name, "required".into()));
            }
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        let cfg = Self {
            command,
            params,
            sources,
        };
        let semantic = cfg.validate();
        if semantic.is_empty() {
            Ok(cfg)
        } else {
            Err(semantic)
        }
    }

    fn diag(&self, key: &str, message: String) -> Diagnostic {
        Diagnostic::at(self.sources.get(key), key, message)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Float(x)) => *x,
            Some(Value::Int(i)) => *i as f64,
            other => panic!("key {key} is not a resolved number: {other:?}"),
        }
    }

    pub fn opt_float(&self, key: &str) -> Option<f64> {
        self.params.get(key).map(|_| self.float(key))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.params.get(key) {
            Some(Value::Int(i)) => *i,
            other => panic!("key {key} is not a resolved integer: {other:?}"),
        }
    }

    pub fn string(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Str(s)) => s,
            other => panic!("key {key} is not a resolved string: {other:?}"),
        }
    }

    pub fn boolean(&self, key: &str) -> bool {
        matches!(self.params.get(key), Some(Value::Bool(true)))
    }

    fn vector(&self, key: &str) -> &[f64] {
        match self.params.get(key) {
            Some(Value::Vector(v)) => v,
            other => panic!("key {key} is not a resolved vector: {other:?}"),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.string("output_dir"))
    }

    pub fn seed(&self) -> u64 {
        self.int("seed").max(0) as u64
    }

    pub fn segments(&self) -> usize {
        self.int("n").max(0) as usize
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            segments: self.segments(),
            representation: if self.string("representation") == "points" {
                Representation::Points
            } else {
                Representation::TangentAngle
            },
            outer_iters: self.int("outer_iters").max(0) as usize,
            inner_iters: self.int("inner_iters").max(0) as usize,
            constraint_tol: self.float("constraint_tol"),
            grad_tol: self.float("grad_tol"),
            penalty_growth: self.float("penalty_growth"),
            multistart_count: self.int("multistart").max(0) as usize,
            seed: self.seed(),
        }
    }

    pub fn boundary(&self) -> Result<BoundaryData, Diagnostic> {
        let dim = self.vector("p0").len();
        for k in ["p1", "v0", "v1"] {
            if self.vector(k).len() != dim {
                return Err(self.diag(k, format!("has {} components but p0 has {dim}", self.vector(k).len())));
            }
        }
        for k in ["v0", "v1"] {
            if self.vector(k).iter().all(|x| *x == 0.0) {
                return Err(self.diag(k, "tangent must be nonzero".into()));
            }
        }
        let pt = |k: &str| {
            let v = self.vector(k);
            [v[0], v[1], v.get(2).copied().unwrap_or(0.0)]
        };
        BoundaryData::normalized(dim, pt("p0"), pt("p1"), pt("v0"), pt("v1")).map_err(|e| self.diag("p0", e.to_string()))
    }

    /// The stability / verify constraint, or the command's own.
    pub fn constraint(&self) -> Constraint {
        let penalized = match self.command {
            CommandKind::Penalized => true,
            CommandKind::Stability | CommandKind::Verify => self.string("constraint") == "penalized",
            _ => false,
        };
        if penalized {
            Constraint::Penalized(self.float("lambda"))
        } else {
            Constraint::FixedLength(self.float("length"))
        }
    }

    pub fn family_params(&self) -> crate::Result<ElasticaParams> {
        let sign = if self.string("torsion_sign") == "-" {
            TorsionSign::Minus
        } else {
            TorsionSign::Plus
        };
        ElasticaParams::new(self.float("m"), self.float("w"), self.float("amplitude"), sign, self.float("beta"))
    }

    /// Semantic checks beyond types: ranges, feasibility, positivity.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let cmd = self.command;
        let min_n = if cmd.uses_solver() { MIN_SOLVER_SEGMENTS } else { MIN_SEGMENTS };
        if self.int("n") < min_n as i64 {
            d.push(self.diag("n", format!("must be at least {min_n}")));
        }
        if self.int("seed") < 0 {
            d.push(self.diag("seed", "must be non-negative".into()));
        }
        if self.string("output_dir").is_empty() {
            d.push(self.diag("output_dir", "must not be empty".into()));
        }
        match cmd {
            CommandKind::Family => {
                if let Err(e) = self.family_params() {
                    d.push(self.diag("m", e.to_string()));
                }
                if !(self.float("length") > 0.0) {
                    d.push(self.diag("length", "must be positive".into()));
                }
            }
            CommandKind::Oscillation | CommandKind::Concentration | CommandKind::Dichotomy => {
                let least = if cmd == CommandKind::Dichotomy { 4 } else { 2 };
                if self.int("jmax") < least {
                    d.push(self.diag("jmax", format!("must be at least {least}")));
                }
            }
            _ => {}
        }
        if !cmd.uses_solver() {
            return d;
        }
        for (k, ok) in [
            ("outer_iters", self.int("outer_iters") > 0),
            ("inner_iters", self.int("inner_iters") > 0),
            ("multistart", self.int("multistart") > 0),
        ] {
            if !ok {
                d.push(self.diag(k, "must be positive".into()));
            }
        }
        if d.is_empty() {
            if let Err(e) = self.solver_config().validate() {
                d.push(self.diag("grad_tol", e.to_string()));
            }
        }
        let gamma = match self.boundary() {
            Ok(g) => g,
            Err(e) => {
                d.push(e);
                return d;
            }
        };
        if gamma.dim == 3 && self.string("representation") == "angle" {
            d.push(self.diag("representation", "the angle representation is planar; use `points` in 3D".into()));
        }
        let uses_constraint = matches!(cmd, CommandKind::Minimize | CommandKind::Penalized | CommandKind::Stability | CommandKind::Verify);
        if uses_constraint {
            match self.constraint() {
                Constraint::Penalized(lambda) if !(lambda > 0.0) => d.push(self.diag(
                    "lambda",
                    format!("must be positive, got {lambda} (for lambda <= 0 minimizers need not exist)"),
                )),
                Constraint::FixedLength(l) if gamma.fixed_length_class(l) == FixedLengthClass::Infeasible => {
                    d.push(self.diag(
                        "length",
                        format!("infeasible: |P1 - P0| = {} exceeds length {l} (or equals it with tangents off the chord)", gamma.chord()),
                    ))
                }
                _ => {}
            }
        }
        match cmd {
            CommandKind::EnergyMap => {
                let (lo, hi) = (self.float("length_min"), self.float("length_max"));
                if !(lo > 0.0 && lo < hi) {
                    d.push(self.diag("length_min", format!("need 0 < length_min < length_max, got {lo} and {hi}")));
                }
                if self.int("resolution") < 2 {
                    d.push(self.diag("resolution", "must be at least 2".into()));
                }
                match (self.get("angle1_min"), self.get("angle1_max")) {
                    (Some(_), None) | (None, Some(_)) => {
                        d.push(self.diag("angle1_min", "give both angle1_min and angle1_max, or neither".into()))
                    }
                    (Some(_), Some(_)) if gamma.dim != 2 => {
                        d.push(self.diag("angle1_min", "end-angle maps need planar data".into()))
                    }
                    _ => {}
                }
            }
            CommandKind::Stability => {
                if !(1..=30).contains(&self.int("kmax")) {
                    d.push(self.diag("kmax", "must be between 1 and 30".into()));
                }
            }
            CommandKind::Verify => {
                let path = PathBuf::from(self.string("curve"));
                match crate::curve::read_csv(&path) {
                    Ok(c) if c.dim() != gamma.dim => d.push(self.diag(
                        "curve",
                        format!("curve is {}-dimensional but the boundary data is {}-dimensional", c.dim(), gamma.dim),
                    )),
                    Ok(_) => {}
                    Err(e) => d.push(self.diag("curve", e.to_string())),
                }
            }
            _ => {}
        }
        d
    }

    /// The resolved configuration as a JSON object (for the manifest).
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("command".into(), self.command.name().into());
        for (k, v) in &self.params {
            map.insert(k.clone(), serde_json::to_value(v).expect("plain values serialize"));
        }
        serde_json::Value::Object(map)
    }
}

/// Checks a config file on its own; the command comes from its `command`
/// entry. Returns all diagnostics (empty when the file is valid).
pub fn validate_file(path: &Path, text: &str) -> Vec<Diagnostic> {
    let command = match parse_file(path, text) {
        Ok((Some((name, line)), _)) => match CommandKind::from_name(&name) {
            Some(c) => c,
            None => {
                return vec![Diagnostic {
                    path: Some(path.to_path_buf()),
                    line: Some(line),
                    key: Some("command".into()),
                    message: format!("unknown command `{name}`"),
                }]
            }
        },
        Ok((None, _)) => {
            return vec![Diagnostic {
                path: Some(path.to_path_buf()),
                line: None,
                key: Some("command".into()),
                message: "missing `command = \"...\"` entry".into(),
            }]
        }
        Err(d) => return d,
    };
    match RunConfig::resolve(command, Some((path, text)), &[]) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(cmd: CommandKind, file: &str, cli: &[(&str, &str)]) -> Result<RunConfig, Vec<Diagnostic>> {
        let cli: Vec<(String, String)> = cli.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        RunConfig::resolve(cmd, Some((Path::new("run.toml"), file)), &cli)
    }

    #[test]
    fn precedence_is_cli_then_file_then_defaults() {
        let c = resolve(CommandKind::Concentration, "jmax = 7\nseed = 3\n", &[("jmax", "12")]).unwrap();
        assert_eq!(c.int("jmax"), 12);
        assert_eq!(c.seed(), 3);
        assert_eq!(c.segments(), 512);
        assert_eq!(c.sources["seed"], Source::File { path: "run.toml".into(), line: 2 });
    }

    #[test]
    fn unknown_and_foreign_keys_are_rejected_with_lines() {
        let err = resolve(CommandKind::Oscillation, "jmax = 5\n# note\nbogus = 1\nlambda = 2\n", &[]).unwrap_err();
        let text: Vec<String> = err.iter().map(|d| d.to_string()).collect();
        assert_eq!(text, vec!["run.toml:3: bogus: unknown key", "run.toml:4: lambda: not used by `oscillation`"]);
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let err = resolve(CommandKind::Family, "m = 0.5\nw = = 1\n", &[]).unwrap_err();
        assert_eq!(err[0].line, Some(2));
        let err = resolve(CommandKind::Family, "[section]\nm = 1\n", &[]).unwrap_err();
        assert_eq!(err[0].line, Some(1));
    }

    #[test]
    fn type_errors_name_the_expected_type() {
        let err = resolve(CommandKind::Minimize, "length = \"long\"\n", &[]).unwrap_err();
        assert!(err[0].to_string().contains("expected a number"), "{}", err[0]);
        let err = resolve(CommandKind::Minimize, "", &[("p0", "1,2,3,4")]).unwrap_err();
        assert!(err[0].to_string().starts_with("--p0: expected a vector"), "{}", err[0]);
        let err = resolve(CommandKind::Minimize, "representation = \"spline\"", &[]).unwrap_err();
        assert!(err[0].message.contains("not one of"));
    }

    #[test]
    fn vectors_accept_arrays_and_strings() {
        let c = resolve(CommandKind::Minimize, "p1 = [2, 0]\nv1 = \"0, 1\"\nlength = 3\n", &[]).unwrap();
        assert_eq!(c.get("p1"), Some(&Value::Vector(vec![2.0, 0.0])));
        assert_eq!(c.boundary().unwrap().v1, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn semantic_checks() {
        let err = resolve(CommandKind::Penalized, "lambda = -1\n", &[]).unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].message.contains("positive") && err[0].line == Some(1), "{}", err[0]);
        let err = resolve(CommandKind::Minimize, "p1 = [3, 0]\nlength = 2\n", &[]).unwrap_err();
        assert!(err[0].message.contains("infeasible"), "{}", err[0]);
        assert_eq!(err[0].line, Some(2));
        let err = resolve(CommandKind::Minimize, "", &[("n", "32")]).unwrap_err();
        assert_eq!(err[0].key.as_deref(), Some("--n"));
        assert!(resolve(CommandKind::Minimize, "", &[]).is_ok());
        let err = resolve(CommandKind::Verify, "", &[]).unwrap_err();
        assert_eq!(err[0].key.as_deref(), Some("curve"));
    }

    #[test]
    fn standalone_validation_reads_the_command() {
        let ok = "command = \"penalized\"\nlambda = 2.0\np1 = [0, 0]\nv0 = [1, 0]\nv1 = [1, 0]\n";
        assert!(validate_file(Path::new("a.toml"), ok).is_empty());
        let d = validate_file(Path::new("a.toml"), "command = \"penalized\"\nlambda = -1\n");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].to_string(), "a.toml:2: lambda: must be positive, got -1 (for lambda <= 0 minimizers need not exist)");
        assert_eq!(validate_file(Path::new("a.toml"), "n = 3").len(), 1);
        let d = validate_file(Path::new("a.toml"), "command = \"fly\"\n");
        assert!(d[0].message.contains("unknown command"));
    }

    #[test]
    fn mismatched_file_command_is_reported() {
        let err = resolve(CommandKind::Minimize, "command = \"penalized\"\n", &[]).unwrap_err();
        assert_eq!(err[0].key.as_deref(), Some("command"));
    }
}
