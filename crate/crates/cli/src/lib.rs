//! Command-line front end: argument parsing, report serialization and exit
//! codes. `run` never panics on bad input; every failure maps to an exit code.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hypersoliton::catalog::Params;
use hypersoliton::suites::{self, IdentitySuiteConfig};
use hypersoliton::{GeomError, Tolerances};
use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "hypersoliton", version, about = "Ricci soliton checks for Euclidean hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the soliton pipeline on a catalog entry.
    Verify {
        /// Catalog entry id (see `list`).
        id: String,
        /// Entry parameter as name=value; repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate every closed-form fixture against the numeric pipeline.
    Fixtures {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter of a catalog entry.
    Scan {
        id: String,
        /// Parameter to sweep.
        #[arg(long = "param", value_name = "NAME")]
        param: String,
        /// Inclusive range as start:end:steps.
        #[arg(long, value_name = "A:B:STEPS")]
        range: String,
        /// Fixed value for another parameter as name=value; repeatable.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized identity checks on seeded graph hypersurfaces.
    IdentitySuite {
        /// Perturb the identity under test (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        common: Common,
    },
    /// List catalog entries and their parameters.
    List {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "X")]
    pub tol_accept: Option<f64>,
    #[arg(long, value_name = "Y")]
    pub tol_reject: Option<f64>,
    #[arg(long, value_name = "X")]
    pub tol_fixture: Option<f64>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Geometry(GeomError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Geometry(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Geometry(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Geometry(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geometry(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl Common {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let mut t = Tolerances::default();
        for (slot, v, name) in [
            (&mut t.accept, self.tol_accept, "--tol-accept"),
            (&mut t.reject, self.tol_reject, "--tol-reject"),
            (&mut t.fixture, self.tol_fixture, "--tol-fixture"),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Usage(format!("{name} must be a positive number, got {v}")));
                }
                *slot = v;
            }
        }
        if !t.is_consistent() {
            return Err(CliError::Usage(format!(
                "tolerances must satisfy accept < reject, got {} and {}",
                t.accept, t.reject
            )));
        }
        Ok(RunConfig {
            tolerances: t,
            format: if self.csv { Format::Csv } else { Format::Json },
            seed: self.seed,
            out: self.out.clone(),
        })
    }
}

pub fn parse_assignment(s: &str) -> Result<(String, f64), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected NAME=VALUE, got '{s}'")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("'{v}' is not a number (in '{s}')")))?;
    Ok((k.trim().to_string(), v))
}

pub fn parse_params(items: &[String]) -> Result<Params, CliError> {
    let mut p = Params::new();
    for s in items {
        let (k, v) = parse_assignment(s)?;
        if p.insert(k.clone(), v).is_some() {
            return Err(CliError::Usage(format!("parameter '{k}' given twice")));
        }
    }
    Ok(p)
}

pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(CliError::Usage(format!("range must be start:end:steps, got '{s}'")));
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("'{x}' is not a number in range '{s}'")))
    };
    let steps: usize = n
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("'{n}' is not a step count in range '{s}'")))?;
    suites::scan_values(num(a)?, num(b)?, steps).map_err(|e| CliError::Usage(e.to_string()))
}

/// Text form of a float in reports: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rewrites every non-integer number with 17 significant digits so that
/// output is byte-stable; non-finite values are already `null`.
fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => match n.as_f64() {
            Some(x) if x.is_finite() => {
                Value::Number(format_float(x).parse::<Number>().expect("formatted float is valid JSON"))
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// `{"schema": 1, "command": …, <extra>…, "report": …}`
pub fn json_document<T: Serialize>(command: &str, cfg: &RunConfig, report: &T) -> Result<String, CliError> {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::from(SCHEMA_VERSION));
    doc.insert("command".into(), Value::from(command));
    doc.insert("seed".into(), Value::from(cfg.seed));
    let err = |e: serde_json::Error| CliError::Io(e.to_string());
    doc.insert("tolerances".into(), serde_json::to_value(cfg.tolerances).map_err(err)?);
    doc.insert("report".into(), serde_json::to_value(report).map_err(err)?);
    let text = serde_json::to_string_pretty(&normalize_floats(Value::Object(doc)))
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(text + "\n")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

struct Outcome {
    text: String,
    code: i32,
    messages: Vec<String>,
}

fn cmd_verify(id: &str, params: &[String], cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = parse_params(params)?;
    let rep = suites::verify(id, &p, &cfg.tolerances)?;
    let s = &rep.soliton;
    let text = match cfg.format {
        Format::Json => json_document("verify", cfg, &rep)?,
        Format::Csv => csv_text(
            &[
                "id",
                "params",
                "lambda_star",
                "residual_max",
                "verdict",
                "classification",
                "identity_max",
                "prop41_ok",
                "expected_verdict",
                "expected_lambda",
                "expectation_met",
            ],
            &[vec![
                rep.id.clone(),
                rep.params
                    .iter()
                    .map(|(k, v)| format!("{k}={}", format_float(*v)))
                    .collect::<Vec<_>>()
                    .join(";"),
                format_float(s.lambda_star),
                format_float(s.residual_max),
                s.verdict.as_str().into(),
                s.classification.map(|c| c.as_str().to_string()).unwrap_or_default(),
                format_float(s.identity_max),
                s.prop41.as_ref().map(|p| p.all_ok.to_string()).unwrap_or_default(),
                serde_json::to_value(rep.expectation.verdict)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                opt_float(rep.expectation.lambda),
                rep.expectation_met.to_string(),
            ]],
        )?,
    };
    let mut messages = Vec::new();
    if let Some(c) = &rep.claim_check {
        messages.push(format!("claim vs oracle ({}): {}", c.source, c.note));
    }
    if !rep.expectation_met {
        messages.push(format!(
            "{id}: verdict {} does not match the expected outcome",
            s.verdict.as_str()
        ));
    }
    Ok(Outcome {
        text,
        code: if rep.expectation_met { EXIT_PASS } else { EXIT_PROPERTY },
        messages,
    })
}

fn cmd_fixtures(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = suites::fixture_table(cfg.seed, &cfg.tolerances)?;
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| format!("{} failed: {:e}", r.id, r.value)).collect();
    let text = match cfg.format {
        Format::Json => json_document("fixtures", cfg, &rows)?,
        Format::Csv => csv_text(
            &["id", "kind", "value", "threshold", "passed", "description"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.id.clone(),
                        serde_json::to_value(r.kind)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_string))
                            .unwrap_or_default(),
                        format_float(r.value),
                        opt_float(r.threshold),
                        r.passed.to_string(),
                        r.description.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome {
        text,
        code: if failed.is_empty() { EXIT_PASS } else { EXIT_PROPERTY },
        messages: failed,
    })
}

fn cmd_scan(id: &str, param: &str, range: &str, set: &[String], cfg: &RunConfig) -> Result<Outcome, CliError> {
    let values = parse_range(range)?;
    let base = parse_params(set)?;
    if base.contains_key(param) {
        return Err(CliError::Usage(format!("'{param}' is both scanned and fixed")));
    }
    let rows = suites::scan(id, &base, param, &values, &cfg.tolerances)?;
    let text = match cfg.format {
        Format::Json => json_document("scan", cfg, &rows)?,
        Format::Csv => csv_text(
            &[param, "lambda_star", "residual_max", "verdict"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        format_float(r.value),
                        format_float(r.lambda_star),
                        format_float(r.residual_max),
                        r.verdict.as_str().to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome {
        text,
        code: EXIT_PASS,
        messages: Vec::new(),
    })
}

fn cmd_identity_suite(inject_fault: bool, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let suite_cfg = IdentitySuiteConfig {
        seed: cfg.seed,
        inject_fault,
        ..Default::default()
    };
    let rep = suites::identity_suite(&suite_cfg, &cfg.tolerances)?;
    let text = match cfg.format {
        Format::Json => json_document("identity-suite", cfg, &rep)?,
        Format::Csv => csv_text(
            &["check", "max", "threshold", "passed"],
            &rep.checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.to_string(),
                        format_float(c.max),
                        format_float(c.threshold),
                        c.passed.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    let messages = rep
        .failures()
        .iter()
        .map(|c| format!("{} failed: max {:e} exceeds {:e}", c.name, c.max, c.threshold))
        .collect();
    Ok(Outcome {
        text,
        code: if rep.passed { EXIT_PASS } else { EXIT_PROPERTY },
        messages,
    })
}

fn cmd_list(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let entries = hypersoliton::catalog::list_entries();
    let text = match cfg.format {
        Format::Json => json_document("list", cfg, &entries)?,
        Format::Csv => csv_text(
            &["id", "params", "source", "summary"],
            &entries
                .iter()
                .map(|e| {
                    vec![
                        e.id.to_string(),
                        e.params.iter().map(|p| p.name).collect::<Vec<_>>().join(";"),
                        e.source.to_string(),
                        e.summary.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    Ok(Outcome {
        text,
        code: EXIT_PASS,
        messages: Vec::new(),
    })
}

fn dispatch(cli: &Cli) -> Result<(RunConfig, Outcome), CliError> {
    let common = match &cli.command {
        Command::Verify { common, .. }
        | Command::Fixtures { common }
        | Command::Scan { common, .. }
        | Command::IdentitySuite { common, .. }
        | Command::List { common } => common,
    };
    let cfg = common.config()?;
    let out = match &cli.command {
        Command::Verify { id, params, .. } => cmd_verify(id, params, &cfg)?,
        Command::Fixtures { .. } => cmd_fixtures(&cfg)?,
        Command::Scan { id, param, range, set, .. } => cmd_scan(id, param, range, set, &cfg)?,
        Command::IdentitySuite { inject_fault, .. } => cmd_identity_suite(*inject_fault, &cfg)?,
        Command::List { .. } => cmd_list(&cfg)?,
    };
    Ok((cfg, out))
}

/// Parses `args` (program name first), runs the command, writes the report
/// to `stdout` or `--out`, diagnostics to `stderr`, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((cfg, out)) => {
            for m in &out.messages {
                let _ = writeln!(stderr, "{m}");
            }
            match emit(&cfg, &out.text, stdout) {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "{e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_and_ranges() {
        assert_eq!(parse_assignment("r=2.5").unwrap(), ("r".into(), 2.5));
        assert!(parse_assignment("r").is_err());
        assert!(parse_assignment("r=x").is_err());
        assert!(parse_params(&["r=1".into(), "r=2".into()]).is_err());
        assert_eq!(parse_range("1:3:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_range("1:3").is_err());
        assert!(parse_range("1:3:0").is_err());
        assert!(parse_range("a:3:2").is_err());
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.25), "2.5000000000000000e-1");
        let v = normalize_floats(serde_json::json!({"a": 0.1, "b": 3, "c": [1.5]}));
        assert_eq!(v.to_string(), r#"{"a":1.0000000000000001e-1,"b":3,"c":[1.5000000000000000e+0]}"#);
    }

    #[test]
    fn inconsistent_tolerances_are_usage_errors() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            ["hypersoliton", "verify", "hyperplane", "--tol-accept", "0.1", "--tol-reject", "0.01"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_USAGE);
    }
}
