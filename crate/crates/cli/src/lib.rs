//! `deligne` command line. [`run`] returns the exit code and the full output so
//! the binary and the tests share one code path.
//!
//! Exit codes: 0 success, 1 domain or usage error, 2 failed certificate.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use deligne_core::checker::{self, Certificate};
use deligne_core::expr::{format_class, parse_class};
use deligne_core::lfactor::{l_class, l_pair, EulerFactor};
use deligne_core::weil_model::ModelConfig;
use deligne_core::{cv_map, DeligneClass, Error, WeilModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CERT_FAILED: i32 = 2;

const DEFAULT_SEED: u64 = 0;
const DEFAULT_MAX_LEN: u32 = 3;
const DEFAULT_MAX_PARTS: u64 = 3;
const SEMIRING_TRIALS: u64 = 1000;
const EXCLUSION_MAX_J: u32 = 3;

#[derive(Parser, Debug)]
#[command(name = "deligne", version, about = "Deligne representations over finite atom models")]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

/// Global options. Without `--model` every command uses M0, except `check`
/// which runs on all built-in models.
#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Model JSON file, or one of the built-in names m0, m1, m2
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Longest segment in bounded enumerations
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: u32,
    /// Most summands in bounded enumerations
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PARTS)]
    pub max_parts: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model operations
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Canonical form of an expression
    Eval { expr: String },
    Cv { expr: String },
    CvInv { expr: String },
    Tensor { x: String, y: String },
    Dual { expr: String },
    Lfactor { expr: String },
    Lpair { x: String, y: String },
    /// Run a verification suite and print its certificates
    Check { suite: Suite },
}

#[derive(Subcommand, Debug)]
enum ModelAction {
    Validate,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum Suite {
    All,
    PropObservation1,
    ForcedCv,
    SemiringCorollary,
    ImageExclusion,
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn load_model(source: &str) -> Result<WeilModel, Failure> {
    if let Some(m) = WeilModel::builtin(&source.to_ascii_lowercase()) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(source).map_err(|e| Failure::Io(format!("{source}: {e}")))?;
    Ok(ModelConfig::from_json(&text)?.build()?)
}

fn error_output(f: &Failure, as_json: bool) -> String {
    let (code, message) = match f {
        Failure::Domain(e) => (e.code(), e.to_string()),
        Failure::Io(msg) => ("Io", msg.clone()),
    };
    if as_json {
        json!({ "error": { "code": code, "message": message } }).to_string() + "\n"
    } else {
        format!("error[{code}]: {message}\n")
    }
}

fn result_output(text: String, extra: Option<Value>, as_json: bool) -> String {
    if as_json {
        let mut v = json!({ "result": text });
        if let Some(Value::Object(m)) = extra {
            v.as_object_mut().unwrap().extend(m);
        }
        v.to_string() + "\n"
    } else {
        text + "\n"
    }
}

fn factor_output(f: &EulerFactor, as_json: bool) -> String {
    result_output(f.to_string(), Some(json!({ "factor": f.to_json() })), as_json)
}

fn class_output(model: &WeilModel, x: &DeligneClass, as_json: bool) -> String {
    result_output(format_class(model, x), None, as_json)
}

fn certificates(cfg: &CliConfig, suite: Suite) -> Result<Vec<Certificate>, Failure> {
    let models = match &cfg.model {
        Some(source) => vec![load_model(source)?],
        None => vec![WeilModel::m0(), WeilModel::m1(), WeilModel::m2()],
    };
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut out = Vec::new();
    for m in &models {
        if wants(Suite::PropObservation1) {
            for line in m.lines() {
                out.push(checker::check_prop_observation1(m, line.anchor())?);
            }
        }
        if wants(Suite::ForcedCv) {
            out.push(checker::derive_forced_cv(m, cfg.max_len, cfg.max_parts)?.certificate);
        }
        if wants(Suite::SemiringCorollary) {
            out.push(checker::check_semiring_corollary(m, SEMIRING_TRIALS, cfg.seed)?);
        }
        if wants(Suite::ImageExclusion) {
            out.push(checker::check_image_exclusion(m, EXCLUSION_MAX_J)?);
        }
    }
    Ok(out)
}

fn certificate_text(c: &Certificate) -> String {
    let verdict = if c.pass { "PASS" } else { "FAIL" };
    let counts: Vec<String> = c.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut s = format!("{verdict} {} model={} bounds={} {}", c.statement, c.model, c.bounds, counts.join(" "));
    if let Some(x) = &c.counterexample {
        s.push_str(&format!("\n  counterexample: {x}"));
    }
    s
}

fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    let cfg = &cli.config;
    let js = cfg.json;
    if let Command::Check { suite } = cli.command {
        let certs = certificates(cfg, suite)?;
        let code = if certs.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_CERT_FAILED };
        let mut text = String::new();
        for c in &certs {
            text.push_str(&if js { c.to_json_line() } else { certificate_text(c) });
            text.push('\n');
        }
        return Ok((code, text));
    }
    let model = match &cfg.model {
        Some(source) => load_model(source)?,
        None => WeilModel::m0(),
    };
    let parse = |s: &str| parse_class(&model, s);
    let out = match &cli.command {
        Command::Model { action: ModelAction::Validate } => {
            let report = model.validate();
            if !report.is_ok() {
                return Err(Error::InvalidModel(report).into());
            }
            let summary = format!("ok: {} atoms, {} lines", model.num_atoms(), model.lines().len());
            result_output(summary, None, js)
        }
        Command::Eval { expr } => class_output(&model, &parse(expr)?, js),
        Command::Cv { expr } => class_output(&model, &cv_map::cv(&model, &parse(expr)?)?, js),
        Command::CvInv { expr } => class_output(&model, &cv_map::cv_inverse(&model, &parse(expr)?)?, js),
        Command::Tensor { x, y } => class_output(&model, &parse(x)?.tensor(&parse(y)?, &model)?, js),
        Command::Dual { expr } => class_output(&model, &parse(expr)?.dual(&model), js),
        Command::Lfactor { expr } => factor_output(&l_class(&model, &parse(expr)?), js),
        Command::Lpair { x, y } => factor_output(&l_pair(&model, &parse(x)?, &parse(y)?)?, js),
        Command::Check { .. } => unreachable!(),
    };
    Ok((EXIT_OK, out))
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<S: AsRef<str>>(argv: &[S]) -> (i32, String) {
    let args = argv.iter().map(|s| s.as_ref().to_string());
    let as_json = argv.iter().any(|s| s.as_ref() == "--json");
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (EXIT_OK, e.to_string());
            }
            let msg = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let out = if as_json {
                json!({ "error": { "code": "UsageError", "message": msg } }).to_string() + "\n"
            } else {
                e.to_string()
            };
            return (EXIT_ERROR, out);
        }
    };
    match execute(&cli) {
        Ok(r) => r,
        Err(f) => (EXIT_ERROR, error_output(&f, as_json)),
    }
}
