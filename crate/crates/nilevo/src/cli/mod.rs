//! Command-line surface. Every command reads one algebra document and emits a
//! JSON report with sorted keys; `ode` emits its trajectory as CSV instead.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.

mod commands;
pub mod document;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::EvolutionAlgebra;
use crate::error::Error;
use crate::linalg::LinearMap;
use crate::numeric::{Field, FieldTag, FromScalar, Scalar};

pub use document::{parse_algebra, AlgebraDocument, AnyAlgebra, ParsedAlgebra};
pub use verify::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nilevo",
    version,
    about = "Nilpotent evolution algebras of maximal index"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Canonical form, rank, nilpotency index, I_A and eta
    Classify,
    /// Der(E): case, dimension and basis; a sample derivation and its m-th power
    Derive,
    /// Aut(E): eta, root-of-unity constraint and a sample automorphism
    Aut,
    /// Closed-form and series exponentials of a derivation
    Exp,
    /// Run the full invariant suite
    Verify,
    /// Trajectory of x' = Dx as CSV
    Ode,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Derive => "derive",
            Command::Aut => "aut",
            Command::Exp => "exp",
            Command::Verify => "verify",
            Command::Ode => "ode",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Options {
    /// Algebra document (JSON)
    #[arg(long, global = true)]
    pub algebra: Option<PathBuf>,
    /// Override the document's field: rational | real | complex
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldTag>,
    /// Derivation or automorphism parameter alpha, in the algebra's field
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Parameter beta, in the algebra's field
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    /// Power of the sample derivation (derive)
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Final time (ode)
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Integrator steps (ode)
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Initial state as comma-separated reals (ode); defaults to all ones
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    /// Sampling seed (verify)
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Series tolerance and membership residual (exp)
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Report destination; standard output when absent
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => CliError::Usage(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced, before routing to files or streams.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report { report: Report, passed: bool },
    Csv { csv: String, summary: Report },
}

/// Captured streams and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    match execute(cli) {
        Ok(Output::Report { report, passed }) => {
            let code = if passed { EXIT_OK } else { EXIT_DOMAIN };
            deliver(cli, report.to_json(), String::new(), code)
        }
        Ok(Output::Csv { csv, summary }) => deliver(cli, csv, summary.to_json(), EXIT_OK),
        Err(CliError::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(CliError::Domain(e)) => {
            let report = Report {
                command: cli.command.as_str().into(),
                inputs: inputs(&cli.options),
                results: json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
                warnings: Vec::new(),
            };
            deliver(cli, report.to_json(), format!("error: {e}\n"), EXIT_DOMAIN)
        }
    }
}

fn deliver(cli: &Cli, body: String, stderr: String, code: i32) -> Outcome {
    match &cli.options.out {
        None => Outcome {
            code,
            stdout: body,
            stderr,
        },
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Outcome {
                code: EXIT_DOMAIN,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BackendMismatch { .. } => "backend_mismatch",
        Error::UnsupportedBackend(_) => "unsupported_backend",
        Error::Domain(_) => "domain",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::DegenerateNorm => "degenerate_norm",
        Error::NotClassified(_) => "not_classified",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::NotApplicable(_) => "not_applicable",
        Error::Singular => "singular",
        Error::Branch(_) => "branch",
        Error::SeriesCap(_) => "series_cap",
        Error::Parse(_) => "parse",
    }
}

fn inputs(options: &Options) -> Value {
    serde_json::to_value(options).expect("options serialize")
}

pub fn execute(cli: &Cli) -> CliResult<Output> {
    let path = cli
        .options
        .algebra
        .as_ref()
        .ok_or_else(|| CliError::Usage("--algebra <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    evaluate(cli, &text)
}

/// Runs `cli.command` on an algebra document given as text; `--algebra` and
/// `--out` are not consulted.
pub fn evaluate(cli: &Cli, document: &str) -> CliResult<Output> {
    let parsed = parse_algebra(document, cli.options.field)?;
    let mut ctx = Context {
        options: &cli.options,
        source: parsed.algebra.tag(),
        warnings: parsed.warnings.clone(),
    };
    let mut meta = json!({
        "dimension": parsed.algebra.dim(),
        "field": parsed.algebra.tag(),
    });
    if let Some(name) = &parsed.name {
        meta["name"] = json!(name);
    }

    let (mut results, passed) = match cli.command {
        Command::Classify => (commands::classify(&parsed.algebra), true),
        Command::Derive => (commands::derive(&mut ctx, &parsed.algebra)?, true),
        Command::Aut => (commands::aut(&mut ctx, &parsed.algebra)?, true),
        Command::Exp => (commands::exp(&mut ctx, &parsed.algebra)?, true),
        Command::Verify => verify::verify(&mut ctx, &parsed.algebra)?,
        Command::Ode => {
            let (csv, summary) = commands::ode(&mut ctx, &parsed.algebra)?;
            let summary = report(cli, merge(meta, summary), ctx.warnings);
            return Ok(Output::Csv { csv, summary });
        }
    };
    results = merge(meta, results);
    Ok(Output::Report {
        report: report(cli, results, ctx.warnings),
        passed,
    })
}

fn report(cli: &Cli, results: Value, warnings: Vec<String>) -> Report {
    Report {
        command: cli.command.as_str().into(),
        inputs: inputs(&cli.options),
        results,
        warnings,
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

/// Per-invocation state shared by the commands.
pub(crate) struct Context<'a> {
    pub options: &'a Options,
    /// Field the document was parsed in; parameters are read in this field.
    pub source: FieldTag,
    pub warnings: Vec<String>,
}

impl Context<'_> {
    /// Parses a parameter in the source field and lifts it into `F`.
    pub fn param<F: FromScalar>(&self, text: Option<&str>, default: i64) -> CliResult<F> {
        let Some(text) = text else {
            return Ok(F::from_i64(default));
        };
        let s = Scalar::parse(self.source, text).map_err(|e| CliError::Usage(format!("{e}")))?;
        Ok(F::from_scalar(&lift(s, F::TAG)?)?)
    }
}

/// Embeds `Q ⊂ R ⊂ C`.
pub(crate) fn lift(s: Scalar, target: FieldTag) -> crate::error::Result<Scalar> {
    use num_traits::ToPrimitive;
    let to_f64 = |q: &crate::numeric::Rational| q.to_f64().unwrap_or(f64::NAN);
    Ok(match (s, target) {
        (s, t) if s.tag() == t => s,
        (Scalar::Rational(q), FieldTag::Real) => Scalar::Real(to_f64(&q)),
        (Scalar::Rational(q), FieldTag::Complex) => {
            Scalar::Complex(Complex64::new(to_f64(&q), 0.0))
        }
        (Scalar::Real(x), FieldTag::Complex) => Scalar::Complex(Complex64::new(x, 0.0)),
        (s, t) => {
            return Err(Error::BackendMismatch {
                left: t,
                right: s.tag(),
            })
        }
    })
}

/// Algebras over a field with `exp`.
pub(crate) enum ExpAlgebra {
    Real(EvolutionAlgebra<f64>),
    Complex(EvolutionAlgebra<Complex64>),
}

pub(crate) fn promote(ctx: &mut Context<'_>, any: &AnyAlgebra, purpose: &str) -> ExpAlgebra {
    use num_traits::ToPrimitive;
    match any {
        AnyAlgebra::Rational(e) => {
            ctx.warnings.push(format!(
                "rational algebra promoted to the real backend for {purpose}"
            ));
            ExpAlgebra::Real(e.map_field(|q| q.to_f64().unwrap_or(f64::NAN)))
        }
        AnyAlgebra::Real(e) => ExpAlgebra::Real(e.clone()),
        AnyAlgebra::Complex(e) => ExpAlgebra::Complex(e.clone()),
    }
}

pub(crate) fn matrix_json<F: Field>(m: &LinearMap<F>) -> Value {
    json!(m
        .rows()
        .iter()
        .map(|r| r.iter().map(Field::encode).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}
