//! Python bindings. An `Algebra` wraps a validated algebra document; each
//! method runs the matching command and returns its report as a `dict`.

use nilevo::cli::{
    evaluate, parse_algebra, AnyAlgebra, Cli, CliError, Command, Options, Output, Report,
};
use nilevo::exp_group::quotient_report;
use nilevo::FieldTag;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyFloat, PyTuple};

create_exception!(
    nilevo,
    NilevoError,
    PyValueError,
    "Base class for errors raised by nilevo."
);
create_exception!(
    nilevo,
    UsageError,
    NilevoError,
    "Malformed input: a document, parameter or option."
);
create_exception!(
    nilevo,
    DomainError,
    NilevoError,
    "Well-formed input outside the classified domain."
);

fn to_py_err(e: CliError) -> PyErr {
    match e {
        CliError::Usage(msg) => UsageError::new_err(msg),
        CliError::Domain(e) => DomainError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn report_to_py<'py>(py: Python<'py>, report: &Report) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &report.to_json())
}

/// Field literal for one matrix entry or parameter. Strings pass through and
/// Python complex numbers become `a+bi`. Over the rationals a float is read
/// as its shortest decimal repr, so `0.3` becomes `3/10`.
fn literal(value: &Bound<'_, PyAny>, field: FieldTag) -> PyResult<String> {
    if let Ok(s) = value.extract::<String>() {
        return Ok(s);
    }
    if let Ok(z) = value.cast::<PyComplex>() {
        return Ok(format!("{}{:+}i", z.real(), z.imag()));
    }
    if field == FieldTag::Rational && value.is_instance_of::<PyFloat>() {
        let fraction = value
            .py()
            .import("fractions")?
            .getattr("Fraction")?
            .call1((value.repr()?,))?;
        return Ok(fraction.str()?.to_string());
    }
    Ok(value.str()?.to_string())
}

/// An evolution algebra given by its structure matrix, row `i` holding the
/// coordinates of `e_i²`.
#[pyclass(frozen, module = "nilevo")]
struct Algebra {
    document: String,
    algebra: AnyAlgebra,
}

impl Algebra {
    fn from_document(document: String) -> PyResult<Self> {
        let parsed = parse_algebra(&document, None).map_err(|e| to_py_err(e.into()))?;
        Ok(Self {
            document,
            algebra: parsed.algebra,
        })
    }

    fn param(&self, value: Option<&Bound<'_, PyAny>>) -> PyResult<Option<String>> {
        value.map(|v| literal(v, self.algebra.tag())).transpose()
    }

    fn run(&self, command: Command, options: Options) -> PyResult<Output> {
        evaluate(&Cli { command, options }, &self.document).map_err(to_py_err)
    }

    fn report<'py>(
        &self,
        py: Python<'py>,
        command: Command,
        options: Options,
    ) -> PyResult<Bound<'py, PyAny>> {
        match self.run(command, options)? {
            Output::Report { report, .. }
            | Output::Csv {
                summary: report, ..
            } => report_to_py(py, &report),
        }
    }
}

#[pymethods]
impl Algebra {
    /// `Algebra(matrix, field="rational", name=None)`. Entries may be strings
    /// in the field's literal syntax (`"3/4"`, `"1.5"`, `"2-1i"`) or Python
    /// numbers.
    #[new]
    #[pyo3(signature = (matrix, field = "rational", name = None))]
    fn new(
        matrix: Vec<Vec<Bound<'_, PyAny>>>,
        field: &str,
        name: Option<String>,
    ) -> PyResult<Self> {
        let tag = match field {
            "real" => FieldTag::Real,
            "complex" => FieldTag::Complex,
            _ => FieldTag::Rational,
        };
        let rows = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| literal(x, tag))
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        let mut doc =
            serde_json::json!({ "dimension": rows.len(), "field": field, "matrix": rows });
        if let Some(name) = name {
            doc["name"] = name.into();
        }
        Self::from_document(doc.to_string())
    }

    /// Parses an algebra document (JSON text).
    #[staticmethod]
    fn from_json(text: String) -> PyResult<Self> {
        Self::from_document(text)
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.algebra.dim()
    }

    #[getter]
    fn field(&self) -> &'static str {
        match self.algebra.tag() {
            FieldTag::Rational => "rational",
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        }
    }

    fn to_json(&self) -> String {
        self.document.clone()
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        self.report(py, Command::Classify, Options::default())
    }

    /// Derivation space; with any parameter also a sample derivation and,
    /// with `m`, its closed-form power.
    #[pyo3(signature = (alpha = None, beta = None, m = None))]
    fn derivations<'py>(
        &self,
        py: Python<'py>,
        alpha: Option<&Bound<'_, PyAny>>,
        beta: Option<&Bound<'_, PyAny>>,
        m: Option<u32>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let options = Options {
            alpha: self.param(alpha)?,
            beta: self.param(beta)?,
            m,
            ..Options::default()
        };
        self.report(py, Command::Derive, options)
    }

    #[pyo3(signature = (alpha = None, beta = None))]
    fn automorphisms<'py>(
        &self,
        py: Python<'py>,
        alpha: Option<&Bound<'_, PyAny>>,
        beta: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let options = Options {
            alpha: self.param(alpha)?,
            beta: self.param(beta)?,
            ..Options::default()
        };
        self.report(py, Command::Aut, options)
    }

    #[pyo3(signature = (alpha = None, beta = None, tol = None))]
    fn exp<'py>(
        &self,
        py: Python<'py>,
        alpha: Option<&Bound<'_, PyAny>>,
        beta: Option<&Bound<'_, PyAny>>,
        tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let options = Options {
            alpha: self.param(alpha)?,
            beta: self.param(beta)?,
            tol,
            ..Options::default()
        };
        self.report(py, Command::Exp, options)
    }

    /// Index of `exp(Der(E))` in `Aut(E)` over this algebra's field.
    fn quotient<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = match &self.algebra {
            AnyAlgebra::Rational(e) => quotient_report(e, FieldTag::Rational),
            AnyAlgebra::Real(e) => quotient_report(e, FieldTag::Real),
            AnyAlgebra::Complex(e) => quotient_report(e, FieldTag::Complex),
        }
        .map_err(|e| to_py_err(e.into()))?;
        json_to_py(
            py,
            &serde_json::to_string(&report).expect("quotient report serializes"),
        )
    }

    /// Runs the invariant suite; `report["results"]["all_passed"]` holds the
    /// verdict.
    #[pyo3(signature = (seed = None))]
    fn verify<'py>(&self, py: Python<'py>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        self.report(
            py,
            Command::Verify,
            Options {
                seed,
                ..Options::default()
            },
        )
    }

    /// Integrates `x' = Dx`; returns `(csv, summary)`.
    #[pyo3(signature = (alpha = None, beta = None, t = None, steps = None, x0 = None))]
    fn ode<'py>(
        &self,
        py: Python<'py>,
        alpha: Option<&Bound<'_, PyAny>>,
        beta: Option<&Bound<'_, PyAny>>,
        t: Option<f64>,
        steps: Option<usize>,
        x0: Option<Vec<f64>>,
    ) -> PyResult<Bound<'py, PyTuple>> {
        let options = Options {
            alpha: self.param(alpha)?,
            beta: self.param(beta)?,
            t,
            steps,
            x0: x0.map(|v| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
            ..Options::default()
        };
        match self.run(Command::Ode, options)? {
            Output::Csv { csv, summary } => PyTuple::new(
                py,
                [
                    csv.into_pyobject(py)?.into_any(),
                    report_to_py(py, &summary)?,
                ],
            ),
            Output::Report { .. } => unreachable!("ode emits CSV"),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Algebra(dimension={}, field={:?})",
            self.algebra.dim(),
            self.field()
        )
    }
}

/// Runs the command-line interface in-process; returns `(code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let outcome = nilevo::cli::run(std::iter::once("nilevo".to_string()).chain(args));
    (outcome.code, outcome.stdout, outcome.stderr)
}

#[pyfunction]
fn max_nilpotency_index(n: usize) -> u64 {
    nilevo::max_nilpotency_index(n)
}

#[pymodule]
#[pyo3(name = "nilevo")]
fn nilevo_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Algebra>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(max_nilpotency_index, m)?)?;
    m.add("NilevoError", py.get_type::<NilevoError>())?;
    m.add("UsageError", py.get_type::<UsageError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
