//! The JSON algebra document and its runtime-typed algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::EvolutionAlgebra;
use crate::error::{Error, Result};
use crate::numeric::{FieldTag, FromScalar, Rational, Scalar, ZERO_TOL};

/// Float entries with `ZERO_TOL < |a| < NEAR_ZERO_WARN` are flagged: the
/// classification treats them as nonzero.
pub const NEAR_ZERO_WARN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dimension: usize,
    pub field: String,
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// An algebra over a backend chosen at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAlgebra {
    Rational(EvolutionAlgebra<Rational>),
    Real(EvolutionAlgebra<f64>),
    Complex(EvolutionAlgebra<Complex64>),
}

impl AnyAlgebra {
    pub fn tag(&self) -> FieldTag {
        match self {
            AnyAlgebra::Rational(_) => FieldTag::Rational,
            AnyAlgebra::Real(_) => FieldTag::Real,
            AnyAlgebra::Complex(_) => FieldTag::Complex,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyAlgebra::Rational(e) => e.dim(),
            AnyAlgebra::Real(e) => e.dim(),
            AnyAlgebra::Complex(e) => e.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedAlgebra {
    pub algebra: AnyAlgebra,
    pub name: Option<String>,
    pub warnings: Vec<String>,
}

/// Parses a document; `field_override` replaces the declared field tag.
pub fn parse_algebra(text: &str, field_override: Option<FieldTag>) -> Result<ParsedAlgebra> {
    let doc: AlgebraDocument = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    from_document(&doc, field_override)
}

pub fn from_document(
    doc: &AlgebraDocument,
    field_override: Option<FieldTag>,
) -> Result<ParsedAlgebra> {
    let tag = match field_override {
        Some(tag) => tag,
        None => doc
            .field
            .parse()
            .map_err(|_| Error::Parse(format!("field: unknown field tag {:?}", doc.field)))?,
    };
    let n = doc.dimension;
    if n < 1 {
        return Err(Error::Parse("dimension: must be at least 1".into()));
    }
    if doc.matrix.len() != n {
        return Err(Error::Parse(format!(
            "matrix: has {} rows, dimension is {n}",
            doc.matrix.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for (i, row) in doc.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "matrix row {}: has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        let parsed = row
            .iter()
            .enumerate()
            .map(|(j, s)| {
                Scalar::parse(tag, s).map_err(|e| {
                    Error::Parse(format!("matrix row {}, column {}: {e}", i + 1, j + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for (j, s) in parsed.iter().enumerate() {
            let m = match s {
                Scalar::Rational(_) => continue,
                Scalar::Real(x) => x.abs(),
                Scalar::Complex(z) => z.norm(),
            };
            if m > ZERO_TOL && m < NEAR_ZERO_WARN {
                warnings.push(format!(
                    "entry a_{},{} = {} is near zero but is treated as nonzero by the classification",
                    i + 1,
                    j + 1,
                    s
                ));
            }
        }
        rows.push(parsed);
    }
    let algebra = match tag {
        FieldTag::Rational => AnyAlgebra::Rational(typed(rows)?),
        FieldTag::Real => AnyAlgebra::Real(typed(rows)?),
        FieldTag::Complex => AnyAlgebra::Complex(typed(rows)?),
    };
    Ok(ParsedAlgebra {
        algebra,
        name: doc.name.clone(),
        warnings,
    })
}

fn typed<F: FromScalar>(rows: Vec<Vec<Scalar>>) -> Result<EvolutionAlgebra<F>> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(F::from_scalar).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    EvolutionAlgebra::from_rows(rows)
}
