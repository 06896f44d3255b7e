//! File formats shared with the CLI: JSON documents for forms and algebras.
//!
//! A form document lists `dimension`, `degree`, and `terms` of
//! `{indices, coeff}` with strictly increasing indices. An algebra document
//! carries either a `salamon` string or an explicit `differentials` list of
//! `{k, terms: [{i, j, coeff}]}` entries with `i < j`. Unknown fields are
//! rejected so typos fail loudly instead of being ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{ExteriorError, Form};
use crate::lie_model::{LieAlgebra, LieModelError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    WriteFailed {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}: term {indices:?} has {got} indices but the document declares degree {degree}")]
    TermDegree {
        path: String,
        indices: Vec<u8>,
        got: usize,
        degree: usize,
    },
    #[error("{path}: indices {indices:?} must be strictly increasing within 1..=dimension")]
    BadIndices { path: String, indices: Vec<u8> },
    #[error("{path}: differential term ({i}, {j}) must have i < j")]
    BadPair { path: String, i: u8, j: u8 },
    #[error("{path}: covector index k = {k} must lie in 1..=6")]
    BadCovector { path: String, k: u8 },
    #[error("{path}: covector k = {k} appears twice")]
    DuplicateCovector { path: String, k: u8 },
    #[error("{path}: exactly one of `salamon` or `differentials` must be present")]
    AmbiguousAlgebra { path: String },
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    LieModel(#[from] LieModelError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormDoc {
    dimension: usize,
    degree: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    indices: Vec<u8>,
    coeff: f64,
}

/// Parses a form document; `label` names the source in diagnostics.
pub fn form_from_json(label: &str, text: &str) -> Result<Form, IoError> {
    let doc: FormDoc = serde_json::from_str(text).map_err(|e| IoError::Malformed {
        path: label.to_string(),
        message: e.to_string(),
    })?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for term in &doc.terms {
        if term.indices.len() != doc.degree {
            return Err(IoError::TermDegree {
                path: label.to_string(),
                indices: term.indices.clone(),
                got: term.indices.len(),
                degree: doc.degree,
            });
        }
        let increasing = term.indices.windows(2).all(|w| w[0] < w[1])
            && term
                .indices
                .iter()
                .all(|&i| i >= 1 && (i as usize) <= doc.dimension);
        if !increasing {
            return Err(IoError::BadIndices {
                path: label.to_string(),
                indices: term.indices.clone(),
            });
        }
        terms.push((term.indices.as_slice(), term.coeff));
    }
    Ok(Form::from_terms(doc.dimension, doc.degree, &terms)?)
}

/// Serializes a form as a document (zero coefficients omitted).
pub fn form_to_json(form: &Form) -> String {
    let doc = FormDoc {
        dimension: form.dim(),
        degree: form.degree(),
        terms: form
            .terms()
            .filter(|(_, coeff)| *coeff != 0.0)
            .map(|(mi, coeff)| TermDoc {
                indices: mi.indices().to_vec(),
                coeff,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn read_form(path: &Path) -> Result<Form, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    form_from_json(&path.display().to_string(), &text)
}

pub fn write_form(path: &Path, form: &Form) -> Result<(), IoError> {
    std::fs::write(path, form_to_json(form) + "\n").map_err(|source| IoError::WriteFailed {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    salamon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    differentials: Option<Vec<DifferentialDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DifferentialDoc {
    k: u8,
    terms: Vec<PairTermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairTermDoc {
    i: u8,
    j: u8,
    coeff: f64,
}

/// Parses an algebra document (either representation); Jacobi and shape
/// checks run exactly as for programmatic construction.
pub fn algebra_from_json(label: &str, text: &str) -> Result<LieAlgebra, IoError> {
    let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| IoError::Malformed {
        path: label.to_string(),
        message: e.to_string(),
    })?;
    match (doc.salamon, doc.differentials) {
        (Some(s), None) => Ok(LieAlgebra::parse_salamon(&s)?),
        (None, Some(diffs)) => {
            let mut d1: Vec<Form> = (0..6).map(|_| Form::zero(6, 2)).collect::<Result<_, _>>()?;
            let mut seen = [false; 6];
            for diff in &diffs {
                if !(1..=6).contains(&diff.k) {
                    return Err(IoError::BadCovector {
                        path: label.to_string(),
                        k: diff.k,
                    });
                }
                let slot = diff.k as usize - 1;
                if seen[slot] {
                    return Err(IoError::DuplicateCovector {
                        path: label.to_string(),
                        k: diff.k,
                    });
                }
                seen[slot] = true;
                let mut terms = Vec::with_capacity(diff.terms.len());
                for t in &diff.terms {
                    if t.i >= t.j {
                        return Err(IoError::BadPair {
                            path: label.to_string(),
                            i: t.i,
                            j: t.j,
                        });
                    }
                    terms.push(([t.i, t.j], t.coeff));
                }
                let pairs: Vec<(&[u8], f64)> =
                    terms.iter().map(|(ij, c)| (&ij[..], *c)).collect();
                d1[slot] = Form::from_terms(6, 2, &pairs)?;
            }
            Ok(LieAlgebra::from_d1(d1)?)
        }
        _ => Err(IoError::AmbiguousAlgebra {
            path: label.to_string(),
        }),
    }
}

/// Serializes an algebra in the compact notation.
pub fn algebra_to_json(algebra: &LieAlgebra) -> String {
    let doc = AlgebraDoc {
        salamon: Some(algebra.to_salamon()),
        differentials: None,
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn read_algebra(path: &Path) -> Result<LieAlgebra, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    algebra_from_json(&path.display().to_string(), &text)
}

pub fn write_algebra(path: &Path, algebra: &LieAlgebra) -> Result<(), IoError> {
    std::fs::write(path, algebra_to_json(algebra) + "\n").map_err(|source| IoError::WriteFailed {
        path: path.display().to_string(),
        source,
    })
}
