//! Matrix sources: builtin constructors, matrix files and list files.

use std::f64::consts::PI;
use std::fs;

use mubeq::basis::fourier_matrix;
use mubeq::dim4::{f4, h4, TripleParams};
use mubeq::linalg::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk form of a single matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixDocument {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.n == 0 {
            return Err(CliError::invalid("matrix document has n = 0"));
        }
        if self.matrix.len() != self.n || self.matrix.iter().any(|row| row.len() != self.n) {
            return Err(CliError::invalid(format!(
                "matrix document declares n = {} but the matrix is not {0} x {0}",
                self.n
            )));
        }
        let rows: Vec<Vec<C64>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        Ok(ComplexMatrix::from_rows(&rows)?)
    }
}

#[derive(Deserialize)]
struct ListDocument {
    bases: Vec<ListEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ListEntry {
    Source(String),
    Inline(MatrixDocument),
}

/// Parses an angle in radians: a decimal number or a multiple of `pi`
/// such as `pi`, `-pi/2`, `3pi/4` or `0.5*pi`.
pub fn parse_angle(text: &str) -> Result<f64, CliError> {
    let bad = || CliError::invalid(format!("cannot parse angle '{text}'"));
    let t = text.trim();
    let Some(at) = t.find("pi") else {
        let value: f64 = t.parse().map_err(|_| bad())?;
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(bad())
        };
    };
    let coefficient = t[..at].trim().trim_end_matches('*').trim();
    let coefficient = match coefficient {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[at + 2..].trim();
    let denominator = match rest.strip_prefix('/') {
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if denominator == 0.0 || !coefficient.is_finite() || !denominator.is_finite() {
        return Err(bad());
    }
    Ok(coefficient * PI / denominator)
}

fn parse_dimension(text: &str) -> Result<usize, CliError> {
    match text.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(CliError::invalid(format!("invalid dimension '{text}'"))),
    }
}

/// Resolves a builtin (`identity:N`, `fourier:N`, `f4:X`, `h4:Y:Z`) or reads
/// a matrix document from a file.
pub fn load_matrix(source: &str) -> Result<ComplexMatrix, CliError> {
    let parts: Vec<&str> = source.split(':').collect();
    match parts.as_slice() {
        ["identity", n] => Ok(ComplexMatrix::identity(parse_dimension(n)?)),
        ["fourier", n] => Ok(fourier_matrix(parse_dimension(n)?)?),
        ["f4", x] => Ok(f4(parse_angle(x)?)),
        ["h4", y, z] => Ok(h4(TripleParams::new(parse_angle(y)?, parse_angle(z)?)?)),
        [kind @ ("identity" | "fourier" | "f4" | "h4"), ..] => Err(CliError::invalid(format!(
            "wrong number of parameters for builtin '{kind}'"
        ))),
        _ => {
            let text = fs::read_to_string(source)
                .map_err(|e| CliError::invalid(format!("cannot read '{source}': {e}")))?;
            let doc: MatrixDocument = serde_json::from_str(&text).map_err(|e| {
                CliError::invalid(format!("'{source}' is not a matrix document: {e}"))
            })?;
            doc.to_matrix()
        }
    }
}

/// An inline list `[src, src, ...]` or a file holding `{"bases": [...]}`
/// whose entries are sources or inline matrix documents.
pub fn load_list(source: &str) -> Result<Vec<ComplexMatrix>, CliError> {
    let t = source.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        if inner.trim().is_empty() {
            return Err(CliError::invalid("empty basis list"));
        }
        return inner.split(',').map(|s| load_matrix(s.trim())).collect();
    }
    let text =
        fs::read_to_string(t).map_err(|e| CliError::invalid(format!("cannot read '{t}': {e}")))?;
    let doc: ListDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("'{t}' is not a list document: {e}")))?;
    doc.bases
        .iter()
        .map(|entry| match entry {
            ListEntry::Source(s) => load_matrix(s),
            ListEntry::Inline(doc) => doc.to_matrix(),
        })
        .collect()
}
