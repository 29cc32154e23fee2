//! JSON rendering with fixed precision so outputs diff cleanly.

use mubeq::linalg::{ComplexMatrix, C64};
use mubeq::monomial::MonomialElement;
use serde_json::{json, Value};

use crate::source::MatrixDocument;

const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits; negative zero becomes zero.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    let text = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let y: f64 = text.parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

/// `x` rounded to `places` decimals; negative zero becomes zero.
pub fn round_decimals(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    let y = (x * scale).round() / scale;
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

pub fn number(x: f64) -> Value {
    json!(round_significant(x))
}

fn pair(z: C64) -> [f64; 2] {
    [round_significant(z.re), round_significant(z.im)]
}

pub fn matrix_document(m: &ComplexMatrix, label: Option<&str>) -> MatrixDocument {
    MatrixDocument {
        n: m.n(),
        matrix: m
            .rows()
            .into_iter()
            .map(|row| row.into_iter().map(pair).collect())
            .collect(),
        label: label.map(str::to_owned),
    }
}

pub fn matrix_value(m: &ComplexMatrix, label: Option<&str>) -> Value {
    serde_json::to_value(matrix_document(m, label)).expect("documents serialize")
}

/// A monomial as its 0-based column images, cycle notation and phases.
pub fn monomial_value(m: &MonomialElement) -> Value {
    json!({
        "permutation": m.perm().to_string(),
        "images": m.perm().images(),
        "phases": m.phases().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
    })
}

/// Nesting depth of arrays, or `None` if an object occurs inside.
fn array_depth(v: &Value) -> Option<usize> {
    match v {
        Value::Object(_) => None,
        Value::Array(items) => items
            .iter()
            .try_fold(0, |depth, item| array_depth(item).map(|d| depth.max(d)))
            .map(|d| d + 1),
        _ => Some(0),
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |level: usize| "  ".repeat(level);
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        // Matrix rows and short numeric arrays stay on one line.
        Value::Array(items) if !items.is_empty() && array_depth(v).is_none_or(|d| d > 2) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Indented JSON with one matrix row per line, ending in a newline.
pub fn render(doc: &Value) -> String {
    let mut text = String::new();
    write_value(doc, 0, &mut text);
    text.push('\n');
    text
}
