//! `mubeq` command line: every command prints one JSON document on standard
//! output. Exit codes are 0 and 1 for yes/no verdicts (and 0 for plain
//! reports), 2 for malformed input.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use mubeq::basis::{is_hadamard_matrix, is_unbiased, mubness_squared, overlaps, BasisPoint};
use mubeq::dim4::{orbit_map, random_params, verify_dim4, OrbitSizeCheck, TripleParams};
use mubeq::equivalence::{dephase, hadamard_equivalent, lists_equivalent, MubList};
use mubeq::linalg::{ComplexMatrix, Tolerance, DEFAULT_EPS};
use mubeq::stabilizer::{list_stabilizer, orbit, GROUP_EPS};
use mubeq::MubError;
use serde_json::{json, Value};

pub mod output;
pub mod source;

use output::{matrix_value, monomial_value, number, render, round_decimals};
use source::{load_list, load_matrix, parse_angle};

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<MubError> for CliError {
    fn from(e: MubError) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mubeq",
    version,
    about = "Mutually unbiased bases: distances, stabilizers and equivalence"
)]
struct Cli {
    /// Tolerance for unitarity and unbiasedness checks (group membership never goes below 1e-7).
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Pair {
    /// First matrix source.
    #[arg(long)]
    a: String,
    /// Second matrix source.
    #[arg(long)]
    b: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// MUBness distance between two bases.
    Metric(Pair),
    /// Exit 0 if the two bases are mutually unbiased, 1 otherwise.
    Unbiased(Pair),
    /// Exit 0 if the matrix is a complex Hadamard matrix, 1 otherwise.
    HadamardCheck {
        #[arg(long = "in")]
        input: String,
    },
    /// Dephase a Hadamard matrix so its first row and column are constant.
    Dephase {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exit 0 if A = M1 B M2 for monomials M1, M2, 1 otherwise.
    HadamardEquiv {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        witness: Option<String>,
    },
    /// Simultaneous stabilizer of a MUB list modulo phases.
    Stabilizer {
        #[arg(long)]
        list: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Orbit of a basis under the stabilizer of a MUB list.
    Orbit {
        #[arg(long)]
        list: String,
        #[arg(long)]
        point: String,
    },
    /// Exit 0 if the two MUB lists are equivalent, 1 otherwise.
    EquivLists {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        witness: Option<String>,
    },
    /// Closed-form results in dimension four.
    #[command(subcommand)]
    Dim4(Dim4Command),
}

#[derive(Subcommand, Debug)]
enum Dim4Command {
    /// Images of (y, z) under the stabilizer of (e, f_0).
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Cross-check closed forms against the generic machinery; exit 0 iff all agree.
    Verify {
        #[arg(long, allow_hyphen_values = true, requires = "z", conflicts_with_all = ["samples", "seed"])]
        y: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "y")]
        z: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Runs the command line with the process streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                // Keep the diagnostic to one line: the message up to the usage block.
                let message: Vec<&str> = text
                    .lines()
                    .map(str::trim)
                    .take_while(|l| !l.is_empty() && !l.starts_with("Usage:"))
                    .collect();
                let _ = writeln!(err, "{}", message.join(" "));
            }
            return code;
        }
    };
    match execute(cli) {
        Ok((doc, code)) => {
            if out.write_all(render(&doc).as_bytes()).is_err() {
                return 2;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn verdict(flag: bool) -> i32 {
    if flag {
        0
    } else {
        1
    }
}

fn write_file(path: &str, doc: &Value) -> Result<(), CliError> {
    fs::write(path, render(doc))
        .map_err(|e| CliError::invalid(format!("cannot write '{path}': {e}")))
}

fn point(source: &str, tol: Tolerance) -> Result<BasisPoint, CliError> {
    Ok(BasisPoint::new(load_matrix(source)?, tol)?)
}

fn mub_list(source: &str, tol: Tolerance) -> Result<MubList, CliError> {
    Ok(MubList::from_matrices(load_list(source)?, tol)?)
}

fn execute(cli: Cli) -> Result<(Value, i32), CliError> {
    let tol = Tolerance::new(cli.tol)?;
    let group_tol = Tolerance::new(GROUP_EPS.max(tol.eps()))?;
    match cli.command {
        Command::Metric(Pair { a, b }) => {
            let (p, q) = (point(&a, tol)?, point(&b, tol)?);
            let d2 = mubness_squared(&p, &q)?;
            let doc = json!({
                "command": "metric",
                "n": p.n(),
                "distance": number(d2.sqrt()),
                "distance_squared": number(d2),
                "maximum": number(((p.n() - 1) as f64).sqrt()),
            });
            Ok((doc, 0))
        }
        Command::Unbiased(Pair { a, b }) => {
            let (p, q) = (point(&a, tol)?, point(&b, tol)?);
            let flag = is_unbiased(&p, &q, tol)?;
            let inv_n = 1.0 / p.n() as f64;
            let deviation = overlaps(&p, &q)?
                .into_iter()
                .flatten()
                .map(|t| (t - inv_n).abs())
                .fold(0.0, f64::max);
            let doc = json!({
                "command": "unbiased",
                "n": p.n(),
                "unbiased": flag,
                "max_overlap_deviation": number(deviation),
            });
            Ok((doc, verdict(flag)))
        }
        Command::HadamardCheck { input } => {
            let h = load_matrix(&input)?;
            let flag = is_hadamard_matrix(&h, tol);
            let doc = json!({"command": "hadamard-check", "n": h.n(), "hadamard": flag});
            Ok((doc, verdict(flag)))
        }
        Command::Dephase { input, out } => {
            let d = dephase(&load_matrix(&input)?, tol)?;
            let mut doc = matrix_value(&d.matrix, Some("dephased"));
            doc["left"] = monomial_value(&d.left);
            doc["right"] = monomial_value(&d.right);
            if let Some(path) = out {
                write_file(&path, &doc)?;
            }
            doc["command"] = json!("dephase");
            Ok((doc, 0))
        }
        Command::HadamardEquiv { pair, witness } => {
            let (a, b) = (load_matrix(&pair.a)?, load_matrix(&pair.b)?);
            let found = hadamard_equivalent(&a, &b, tol)?;
            let mut doc = json!({"command": "hadamard-equiv", "equivalent": found.is_some()});
            if let Some((left, right)) = &found {
                let w = json!({
                    "relation": "A = left * B * right",
                    "left": monomial_value(left),
                    "right": monomial_value(right),
                });
                if let Some(path) = &witness {
                    write_file(path, &w)?;
                }
                doc["witness"] = w;
            }
            Ok((doc, verdict(found.is_some())))
        }
        Command::Stabilizer { list, out } => {
            let list = mub_list(&list, tol)?;
            let group = list_stabilizer(&list, tol)?;
            let elements: Vec<Value> = group
                .elements()
                .iter()
                .map(|g| matrix_value(g.matrix(), None))
                .collect();
            let body = json!({"n": group.n(), "count": group.order(), "elements": elements});
            if let Some(path) = out {
                write_file(&path, &body)?;
            }
            let mut doc = body;
            doc["command"] = json!("stabilizer");
            Ok((doc, 0))
        }
        Command::Orbit { list, point: p } => {
            let list = mub_list(&list, tol)?;
            let p = point(&p, tol)?;
            let group = list_stabilizer(&list, tol)?;
            let o = orbit(&group, &p, group_tol)?;
            let points: Vec<Value> = o
                .points()
                .iter()
                .map(|q| matrix_value(q.canonical(), None))
                .collect();
            let doc = json!({
                "command": "orbit",
                "n": group.n(),
                "stabilizer_order": group.order(),
                "count": o.len(),
                "points": points,
            });
            Ok((doc, 0))
        }
        Command::EquivLists { a, b, witness } => {
            let (a, b) = (mub_list(&a, tol)?, mub_list(&b, tol)?);
            let found = lists_equivalent(&a, &b, tol)?;
            let mut doc = json!({"command": "equiv-lists", "equivalent": found.is_some()});
            if let Some(w) = &found {
                let value = matrix_value(w.unitary(), Some("witness"));
                if let Some(path) = &witness {
                    write_file(path, &value)?;
                }
                doc["witness"] = value;
            }
            Ok((doc, verdict(found.is_some())))
        }
        Command::Dim4(Dim4Command::Orbit { y, z }) => {
            let p = TripleParams::new(parse_angle(&y)?, parse_angle(&z)?)?;
            let images: Vec<Value> = orbit_map(p)
                .iter()
                .map(|q| json!({"y": round_decimals(q.y(), 6), "z": round_decimals(q.z(), 6)}))
                .collect();
            let doc = json!({
                "command": "dim4 orbit",
                "y": round_decimals(p.y(), 6),
                "z": round_decimals(p.z(), 6),
                "count": images.len(),
                "images": images,
            });
            Ok((doc, 0))
        }
        Command::Dim4(Dim4Command::Verify {
            y,
            z,
            samples,
            seed,
        }) => {
            let params = match (y, z) {
                (Some(y), Some(z)) => vec![TripleParams::new(parse_angle(&y)?, parse_angle(&z)?)?],
                _ => random_params(samples, seed),
            };
            let mut all = true;
            let mut reports = Vec::with_capacity(params.len());
            for p in params {
                let r = verify_dim4(p, tol)?;
                all &= r.passed();
                let degenerate = match r.orbit_size {
                    OrbitSizeCheck::Generic => Value::Null,
                    OrbitSizeCheck::Degenerate(size) => json!(size),
                };
                reports.push(json!({
                    "y": number(p.y()),
                    "z": number(p.z()),
                    "orbit_size": r.numeric_orbit_size,
                    "orbit_matches": r.orbit_matches,
                    "stabilizer_order": r.stabilizer_order,
                    "stabilizer_matches": r.stabilizer_matches,
                    "generic": degenerate.is_null(),
                    "degenerate_orbit_size": degenerate,
                    "mismatches": r.mismatches,
                }));
            }
            let doc = json!({"command": "dim4 verify", "passed": all, "reports": reports});
            Ok((doc, verdict(all)))
        }
    }
}

/// Parses `text` as a matrix document; used by tests to check round trips.
pub fn parse_matrix_document(text: &str) -> Result<ComplexMatrix, CliError> {
    let doc: source::MatrixDocument = serde_json::from_str(text)
        .map_err(|e| CliError::invalid(format!("not a matrix document: {e}")))?;
    doc.to_matrix()
}
