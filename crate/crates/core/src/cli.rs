//! Batch front-end: matrix files, subcommands and deterministic reports.
//!
//! A matrix file is a JSON object with exactly these keys:
//!
//! ```json
//! {
//!   "schema": "Aprime",
//!   "rows": [["S_n", 1], ["C_eta", 1]],
//!   "cols": [["S_n3", 1]],
//!   "blocks": { "S_n/S_n3": [[5]], "C_eta/S_n3": [[0]] }
//! }
//! ```
//!
//! `schema` is `A0`, `Aprime`, `Aprime2` or `Aprime3`, with a trailing `+`
//! for the restricted group. Blocks missing from `blocks` are zero; each
//! present block is a `rows x cols` array for its two strips.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::block_matrix::{BlockMatrix, MatrixError, StripProfile};
use crate::catalog::{parse_name, Catalog, CatalogError};
use crate::orbit_oracle::{count_orbits, OracleError};
use crate::reducer::{crt_decompose, crt_split, decompose, isomorphic, ReduceError};
use crate::schema::{ColStrip, MooreCaps, RowStrip, SchemaError, SchemaId};
use crate::topology::{cw_of, homology, TopologyError};

/// Moore cap used when neither a flag nor `POLYFORM_RCAP` gives one.
pub const DEFAULT_CAP: u8 = crate::schema::DEFAULT_MOORE_CAP;
/// Default bound on the state space of an orbit census.
pub const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {msg}")]
    Syntax { path: String, line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    Content { path: String, msg: String },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("bad profile {0:?}: expected e.g. \"S_n:1 C_eta:2 x S_n3:1\"")]
    Profile(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    schema: String,
    rows: Vec<(String, usize)>,
    cols: Vec<(String, usize)>,
    #[serde(default)]
    blocks: BTreeMap<String, Vec<Vec<i64>>>,
}

/// Blocks serialized in strip order rather than key order.
struct OrderedBlocks<'a>(&'a [(String, Vec<Vec<u32>>)]);

impl Serialize for OrderedBlocks<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct MatrixFileOut<'a> {
    schema: String,
    rows: Vec<(String, usize)>,
    cols: Vec<(String, usize)>,
    blocks: OrderedBlocks<'a>,
}

/// Canonical serialization: strip order throughout, only nonzero blocks.
pub fn to_file_text(m: &BlockMatrix) -> String {
    let p = m.profile();
    let mut blocks = Vec::new();
    for &(r, _) in p.rows() {
        for &(c, _) in p.cols() {
            let b = m.block(r, c);
            if b.iter().flatten().any(|&v| v != 0) {
                blocks.push((format!("{r}/{c}"), b));
            }
        }
    }
    let out = MatrixFileOut {
        schema: m.schema().to_string(),
        rows: p.rows().iter().map(|(s, d)| (s.to_string(), *d)).collect(),
        cols: p.cols().iter().map(|(s, d)| (s.to_string(), *d)).collect(),
        blocks: OrderedBlocks(&blocks),
    };
    serde_json::to_string_pretty(&out).expect("matrix files serialize")
}

/// Parsed matrix plus the entries that had to be reduced into their cell ring.
pub struct Parsed {
    pub matrix: BlockMatrix,
    pub reduced: Vec<String>,
}

pub fn parse_matrix(text: &str, path: &str) -> Result<Parsed, CliError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let content = |msg: String| CliError::Content { path: path.to_string(), msg };
    let schema: SchemaId = file.schema.parse()?;
    let rows = file
        .rows
        .iter()
        .map(|(s, d)| Ok((s.parse::<RowStrip>()?, *d)))
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let cols = file
        .cols
        .iter()
        .map(|(s, d)| Ok((s.parse::<ColStrip>()?, *d)))
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let profile = StripProfile::new(rows, cols)?;
    let mut m = BlockMatrix::zero(schema, profile.clone())?;
    let mut reduced = Vec::new();
    for (key, block) in &file.blocks {
        let (r, c) = key.split_once('/').ok_or_else(|| content(format!("block key {key:?} is not row/col")))?;
        let (r, c): (RowStrip, ColStrip) = (r.parse()?, c.parse()?);
        let (dr, dc) = (profile.row_dim(r), profile.col_dim(c));
        if dr == 0 || dc == 0 {
            return Err(content(format!("block {key:?} names a strip absent from the profile")));
        }
        if block.len() != dr || block.iter().any(|row| row.len() != dc) {
            return Err(content(format!("block {key:?} must be {dr}x{dc}")));
        }
        let (ro, co) = (profile.row_offset(r), profile.col_offset(c));
        for (i, row) in block.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let size = m.domain(ro + i, co + j).size() as i64;
                if !(0..size).contains(&x) {
                    reduced.push(format!("{key}[{i}][{j}] = {x} reduced modulo {size}"));
                }
                m.set(ro + i, co + j, x);
            }
        }
    }
    m.validate()?;
    Ok(Parsed { matrix: m, reduced })
}

/// Parses `"S_n:1 C_eta:2 x S_n3:1"`; either side may be `-`.
pub fn parse_profile(text: &str) -> Result<StripProfile, CliError> {
    let bad = || CliError::Profile(text.to_string());
    let (rows, cols) = text.split_once(" x ").ok_or_else(bad)?;
    fn side<T: std::str::FromStr<Err = SchemaError>>(s: &str) -> Result<Option<Vec<(T, usize)>>, SchemaError> {
        let s = s.trim();
        if s == "-" {
            return Ok(Some(vec![]));
        }
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let Some((name, dim)) = tok.rsplit_once(':') else { return Ok(None) };
            let Ok(dim) = dim.parse() else { return Ok(None) };
            out.push((name.parse()?, dim));
        }
        Ok(Some(out))
    }
    let rows = side::<RowStrip>(rows)?.ok_or_else(bad)?;
    let cols = side::<ColStrip>(cols)?.ok_or_else(bad)?;
    Ok(StripProfile::new(rows, cols)?)
}

#[derive(Parser)]
#[command(name = "polyform", version, about = "Reduce block matrices to sums of indecomposables and describe the polyhedra")]
struct Cli {
    /// Reject entries outside their cell ring instead of reducing them.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SchemaArgs {
    /// A0, Aprime, Aprime2 or Aprime3.
    #[arg(long, default_value = "Aprime")]
    schema: String,
    /// Use the restricted group (signed swaps only on the restricted strips).
    #[arg(long)]
    plus: bool,
}

impl SchemaArgs {
    fn id(&self) -> Result<SchemaId, CliError> {
        let id: SchemaId = self.schema.parse()?;
        Ok(if self.plus { id.with_plus(true)? } else { id })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a matrix file as a direct sum of catalog entries.
    Decompose {
        file: PathBuf,
        /// Write the move log that realizes the decomposition.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Decide whether two matrix files are equivalent.
    Isomorphic { a: PathBuf, b: PathBuf },
    /// List catalog entries with their normal forms.
    Catalog {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        rcap: Option<u8>,
        #[arg(long)]
        scap: Option<u8>,
    },
    /// Enumerate every orbit of one strip profile.
    OrbitCheck {
        #[arg(long)]
        profile: String,
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
    },
    /// Cell structure of a catalog entry.
    Cw {
        name: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Homology of a catalog entry.
    Homology {
        name: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Decompose through the split into 2- and 3-primary parts.
    Crt { file: PathBuf },
}

fn env_cap() -> u8 {
    std::env::var("POLYFORM_RCAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_CAP)
}

fn caps_of(m: &BlockMatrix) -> MooreCaps {
    let p = m.profile();
    let s = p.rows().iter().filter_map(|(r, _)| if let RowStrip::Moore(s) = r { Some(*s) } else { None }).max();
    let r = p.cols().iter().filter_map(|(c, _)| if let ColStrip::Moore(r) = c { Some(*r) } else { None }).max();
    MooreCaps::new(r.unwrap_or(0), s.unwrap_or(0))
}

fn header(schema: SchemaId, caps: MooreCaps) -> String {
    format!("schema {schema} caps r={} s={}\n", caps.r, caps.s)
}

fn load(path: &Path, strict: bool, out: &mut String) -> Result<BlockMatrix, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(shown.clone(), e))?;
    let parsed = parse_matrix(&text, &shown)?;
    if !parsed.reduced.is_empty() {
        if strict {
            return Err(CliError::Content { path: shown, msg: format!("entry {}", parsed.reduced[0]) });
        }
        for w in &parsed.reduced {
            out.push_str(&format!("warning: {shown}: {w}\n"));
        }
    }
    Ok(parsed.matrix)
}

fn sum_text(parts: &[impl std::fmt::Display]) -> String {
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" + ")
    }
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match cli.command {
        Command::Decompose { file, certificate } => {
            let m = load(&file, cli.strict, &mut out)?;
            let d = decompose(&m)?;
            out.push_str(&header(m.schema(), caps_of(&m)));
            out.push_str(&sum_text(&d.parts));
            out.push('\n');
            if let Some(path) = certificate {
                std::fs::write(&path, d.certificate.to_string())
                    .map_err(|e| CliError::Io(path.display().to_string(), e))?;
                out.push_str(&format!("certificate: {} moves\n", d.certificate.len()));
            }
        }
        Command::Isomorphic { a, b } => {
            let ma = load(&a, cli.strict, &mut out)?;
            let mb = load(&b, cli.strict, &mut out)?;
            let iso = isomorphic(&ma, &mb)?;
            out.push_str(&header(ma.schema(), caps_of(&ma.direct_sum(&mb)?)));
            out.push_str(&format!("isomorphic: {iso}\n"));
        }
        Command::Catalog { schema, rcap, scap } => {
            let id = schema.id()?;
            let caps = MooreCaps::new(rcap.unwrap_or_else(env_cap), scap.unwrap_or_else(env_cap));
            let cat = Catalog::new(id, caps);
            out.push_str(&header(id, caps));
            out.push_str(&format!("entries {}\n", cat.len()));
            for (name, m) in cat.entries() {
                out.push_str(&format!("\n{name}\n{}\n", to_file_text(m)));
            }
        }
        Command::OrbitCheck { profile, schema, bound } => {
            let id = schema.id()?;
            let p = parse_profile(&profile)?;
            let zero = BlockMatrix::zero(id, p.clone())?;
            let report = count_orbits(&p, id, bound)?;
            out.push_str(&header(id, caps_of(&zero)));
            out.push_str(&format!("profile {}\nstates {}\n", report.profile, report.state_count));
            let nonzero = report.representatives.iter().filter(|m| !m.is_zero()).count();
            let indec = report.nonzero_indecomposable().len();
            out.push_str(&format!("orbits {} (nonzero {nonzero}, indecomposable {indec})\n", report.orbit_count));
            for ((m, size), ind) in report.representatives.iter().zip(&report.orbit_sizes).zip(&report.indecomposable) {
                let row: Vec<String> = (0..m.num_rows())
                    .map(|r| (0..m.num_cols()).map(|c| m.get(r, c).to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                let kind = if *ind { "indecomposable" } else { "decomposable" };
                out.push_str(&format!("  [{}] size {size} {kind}\n", row.join("; ")));
            }
            out.push_str(&format!(
                "summary {{\"schema\":\"{id}\",\"profile\":\"{}\",\"states\":{},\"orbits\":{},\"nonzero\":{nonzero},\"indecomposable\":{indec}}}\n",
                report.profile, report.state_count, report.orbit_count
            ));
        }
        Command::Cw { name, n, schema } => {
            let id = schema.id()?;
            let cw = cw_of(&parse_name(&name, id)?, n)?;
            out.push_str(&format!("schema {id}\n{}\n", cw.name));
        }
        Command::Homology { name, n, schema } => {
            let id = schema.id()?;
            let cw = cw_of(&parse_name(&name, id)?, n)?;
            out.push_str(&format!("schema {id}\n{}\n{}\n", cw.name, homology(&cw)));
        }
        Command::Crt { file } => {
            let m = load(&file, cli.strict, &mut out)?;
            let (two, three) = crt_split(&m)?;
            let (d2, d3) = (decompose(&two)?, decompose(&three)?);
            let d = crt_decompose(&m)?;
            out.push_str(&header(m.schema(), caps_of(&m)));
            out.push_str(&format!("2-part ({}): {}\n", two.schema(), sum_text(&d2.parts)));
            out.push_str(&format!("3-part ({}): {}\n", three.schema(), sum_text(&d3.parts)));
            out.push_str(&format!("merged: {}\n", sum_text(&d.parts)));
        }
    }
    Ok(out)
}

/// Runs one command line; returns the exit code (0 ok, 1 domain error, 2 usage error).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(cli) {
        Ok(report) => {
            let _ = out.write_all(report.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Profile(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::matrix_of;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("polyform").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn file_text_round_trips() {
        for (_, m) in Catalog::new(SchemaId::APRIME, MooreCaps::new(1, 1)).entries() {
            let text = to_file_text(m);
            let back = parse_matrix(&text, "x").unwrap();
            assert_eq!(&back.matrix, m);
            assert!(back.reduced.is_empty());
        }
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let e = parse_matrix("{\n \"schema\": \"Aprime\",\n oops }", "f.json").err().unwrap();
        assert!(matches!(e, CliError::Syntax { line: 3, .. }), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"schema":"Aprime","rows":[],"cols":[],"extra":1}"#;
        assert!(parse_matrix(text, "f").is_err());
    }

    #[test]
    fn out_of_ring_entries_are_flagged() {
        let text = r#"{"schema":"Aprime","rows":[["S_n",1]],"cols":[["S_n3",1]],"blocks":{"S_n/S_n3":[[29]]}}"#;
        let p = parse_matrix(text, "f").unwrap();
        assert_eq!(p.matrix.get(0, 0), 5);
        assert_eq!(p.reduced.len(), 1);
    }

    #[test]
    fn profile_grammar() {
        let p = parse_profile("S_n:1 x S_n3:1").unwrap();
        assert_eq!(p.to_string(), "S_n:1 x S_n3:1");
        assert!(parse_profile("S_n 1 x S_n3:1").is_err());
    }

    #[test]
    fn orbit_check_counts_thirteen() {
        let (code, out, _) = run_args(&["orbit-check", "--profile", "S_n:1 x S_n3:1", "--schema", "Aprime"]);
        assert_eq!(code, 0);
        assert!(out.contains("orbits 13 "), "{out}");
    }

    #[test]
    fn usage_and_domain_errors_differ() {
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["cw", "X(1)", "--n", "3"]).0, 1);
        assert_eq!(run_args(&["decompose", "/nonexistent/file.json"]).0, 1);
    }

    #[test]
    fn decompose_names_a_fixed_point() {
        let dir = std::env::temp_dir().join(format!("polyform-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("x5.json");
        let m = matrix_of(&parse_name("X(5)", SchemaId::APRIME).unwrap()).unwrap();
        std::fs::write(&path, to_file_text(&m)).unwrap();
        let (code, out, _) = run_args(&["decompose", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1), Some("X(5)"));
        let (_, again, _) = run_args(&["decompose", path.to_str().unwrap()]);
        assert_eq!(out, again);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
