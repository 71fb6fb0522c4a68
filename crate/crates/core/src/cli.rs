//! Command-line front end. Reads a JSON model of a map, prints invariants,
//! the genus group, and runs the randomized and brute-force checks.
//!
//! Exit codes: 0 success, 1 a check disagreed, 2 bad input.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::FinAbGroup;
use crate::genus::{claim_factor, genus_group, realizable_det_subgroup, sample_admissible, t_hat_u64};
use crate::intalg::IntMatrix;
use crate::model::{
    k_of, l_count, s_n, t_hat, t_total, DegreeData, DegreeKind, Flavor, MapModel, ModelError, SpaceModel,
};
use crate::oracle::{enum_det_pairs, ENUM_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeRecord {
    pub n: u32,
    pub rank: usize,
    pub ker_exp: u64,
    pub coker_exp: u64,
    pub torsion_exp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRecord {
    pub n: u32,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
}

/// The on-disk description of a map `f: X → Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub flavor: Flavor,
    #[serde(rename = "X")]
    pub x: Vec<DegreeRecord>,
    #[serde(rename = "Y")]
    pub y: Vec<DegreeRecord>,
    pub f: Vec<MapRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selfmap_images: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: cannot read file: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field { path: path.into(), message: message.into() }
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            InputError::Parse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn selfmap_images(&self) -> Vec<Vec<BigInt>> {
        self.selfmap_images.iter().flatten().map(|t| t.iter().map(|&u| BigInt::from(u)).collect()).collect()
    }

    fn space(&self, side: &'static str, records: &[DegreeRecord]) -> Result<SpaceModel, InputError> {
        let mut degrees = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            let at = |key: &str| format!("{side}[{i}].{key}");
            if r.n == 0 {
                return Err(field(at("n"), "degree must be positive"));
            }
            for (key, v) in [("ker_exp", r.ker_exp), ("coker_exp", r.coker_exp), ("torsion_exp", r.torsion_exp)] {
                if v == 0 {
                    return Err(field(at(key), format!("degree {}: must be at least 1", r.n)));
                }
            }
            let data = DegreeData::new(r.rank, r.ker_exp, r.coker_exp, r.torsion_exp);
            if degrees.insert(r.n, data).is_some() {
                return Err(field(at("n"), format!("degree {} listed twice", r.n)));
            }
        }
        SpaceModel::new(self.flavor, degrees).map_err(|e| field(side, e.to_string()))
    }

    /// Validates the document and builds the map model. Errors name the
    /// offending field by its JSON path.
    pub fn to_model(&self) -> Result<MapModel, InputError> {
        let x = self.space("X", &self.x)?;
        let y = self.space("Y", &self.y)?;
        let mut matrices = BTreeMap::new();
        let mut index_of = BTreeMap::new();
        for (i, rec) in self.f.iter().enumerate() {
            let rows = rec.c.len();
            let cols = rec.c.first().map_or(0, Vec::len);
            if rec.c.iter().any(|r| r.len() != cols) {
                return Err(field(format!("f[{i}].C"), format!("degree {}: rows have different lengths", rec.n)));
            }
            let entries = rec.c.iter().flatten().map(|&e| BigInt::from(e)).collect();
            let m = IntMatrix::new(rows, cols, entries).expect("rectangular");
            if matrices.insert(rec.n, m).is_some() {
                return Err(field(format!("f[{i}].n"), format!("degree {} listed twice", rec.n)));
            }
            index_of.insert(rec.n, i);
        }
        MapModel::new(x, y, matrices).map_err(|e| {
            let path = match &e {
                ModelError::MatrixShape { degree, .. } | ModelError::UnexpectedMatrix { degree, .. } => {
                    format!("f[{}].C", index_of[degree])
                }
                _ => "f".to_string(),
            };
            field(path, e.to_string())
        })
    }
}

/// Machine-readable genus report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusJson {
    pub t_hat: u64,
    pub k: usize,
    pub upper_bound: Vec<u64>,
    pub genus_group: Vec<u64>,
}

fn factors(g: &FinAbGroup) -> Vec<u64> {
    g.invariant_factors().iter().map(|d| d.to_u64().expect("factor fits")).collect()
}

impl GenusJson {
    pub fn compute(doc: &InputDocument) -> Result<Self, String> {
        let model = doc.to_model().map_err(|e| e.to_string())?;
        let report = genus_group(&model, &doc.selfmap_images()).map_err(|e| e.to_string())?;
        Ok(GenusJson {
            t_hat: report.t_hat.to_u64().expect("bounded by t_hat_u64"),
            k: report.k,
            upper_bound: factors(&report.upper_bound),
            genus_group: factors(&report.genus_group),
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "genus", version, about = "Genus groups of maps between rational H-spaces or co-H-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print t(X), t(Y), the s_n terms, t̂, l(X), l(Y) and k.
    That { file: PathBuf },
    /// Compute the genus group.
    Genus {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the inverse-lifting construction on random admissible pairs.
    VerifyClaim {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the determinant images against box enumeration.
    OracleDiff {
        file: PathBuf,
        /// Entry bound for enumeration; defaults to t̂ + 2.
        #[arg(long)]
        bound: Option<i64>,
    },
}

struct Fail(i32, String);

type CmdResult = Result<String, Fail>;

fn input_err(e: impl std::fmt::Display) -> Fail {
    Fail(EXIT_INPUT, format!("error: {e}"))
}

fn load(file: &Path) -> Result<(InputDocument, MapModel), Fail> {
    let doc = InputDocument::load(file).map_err(input_err)?;
    let model = doc.to_model().map_err(input_err)?;
    Ok((doc, model))
}

fn kind_name(k: DegreeKind) -> &'static str {
    match k {
        DegreeKind::Empty => "empty",
        DegreeKind::SourceOnly => "X only",
        DegreeKind::TargetOnly => "Y only",
        DegreeKind::Iso => "iso",
        DegreeKind::General => "general",
    }
}

fn cmd_that(file: &Path) -> CmdResult {
    let (_, m) = load(file)?;
    let mut out = String::new();
    writeln!(out, "t(X) = {}", t_total(m.source())).unwrap();
    writeln!(out, "t(Y) = {}", t_total(m.target())).unwrap();
    let top = m.source().top_degree().max(m.target().top_degree());
    for n in 1..=top {
        let (sx, sy) = (s_n(m.source(), n), s_n(m.target(), n));
        if sx != 1u32.into() || sy != 1u32.into() {
            writeln!(out, "s_{n}: X {sx}, Y {sy}").unwrap();
        }
    }
    writeln!(out, "l(X) = {}, l(Y) = {}", l_count(m.source()), l_count(m.target())).unwrap();
    writeln!(out, "t̂ = {}, k = {}", t_hat(&m), k_of(&m)).unwrap();
    Ok(out)
}

fn cmd_genus(file: &Path, json: bool) -> CmdResult {
    let (doc, m) = load(file)?;
    let report = genus_group(&m, &doc.selfmap_images()).map_err(input_err)?;
    if json {
        let j = GenusJson {
            t_hat: report.t_hat.to_u64().expect("bounded"),
            k: report.k,
            upper_bound: factors(&report.upper_bound),
            genus_group: factors(&report.genus_group),
        };
        return Ok(serde_json::to_string(&j).expect("serializable") + "\n");
    }
    let mut out = String::new();
    writeln!(out, "t̂ = {}, k = {}", report.t_hat, report.k).unwrap();
    if !report.coordinates.is_empty() {
        let coords: Vec<String> = report.coordinates.iter().map(ToString::to_string).collect();
        writeln!(out, "coordinates: {}", coords.join("; ")).unwrap();
    }
    writeln!(out, "upper bound: {}", report.upper_bound).unwrap();
    if report.image_gens.is_empty() {
        writeln!(out, "self-map images: none, so the group below is an upper bound").unwrap();
    } else {
        writeln!(out, "self-map images: {}", report.image_gens.len()).unwrap();
    }
    writeln!(out, "genus group: {}", report.genus_group).unwrap();
    Ok(out)
}

fn cmd_verify_claim(file: &Path, trials: usize, seed: u64) -> CmdResult {
    let (_, m) = load(file)?;
    let t = BigInt::from(t_hat(&m));
    let spread = t.to_i64().unwrap_or(i64::MAX).clamp(2, 20);
    let degrees: Vec<u32> = m.degrees().into_iter().filter(|&n| m.kind(n) != DegreeKind::Empty).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let (mut passed, mut failed) = (0usize, 0usize);
    let mut per_degree: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    let mut failures = Vec::new();
    if !degrees.is_empty() {
        for trial in 0..trials {
            let n = degrees[trial % degrees.len()];
            let (rx, ry) = (m.source().rank(n), m.target().rank(n));
            let c = m.matrix(n).cloned().unwrap_or_else(|| IntMatrix::zeros(ry, rx));
            let outcome = match sample_admissible(&c, &t, spread, &mut rng) {
                Ok((g1, g2)) => {
                    claim_factor(&g1, &g2, &c, &t).map(|_| ()).map_err(|e| format!("G1 = {g1}, G2 = {g2}: {e}"))
                }
                Err(e) => Err(e.to_string()),
            };
            let entry = per_degree.entry(n).or_default();
            match outcome {
                Ok(()) => {
                    passed += 1;
                    entry.0 += 1;
                }
                Err(e) => {
                    failed += 1;
                    entry.1 += 1;
                    failures.push(format!("trial {trial}, degree {n}: {e}"));
                }
            }
        }
    }
    for (n, (p, f)) in &per_degree {
        writeln!(out, "degree {n} ({}): {p} passed, {f} failed", kind_name(m.kind(*n))).unwrap();
    }
    for line in failures.iter().take(10) {
        writeln!(out, "  {line}").unwrap();
    }
    if failures.len() > 10 {
        writeln!(out, "  ... {} more", failures.len() - 10).unwrap();
    }
    writeln!(out, "t̂ = {t}, seed {seed}: {} trials, {passed} passed, {failed} failed", passed + failed).unwrap();
    if failed == 0 {
        Ok(out)
    } else {
        Err(Fail(EXIT_DISAGREE, out))
    }
}

fn fmt_tuple(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn cmd_oracle_diff(file: &Path, bound: Option<i64>) -> CmdResult {
    let (_, m) = load(file)?;
    let t = t_hat_u64(&m).map_err(input_err)?;
    if t > ENUM_LIMIT {
        return Err(input_err(format!("size guard exceeded: t̂ = {t} above {ENUM_LIMIT}")));
    }
    let bound = bound.unwrap_or(t as i64 + 2);
    let mut out = String::new();
    let mut problems = Vec::new();
    writeln!(out, "t̂ = {t}, box [-{bound}, {bound}]").unwrap();
    writeln!(out, "degree  kind     subgroup  oracle  witnessed  status").unwrap();
    for n in m.degrees() {
        let kind = m.kind(n);
        if kind == DegreeKind::Empty {
            continue;
        }
        let (rx, ry) = (m.source().rank(n), m.target().rank(n));
        let c = m.matrix(n).cloned().unwrap_or_else(|| IntMatrix::zeros(ry, rx));
        let sub = realizable_det_subgroup(m.matrix(n), rx, ry, t).map_err(input_err)?;
        let report = enum_det_pairs(&c, rx, ry, t, bound, n).map_err(input_err)?;
        let outside: Vec<&Vec<u64>> = report.found_pairs.iter().filter(|p| !sub.contains(p)).collect();
        let gens: BTreeSet<&Vec<u64>> = sub.generators.iter().collect();
        let unwitnessed: Vec<&&Vec<u64>> = gens.iter().filter(|g| !report.witnesses.contains_key(**g)).collect();
        let ok = outside.is_empty() && unwitnessed.is_empty();
        writeln!(
            out,
            "{n:<7} {:<8} {:<9} {:<7} {:<10} {}",
            kind_name(kind),
            sub.as_group.order().expect("finite"),
            report.found_pairs.len(),
            format!("{}/{}", gens.len() - unwitnessed.len(), gens.len()),
            if ok { "agree" } else { "DISAGREE" }
        )
        .unwrap();
        for p in outside {
            problems.push(format!("degree {n}: oracle pair {} lies outside the characterized subgroup", fmt_tuple(p)));
        }
        for g in unwitnessed {
            problems.push(format!("degree {n}: generator {} has no witness in the box", fmt_tuple(g)));
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        for p in problems {
            writeln!(out, "{p}").unwrap();
        }
        Err(Fail(EXIT_DISAGREE, out))
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::That { file } => cmd_that(file),
        Command::Genus { file, json } => cmd_genus(file, *json),
        Command::VerifyClaim { file, trials, seed } => cmd_verify_claim(file, *trials, *seed),
        Command::OracleDiff { file, bound } => cmd_oracle_diff(file, *bound),
    };
    match result {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Fail(code, text)) => {
            let target: &mut dyn Write = if code == EXIT_INPUT { stderr } else { stdout };
            let _ = target.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = target.write_all(b"\n");
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIFTEEN: &str = r#"{"flavor":"H",
        "X":[{"n":3,"rank":1,"ker_exp":15,"coker_exp":1,"torsion_exp":1}],
        "Y":[{"n":3,"rank":1,"ker_exp":1,"coker_exp":1,"torsion_exp":1}],
        "f":[{"n":3,"C":[[1]]}]}"#;

    #[test]
    fn parses_and_builds() {
        let doc = InputDocument::parse(FIFTEEN).unwrap();
        let m = doc.to_model().unwrap();
        assert_eq!(t_hat(&m), 15u32.into());
        let j = GenusJson::compute(&doc).unwrap();
        assert_eq!(j, GenusJson { t_hat: 15, k: 1, upper_bound: vec![4], genus_group: vec![4] });
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = FIFTEEN.replacen("\"flavor\"", "\"extra\":1,\"flavor\"", 1);
        assert!(matches!(InputDocument::parse(&text), Err(InputError::Parse { .. })));
        let text = FIFTEEN.replacen("\"torsion_exp\":1}", "\"torsion_exp\":1,\"rank2\":0}", 1);
        assert!(matches!(InputDocument::parse(&text), Err(InputError::Parse { line: 2, .. })));
    }

    #[test]
    fn field_paths_in_errors() {
        let bad_shape = FIFTEEN.replace("[[1]]", "[[1, 2]]");
        let err = InputDocument::parse(&bad_shape).unwrap().to_model().unwrap_err().to_string();
        assert!(err.starts_with("f[0].C") && err.contains("degree 3"), "{err}");
        let ragged = FIFTEEN.replace("[[1]]", "[[1], [2, 3]]");
        let err = InputDocument::parse(&ragged).unwrap().to_model().unwrap_err().to_string();
        assert!(err.starts_with("f[0].C"), "{err}");
        let zero = FIFTEEN.replacen("\"ker_exp\":15", "\"ker_exp\":0", 1);
        let err = InputDocument::parse(&zero).unwrap().to_model().unwrap_err().to_string();
        assert!(err.starts_with("X[0].ker_exp"), "{err}");
        let missing = FIFTEEN.replace(r#"{"n":3,"C":[[1]]}"#, "");
        let err = InputDocument::parse(&missing).unwrap().to_model().unwrap_err().to_string();
        assert!(err.contains("degree 3"), "{err}");
    }

    #[test]
    fn bad_seed_is_input_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["genus", "verify-claim", "x.json", "--seed", "abc"], &mut out, &mut err);
        assert_eq!(code, EXIT_INPUT);
        assert!(!err.is_empty());
    }

    #[test]
    fn missing_file_is_input_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["genus", "that", "/nonexistent/model.json"], &mut out, &mut err);
        assert_eq!(code, EXIT_INPUT);
        assert!(String::from_utf8(err).unwrap().contains("cannot read"));
    }
}
