//! File formats and flag parsing: label sets, fields, operad description
//! files, and the JSON export of a chain complex.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use treebar_core::complex::BasedChainComplex;
use treebar_core::operad::{ActionKind, ArityData, CompositionEntry, Species};
use treebar_core::{Field, Label, LabelSet, Operad, Q};

/// Parses `--labels 1,2,3` (integers and identifiers, comma-separated).
pub fn parse_labels(s: &str) -> Result<LabelSet> {
    let mut set = BTreeSet::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            bail!("empty label in {s:?}");
        }
        let label = match item.parse::<i64>() {
            Ok(n) => Label::Int(n),
            Err(_) => Label::Str(item.to_string()),
        };
        if !set.insert(label) {
            bail!("duplicate label {item:?}");
        }
    }
    LabelSet::new(set).map_err(|e| anyhow::anyhow!("bad label set {s:?}: {e}"))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Parses `--field q` or `--field fp:101`.
pub fn parse_field(s: &str) -> Result<Field> {
    if s.eq_ignore_ascii_case("q") {
        return Ok(Field::Rational);
    }
    if let Some(p) = s.strip_prefix("fp:") {
        let p: u64 = p.parse().with_context(|| format!("bad prime in {s:?}"))?;
        if !is_prime(p) {
            bail!("{p} is not prime");
        }
        return Ok(Field::Prime(p));
    }
    bail!("unknown field {s:?}; use `q` or `fp:<prime>`")
}

/// One arity block of an operad description file; `action` is `trivial`
/// or `regular`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ArityFile {
    pub basis: Vec<String>,
    #[serde(default)]
    pub degrees: Option<Vec<i64>>,
    #[serde(default = "default_action")]
    pub action: String,
}

fn default_action() -> String {
    "trivial".to_string()
}

/// One composition line: `left ∘_i right = Σ coeff · result`, with rational
/// coefficients written as strings (`"1"`, `"-2/3"`).
#[derive(Debug, Serialize, Deserialize)]
pub struct CompositionLine {
    pub m: usize,
    pub n: usize,
    pub i: usize,
    pub left: String,
    pub right: String,
    pub terms: Vec<(String, String)>,
}

/// An operad description file: `arities[k]` describes arity `k + 1`.
#[derive(Debug, Serialize, Deserialize)]
pub struct OperadFile {
    pub name: String,
    pub arities: Vec<ArityFile>,
    #[serde(default)]
    pub compositions: Vec<CompositionLine>,
}

impl OperadFile {
    /// Validates the description and assembles the operad, checking the
    /// operad axioms exhaustively within the truncation.
    pub fn build(&self) -> Result<Operad> {
        let mut arities = Vec::new();
        for (k, a) in self.arities.iter().enumerate() {
            let n = k + 1;
            let degrees = a.degrees.clone().unwrap_or_else(|| vec![0; a.basis.len()]);
            let action = match a.action.as_str() {
                "trivial" => ActionKind::Trivial,
                "regular" => ActionKind::Regular,
                other => bail!("arity {n}: unknown action {other:?} (use trivial or regular)"),
            };
            arities.push(ArityData { basis: a.basis.clone(), degrees, action });
        }
        let species = Species::new(&self.name, arities)
            .map_err(|e| anyhow::anyhow!("bad species in operad file: {e}"))?;
        let mut entries = Vec::new();
        for line in &self.compositions {
            let mut terms = Vec::new();
            for (coeff, name) in &line.terms {
                let q = Q::from_str(coeff)
                    .map_err(|e| anyhow::anyhow!("bad coefficient {coeff:?}: {e}"))?;
                terms.push((q, name.clone()));
            }
            entries.push(CompositionEntry {
                m: line.m,
                n: line.n,
                i: line.i,
                left: line.left.clone(),
                right: line.right.clone(),
                terms,
            });
        }
        let operad = Operad::from_parts(species, &entries)
            .map_err(|e| anyhow::anyhow!("bad composition table: {e}"))?;
        let axioms = operad.check_axioms();
        if !axioms.passed() {
            bail!("operad file fails the operad axioms:\n{axioms}");
        }
        Ok(operad)
    }
}

/// Resolves `--operad`: a builtin name (`com`, `ass`, `free-binary`,
/// `nilpotent:k`) or a path to a JSON description file.
pub fn load_operad(spec: &str, max_arity: usize) -> Result<Operad> {
    if let Ok(op) = Operad::builtin(spec, max_arity) {
        return Ok(op);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("--operad {spec:?} is neither a builtin name nor an existing file");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
    let file: OperadFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {spec} as JSON"))?;
    let op = file.build()?;
    if op.species().max_arity() < max_arity {
        bail!(
            "operad file {spec:?} is truncated at arity {}, but the run needs arity {max_arity}",
            op.species().max_arity()
        );
    }
    Ok(op)
}

/// JSON export of one degree of a complex.
#[derive(Debug, Serialize, Deserialize)]
pub struct DegreeJson {
    pub degree: i64,
    pub dim: usize,
    pub basis: Vec<String>,
}

/// JSON export of one differential as `[row, col, coeff]` triplets.
#[derive(Debug, Serialize, Deserialize)]
pub struct DifferentialJson {
    pub degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

/// Lossless JSON export of a based chain complex.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub schema_version: u32,
    pub kind: String,
    pub degrees: Vec<DegreeJson>,
    pub differentials: Vec<DifferentialJson>,
}

/// Serializes a complex: bases as display strings, coefficients exact.
pub fn export_complex<K: Ord + Clone + std::fmt::Display>(
    kind: &str,
    cx: &BasedChainComplex<K>,
) -> ComplexJson {
    let mut degrees = Vec::new();
    let mut differentials = Vec::new();
    for n in cx.degrees() {
        degrees.push(DegreeJson {
            degree: n,
            dim: cx.dim(n),
            basis: cx.basis(n).iter().map(|k| k.to_string()).collect(),
        });
        if n > cx.lo() {
            let d = cx.diff(n);
            differentials.push(DifferentialJson {
                degree: n,
                rows: d.rows(),
                cols: d.cols(),
                entries: d.triplets().into_iter().map(|(r, c, q)| (r, c, q.to_string())).collect(),
            });
        }
    }
    ComplexJson { schema_version: 1, kind: kind.to_string(), degrees, differentials }
}
