//! The verification report: one record per executed check, with JSON,
//! table and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Status of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One executed (or deliberately skipped) check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    /// Stable slash-separated name, e.g. `koszul/3/{1,2,3}|[[1,2]]`.
    pub name: String,
    pub status: Status,
    /// First failure witness, or the reason for a skip.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Betti table attached to homology checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betti: Option<BTreeMap<i64, usize>>,
    /// Wall time, omitted under `--no-timing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult { name: name.into(), status: Status::Pass, witness: None, betti: None, millis: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
            betti: None,
            millis: None,
        }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: Status::Skip,
            witness: Some(reason.into()),
            betti: None,
            millis: None,
        }
    }
}

/// Echo of the resolved configuration, for reproducibility.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub field: String,
    pub max_labels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
    pub operads: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// The full machine-readable report of a `verify` run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub command: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_millis: Option<u128>,
}

impl VerificationReport {
    pub fn new(command: &str, config: ConfigEcho, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        VerificationReport {
            schema_version: 1,
            command: command.to_string(),
            config,
            checks,
            passed,
            total_millis: None,
        }
    }

    /// Removes every timing field, making the report byte-deterministic.
    pub fn strip_timing(&mut self) {
        self.total_millis = None;
        for c in &mut self.checks {
            c.millis = None;
        }
    }

    /// Plain-text table rendering.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(out, "{status}  {:width$}", c.name);
            if let Some(ms) = c.millis {
                let _ = write!(out, "  {ms} ms");
            }
            if let Some(b) = &c.betti {
                let _ = write!(out, "  betti {}", betti_string(b));
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "      {w}");
            }
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let skipped = self.checks.iter().filter(|c| c.status == Status::Skip).count();
        let _ = write!(
            out,
            "{} checks: {} passed, {failed} failed, {skipped} skipped",
            self.checks.len(),
            self.checks.len() - failed - skipped,
        );
        if let Some(ms) = self.total_millis {
            let _ = write!(out, " ({ms} ms)");
        }
        out.push('\n');
        out
    }
}

/// `{1: 2, 3: 1}` rendering of a Betti table.
pub fn betti_string(b: &BTreeMap<i64, usize>) -> String {
    let mut out = String::from("{");
    for (i, (n, d)) in b.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{n}: {d}");
    }
    out.push('}');
    out
}

/// `degree,dim` CSV rendering of a Betti table (zero rows omitted).
pub fn betti_csv(b: &BTreeMap<i64, usize>) -> String {
    let mut out = String::from("degree,dim\n");
    for (n, d) in b {
        let _ = writeln!(out, "{n},{d}");
    }
    out
}
