//! The verification suites behind `treebar verify`: each suite expands
//! into independent cells (label size × operad × object), the cells run on
//! a worker pool, and every cell — run or skipped — lands in the report.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;

use treebar_core::trees::{enumerate_trees, subsets};
use treebar_core::{
    build_K_operad, build_K_resolution, build_levelbar, build_N_category, build_N_operad,
    check_homotopy_operad, strict_to_homotopy, verify_factorization, Field, LabelSet, Operad,
};

use crate::formats::load_operad;
use crate::report::{CheckResult, Status};

/// Which suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// d² = 0 for every constructed complex.
    Dsquared,
    /// Bar homology of every contraction is one-dimensional in the edge
    /// degree (the Koszulness grid).
    Koszul,
    /// Augmented Koszul resolutions are acyclic.
    Resolution,
    /// The comparison map factors through the level complex: chain maps,
    /// the exact identity, and the three quasi-isomorphisms.
    Factorization,
    /// Strict operads satisfy the operad-up-to-homotopy relations.
    Homotopy,
    /// Everything above.
    All,
}

/// Resolved configuration for a suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub field: Field,
    pub max_labels: usize,
    /// Explicit label set; overrides the `2..=max_labels` grid.
    pub labels: Option<LabelSet>,
    /// Operad specs (builtin names or file paths); empty = suite default.
    pub operads: Vec<String>,
    /// Negate one composition line before running (fault injection).
    pub perturb_sign: bool,
}

impl SuiteConfig {
    fn sizes(&self) -> Vec<usize> {
        match &self.labels {
            Some(l) => vec![l.len()],
            None => (2..=self.max_labels).collect(),
        }
    }

    fn labels_for(&self, n: usize) -> LabelSet {
        match &self.labels {
            Some(l) => l.clone(),
            None => LabelSet::ints(n),
        }
    }

    fn operad_specs(&self, default: &[&str]) -> Vec<String> {
        if self.operads.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.operads.clone()
        }
    }
}

/// Negates the `∘_1` composition of the first arity-2 basis element with
/// itself; needs arity 3 in the truncation.
fn perturb(op: &mut Operad) -> Result<()> {
    let b = op
        .species()
        .basis(2)
        .first()
        .cloned()
        .context("nothing to perturb: arity 2 is empty")?;
    op.perturb_composition_sign(2, 2, 1, &b, &b)
        .map_err(|e| anyhow::anyhow!("perturbation failed: {e}"))
}

/// Builds the operad for one cell, optionally injecting the sign fault.
fn cell_operad(spec: &str, max_arity: usize, perturb_sign: bool) -> Result<Operad> {
    let mut op = load_operad(spec, max_arity)?;
    if perturb_sign {
        perturb(&mut op)?;
    }
    Ok(op)
}

type Job = Box<dyn FnOnce() -> Result<Option<String>> + Send>;

enum Planned {
    Run(String, Job),
    Skip(CheckResult),
}

fn run_cells(cells: Vec<Planned>) -> Vec<CheckResult> {
    cells
        .into_par_iter()
        .map(|cell| match cell {
            Planned::Skip(r) => r,
            Planned::Run(name, job) => {
                let start = Instant::now();
                let mut result = match job() {
                    Ok(None) => CheckResult::pass(name),
                    Ok(Some(witness)) => CheckResult::fail(name, witness),
                    Err(e) => CheckResult::fail(name, format!("error: {e:#}")),
                };
                result.millis = Some(start.elapsed().as_millis());
                result
            }
        })
        .collect()
}

/// When fault injection is requested but the cell is too small to hold the
/// fault (the negated table needs arity 3), the cell is skipped loudly.
fn skip_unperturbable(name: String) -> Planned {
    Planned::Skip(CheckResult::skip(
        name,
        "sign fault lives in the (2,2,1) composition table, which needs three labels",
    ))
}

fn dsquared_cells(cfg: &SuiteConfig) -> Vec<Planned> {
    let mut cells = Vec::new();
    for n in cfg.sizes() {
        let labels = cfg.labels_for(n);
        for spec in cfg.operad_specs(&["com", "ass", "free-binary"]) {
            for kind in ["N", "K", "level"] {
                let name = format!("dsquared/{kind}/{spec}/{n}");
                if cfg.perturb_sign && n < 3 {
                    cells.push(skip_unperturbable(name));
                    continue;
                }
                let labels = labels.clone();
                let spec = spec.clone();
                let perturb_sign = cfg.perturb_sign;
                cells.push(Planned::Run(
                    name,
                    Box::new(move || {
                        let p = cell_operad(&spec, labels.len(), perturb_sign)?;
                        let outcome = match kind {
                            "N" => build_N_operad(&labels, &p)?.verify_d_squared(),
                            "K" => build_K_operad(&labels, &p)?.verify_d_squared(),
                            _ => build_levelbar(&labels, &p, labels.len().saturating_sub(1).max(1))?
                                .verify_d_squared(),
                        };
                        Ok(outcome.err().map(|e| e.to_string()))
                    }),
                ));
            }
        }
        // Category-side complexes carry no operad and ignore the fault.
        let labels = cfg.labels_for(n);
        cells.push(Planned::Run(
            format!("dsquared/N-category/{n}"),
            Box::new(move || {
                for t in enumerate_trees(&labels) {
                    for e in subsets(t.clusters()) {
                        let s = t.contract(&e)?;
                        if let Err(err) = build_N_category(&t, &s)?.verify_d_squared() {
                            return Ok(Some(format!("{t} -> {s}: {err}")));
                        }
                    }
                }
                Ok(None)
            }),
        ));
        let labels = cfg.labels_for(n);
        cells.push(Planned::Run(
            format!("dsquared/K-resolution/{n}"),
            Box::new(move || {
                for t in enumerate_trees(&labels) {
                    for e in subsets(t.clusters()) {
                        let s = t.contract(&e)?;
                        for augmented in [false, true] {
                            if let Err(err) =
                                build_K_resolution(&t, &s, augmented)?.verify_d_squared()
                            {
                                return Ok(Some(format!("{t} -> {s}: {err}")));
                            }
                        }
                    }
                }
                Ok(None)
            }),
        ));
    }
    cells
}

fn koszul_cells(cfg: &SuiteConfig) -> Vec<Planned> {
    let mut cells = Vec::new();
    for n in cfg.sizes() {
        let field = cfg.field;
        for t in enumerate_trees(&cfg.labels_for(n)) {
            cells.push(Planned::Run(
                format!("koszul/{n}/{t}"),
                Box::new(move || {
                    for e in subsets(t.clusters()) {
                        let s = t.contract(&e)?;
                        let cx = build_N_category(&t, &s)?;
                        cx.verify_d_squared()?;
                        let betti = cx.betti(field)?.nonzero();
                        let want: BTreeMap<i64, usize> =
                            [(e.len() as i64, 1)].into_iter().collect();
                        if betti != want {
                            return Ok(Some(format!(
                                "betti of N at {t} -> {s} is {betti:?}, expected {want:?}"
                            )));
                        }
                    }
                    Ok(None)
                }),
            ));
        }
    }
    cells
}

fn resolution_cells(cfg: &SuiteConfig) -> Vec<Planned> {
    let mut cells = Vec::new();
    for n in cfg.sizes() {
        let field = cfg.field;
        for t in enumerate_trees(&cfg.labels_for(n)) {
            cells.push(Planned::Run(
                format!("resolution/{n}/{t}"),
                Box::new(move || {
                    for e in subsets(t.clusters()) {
                        let s = t.contract(&e)?;
                        let cx = build_K_resolution(&t, &s, true)?;
                        cx.verify_d_squared()?;
                        let betti = cx.betti(field)?;
                        if !betti.is_trivial() {
                            return Ok(Some(format!(
                                "augmented resolution at {t} -> {s} has homology {:?}",
                                betti.nonzero()
                            )));
                        }
                    }
                    Ok(None)
                }),
            ));
        }
    }
    cells
}

fn factorization_cells(cfg: &SuiteConfig) -> Vec<Planned> {
    let mut cells = Vec::new();
    for n in cfg.sizes() {
        let labels = cfg.labels_for(n);
        for spec in cfg.operad_specs(&["com", "ass"]) {
            let name = format!("factorization/{spec}/{n}");
            if cfg.perturb_sign && n < 3 {
                cells.push(skip_unperturbable(name));
                continue;
            }
            let labels = labels.clone();
            let spec = spec.clone();
            let field = cfg.field;
            let perturb_sign = cfg.perturb_sign;
            cells.push(Planned::Run(
                name,
                Box::new(move || {
                    let p = cell_operad(&spec, labels.len(), perturb_sign)?;
                    let report = verify_factorization(&labels, &p, field)?;
                    if report.passed {
                        Ok(None)
                    } else {
                        Ok(Some(report.failures.join("; ")))
                    }
                }),
            ));
        }
    }
    cells
}

fn homotopy_cells(cfg: &SuiteConfig) -> Vec<Planned> {
    let i_max = cfg.sizes().into_iter().max().unwrap_or(2);
    let mut cells = Vec::new();
    for spec in cfg.operad_specs(&["com", "ass"]) {
        let name = format!("homotopy/{spec}/{i_max}");
        if cfg.perturb_sign && i_max < 3 {
            cells.push(skip_unperturbable(name));
            continue;
        }
        let spec = spec.clone();
        let perturb_sign = cfg.perturb_sign;
        cells.push(Planned::Run(
            name,
            Box::new(move || {
                let p = cell_operad(&spec, i_max, perturb_sign)?;
                let h = strict_to_homotopy(&p, i_max)?;
                let report = check_homotopy_operad(&h, i_max)?;
                if report.passed {
                    Ok(None)
                } else {
                    Ok(Some(report.failures.join("; ")))
                }
            }),
        ));
    }
    cells
}

/// Expands and runs one suite (or all of them), in deterministic order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut cells = Vec::new();
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Dsquared,
            Suite::Koszul,
            Suite::Resolution,
            Suite::Factorization,
            Suite::Homotopy,
        ],
        s => return run_cells(single_suite_cells(s, cfg)),
    };
    for s in suites {
        cells.extend(single_suite_cells(*s, cfg));
    }
    run_cells(cells)
}

fn single_suite_cells(suite: Suite, cfg: &SuiteConfig) -> Vec<Planned> {
    match suite {
        Suite::Dsquared => dsquared_cells(cfg),
        Suite::Koszul => koszul_cells(cfg),
        Suite::Resolution => resolution_cells(cfg),
        Suite::Factorization => factorization_cells(cfg),
        Suite::Homotopy => homotopy_cells(cfg),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

/// True when every non-skipped check passed.
pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}
