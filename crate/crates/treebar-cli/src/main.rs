//! `treebar`: enumerate reduced trees, compute exact homology of the bar
//! and Koszul complexes, and run the verification suites.
//!
//! Exit codes: 0 when every executed check passed, 1 when a verification
//! check failed, 2 on usage or input errors.

mod formats;
mod report;
mod suites;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treebar_core::trees::enumerate_trees;
use treebar_core::{
    build_K_category, build_K_operad, build_N_category, build_N_operad, BasedChainComplex, Field,
    Tree,
};

use formats::{export_complex, load_operad, parse_field, parse_labels};
use report::{betti_csv, betti_string, ConfigEcho, VerificationReport};
use suites::{all_passed, run_suite, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "treebar", version, about = "Exact homological algebra over the category of rooted trees")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// The normalized bar complex.
    #[value(name = "N")]
    N,
    /// The Koszul complex.
    #[value(name = "K")]
    K,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lists the reduced trees on a label set in canonical order.
    Trees {
        /// Comma-separated labels, e.g. `1,2,3`.
        #[arg(long)]
        labels: String,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
        #[arg(long, value_enum, default_value_t = Output::Table)]
        output: Output,
    },
    /// Computes the Betti table of one bar or Koszul complex.
    Homology {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Labels for the operad-coefficient complexes (with --operad).
        #[arg(long)]
        labels: Option<String>,
        /// Operad: builtin (`com`, `ass`, `free-binary`, `nilpotent:k`) or
        /// a JSON description file.
        #[arg(long)]
        operad: Option<String>,
        /// Source tree for the category-coefficient complexes (with --s).
        #[arg(long)]
        tree: Option<String>,
        /// Target tree: a tree literal or `corolla`.
        #[arg(long)]
        s: Option<String>,
        /// Coefficient pair for the category side; only the atomic modules
        /// `bs,bt` are supported.
        #[arg(long, default_value = "bs,bt")]
        coeff: String,
        /// `q` or `fp:<prime>`.
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, value_enum, default_value_t = Output::Table)]
        output: Output,
        /// Write the Betti table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the full complex (bases and differentials) as JSON.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Runs a verification suite; exit code 0 iff every check passed.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest label-set size in the grid (2..=5; 5 needs fp + com).
        #[arg(long, default_value_t = 4)]
        max_labels: usize,
        /// Run one explicit label set instead of the grid.
        #[arg(long)]
        labels: Option<String>,
        /// Restrict to one operad (builtin name or JSON file).
        #[arg(long)]
        operad: Option<String>,
        /// `q` or `fp:<prime>`.
        #[arg(long, default_value = "q")]
        field: String,
        /// Inject a fault: `sign` negates one composition line.
        #[arg(long)]
        perturb: Option<String>,
        #[arg(long, value_enum, default_value_t = Output::Table)]
        output: Output,
        /// Omit all timing fields (byte-deterministic output).
        #[arg(long)]
        no_timing: bool,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Trees { labels, count_only, output } => cmd_trees(&labels, count_only, output),
        Cmd::Homology { kind, labels, operad, tree, s, coeff, field, output, csv, export } => {
            cmd_homology(HomologyArgs {
                kind,
                labels,
                operad,
                tree,
                s,
                coeff,
                field,
                output,
                csv,
                export,
            })
        }
        Cmd::Verify {
            suite,
            max_labels,
            labels,
            operad,
            field,
            perturb,
            output,
            no_timing,
            report,
        } => cmd_verify(VerifyArgs {
            suite,
            max_labels,
            labels,
            operad,
            field,
            perturb,
            output,
            no_timing,
            report,
        }),
    }
}

#[derive(Serialize)]
struct TreesOut {
    labels: String,
    count: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trees: Vec<String>,
}

fn cmd_trees(labels: &str, count_only: bool, output: Output) -> Result<ExitCode> {
    let labels = parse_labels(labels)?;
    let trees = enumerate_trees(&labels);
    let out = TreesOut {
        labels: labels.to_string(),
        count: trees.len(),
        trees: if count_only { Vec::new() } else { trees.iter().map(|t| t.to_string()).collect() },
    };
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Output::Table => {
            for t in &out.trees {
                println!("{t}");
            }
            println!("count: {}", out.count);
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct HomologyArgs {
    kind: Kind,
    labels: Option<String>,
    operad: Option<String>,
    tree: Option<String>,
    s: Option<String>,
    coeff: String,
    field: String,
    output: Output,
    csv: Option<PathBuf>,
    export: Option<PathBuf>,
}

#[derive(Serialize)]
struct HomologyOut {
    schema_version: u32,
    kind: String,
    object: String,
    field: String,
    dims: BTreeMap<i64, usize>,
    betti: BTreeMap<i64, usize>,
}

/// Betti + dims of a complex, refusing to continue when d² != 0.
fn homology_of<K: Ord + Clone + std::fmt::Display>(
    cx: &BasedChainComplex<K>,
    field: Field,
) -> Result<(BTreeMap<i64, usize>, BTreeMap<i64, usize>)> {
    cx.verify_d_squared().map_err(|e| anyhow::anyhow!("refusing to compute homology: {e}"))?;
    let betti = cx.betti(field)?;
    let dims = cx.degrees().filter(|&n| cx.dim(n) > 0).map(|n| (n, cx.dim(n))).collect();
    Ok((dims, betti.nonzero()))
}

fn cmd_homology(args: HomologyArgs) -> Result<ExitCode> {
    let field = parse_field(&args.field)?;
    let kind_name = match args.kind {
        Kind::N => "N",
        Kind::K => "K",
    };
    let (object, dims, betti, export_json) = match (&args.tree, &args.labels) {
        (Some(tree), None) => {
            if args.coeff != "bs,bt" {
                bail!("--coeff {:?} is not supported; the atomic pair `bs,bt` is", args.coeff);
            }
            let t: Tree = tree.parse().map_err(|e| anyhow::anyhow!("bad --tree: {e}"))?;
            let s: Tree = match args.s.as_deref() {
                Some("corolla") | None => Tree::corolla(t.labels().clone()),
                Some(lit) => lit.parse().map_err(|e| anyhow::anyhow!("bad --s: {e}"))?,
            };
            let object = format!("{t} -> {s}");
            match args.kind {
                Kind::N => {
                    let cx = build_N_category(&t, &s)?;
                    let (dims, betti) = homology_of(&cx, field)?;
                    (object, dims, betti, export_complex("N", &cx))
                }
                Kind::K => {
                    let cx = build_K_category(&t, &s)?;
                    let (dims, betti) = homology_of(&cx, field)?;
                    (object, dims, betti, export_complex("K", &cx))
                }
            }
        }
        (None, Some(labels)) => {
            let labels = parse_labels(labels)?;
            let spec = args.operad.as_deref().context("--labels needs --operad")?;
            let p = load_operad(spec, labels.len())?;
            let object = format!("{} on {labels}", p.species().name());
            match args.kind {
                Kind::N => {
                    let cx = build_N_operad(&labels, &p)?;
                    let (dims, betti) = homology_of(&cx, field)?;
                    (object, dims, betti, export_complex("N", &cx))
                }
                Kind::K => {
                    let cx = build_K_operad(&labels, &p)?;
                    let (dims, betti) = homology_of(&cx, field)?;
                    (object, dims, betti, export_complex("K", &cx))
                }
            }
        }
        _ => bail!("pass either --tree [--s] (category coefficients) or --labels --operad"),
    };
    if let Some(path) = &args.csv {
        std::fs::write(path, betti_csv(&betti)).with_context(|| format!("writing {path:?}"))?;
    }
    if let Some(path) = &args.export {
        std::fs::write(path, serde_json::to_string_pretty(&export_json)?)
            .with_context(|| format!("writing {path:?}"))?;
    }
    let out = HomologyOut {
        schema_version: 1,
        kind: kind_name.to_string(),
        object,
        field: field.to_string(),
        dims,
        betti,
    };
    match args.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Output::Table => {
            println!("{} complex of {}, field {}", out.kind, out.object, out.field);
            println!("dims  {}", betti_string(&out.dims));
            println!("betti {}", betti_string(&out.betti));
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct VerifyArgs {
    suite: Suite,
    max_labels: usize,
    labels: Option<String>,
    operad: Option<String>,
    field: String,
    perturb: Option<String>,
    output: Output,
    no_timing: bool,
    report: Option<PathBuf>,
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let field = parse_field(&args.field)?;
    let labels = args.labels.as_deref().map(parse_labels).transpose()?;
    let perturb_sign = match args.perturb.as_deref() {
        None => false,
        Some("sign") => true,
        Some(other) => bail!("unknown perturbation {other:?}; `sign` is supported"),
    };
    let max_size = labels.as_ref().map(|l| l.len()).unwrap_or(args.max_labels);
    if max_size < 2 {
        bail!("the grid needs at least two labels");
    }
    if max_size > 5 {
        bail!("label sets above five explode combinatorially; the cap is 5");
    }
    let operads: Vec<String> = args.operad.iter().cloned().collect();
    if max_size == 5 {
        if field == Field::Rational {
            bail!("five labels need a prime field; pass --field fp:101");
        }
        let operad_backed = matches!(
            args.suite,
            Suite::Dsquared | Suite::Factorization | Suite::Homotopy | Suite::All
        );
        if operad_backed && operads != ["com".to_string()] {
            bail!("five labels run with the com operad only; pass --operad com");
        }
    }

    let cfg = SuiteConfig {
        field,
        max_labels: args.max_labels,
        labels,
        operads,
        perturb_sign,
    };
    let workers = read_workers()?;
    let start = Instant::now();
    let checks = match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .context("building the worker pool")?;
            pool.install(|| run_suite(args.suite, &cfg))
        }
        None => run_suite(args.suite, &cfg),
    };
    let passed = all_passed(&checks);

    let command: Vec<String> = std::env::args().skip(1).collect();
    let config = ConfigEcho {
        field: field.to_string(),
        max_labels: args.max_labels,
        labels: cfg.labels.as_ref().map(|l| l.to_string()),
        operads: cfg.operads.clone(),
        perturb: perturb_sign.then(|| "sign".to_string()),
        workers,
    };
    let mut report = VerificationReport::new(&command.join(" "), config, checks);
    report.total_millis = Some(start.elapsed().as_millis());
    if args.no_timing {
        report.strip_timing();
    }

    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {path:?}"))?;
    }
    match args.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Output::Table => print!("{}", report.table()),
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

/// `TREEBAR_WORKERS`: size of the worker pool; unset = rayon's default.
fn read_workers() -> Result<Option<usize>> {
    match std::env::var("TREEBAR_WORKERS") {
        Err(_) => Ok(None),
        Ok(v) => {
            let k: usize = v.parse().with_context(|| format!("bad TREEBAR_WORKERS {v:?}"))?;
            if k == 0 {
                bail!("TREEBAR_WORKERS must be at least 1");
            }
            Ok(Some(k))
        }
    }
}
