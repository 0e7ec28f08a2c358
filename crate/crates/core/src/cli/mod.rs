//! Command-line front end: `analyze`, `catalog` and `trace`.

pub mod catalog;
pub mod dsl;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::exactalg::rational::parse_rational;
use crate::exactalg::Rational;
use crate::reduction::{trace_integral_curve, Direction};
use dsl::{parse_document, SystemDocument};
use report::{analyze, AnalysisOptions, PointSelection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pfaff", version, about = "Exact analysis of Pfaffian systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a system file
    Analyze(AnalyzeArgs),
    /// Built-in example systems
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Trace an integral curve and write it as CSV
    Trace(TraceArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    /// System to analyze (default: the first one declared)
    #[arg(long)]
    system: Option<String>,
    /// Named point of the document
    #[arg(long, conflicts_with = "coords")]
    point: Option<String>,
    /// Comma-separated rational coordinates
    #[arg(long, allow_hyphen_values = true)]
    coords: Option<String>,
    /// Only use this seed set for seeded chains
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest annihilator dimension for the maximal-element search
    #[arg(long, default_value_t = crate::integral::DEFAULT_SEARCH_LIMIT)]
    search_limit: usize,
    /// Random sections sampled for the section gender (0 disables)
    #[arg(long, default_value_t = 0)]
    section_samples: usize,
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// List the built-in entries
    List,
    /// Print an entry's document and expectations
    Show { name: String },
    /// Check every expectation of every entry
    RunAll {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct TraceArgs {
    file: PathBuf,
    #[arg(long)]
    system: Option<String>,
    /// Start point name (`origin` if the document has no such point)
    #[arg(long)]
    from: String,
    /// Index of the annihilator basis vector to follow
    #[arg(long)]
    dir: usize,
    #[arg(long)]
    step: f64,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    csv: PathBuf,
}

/// Runs the tool and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Catalog { action } => cmd_catalog(action, out),
        Command::Trace(t) => cmd_trace(t, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn analysis(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_ANALYSIS,
        message: message.to_string(),
    }
}

fn load(path: &Path) -> Result<(String, SystemDocument), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let doc = parse_document(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((text, doc))
}

fn parse_coords(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| parse_rational(s).map_err(|e| usage(format!("--coords: {e}"))))
        .collect()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| analysis(format!("{}: {e}", p.display()))),
        None => out.write_all(body.as_bytes()).map_err(analysis),
    }
}

fn cmd_analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (text, doc) = load(&a.file)?;
    let points = match (&a.point, &a.coords) {
        (Some(p), _) => PointSelection::Named(p.clone()),
        (None, Some(c)) => PointSelection::Coords(parse_coords(c)?),
        (None, None) => PointSelection::All,
    };
    let options = AnalysisOptions {
        system: a.system,
        points,
        seed: a.seed,
        search_limit: a.search_limit,
        section_samples: a.section_samples,
    };
    let report = analyze(&doc, &text, &options).map_err(|e| match e {
        report::AnalysisError::Document(d) => usage(d),
        other => usage(other),
    })?;
    let body = if a.json {
        report::to_json(&report) + "\n"
    } else {
        report::to_text(&report)
    };
    emit(out, a.out.as_deref(), &body)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OutcomeJson<'a> {
    point: &'a str,
    check: &'a str,
    expected: &'a str,
    actual: &'a str,
    passed: bool,
    source: String,
    note: &'a str,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    name: &'a str,
    input_digest: String,
    passed: bool,
    outcomes: Vec<OutcomeJson<'a>>,
}

#[derive(Serialize)]
struct RunAllJson<'a> {
    schema_version: u32,
    tool: report::Tool,
    passed: bool,
    checks: usize,
    failures: usize,
    entries: Vec<EntryJson<'a>>,
}

fn cmd_catalog(action: CatalogAction, out: &mut dyn Write) -> Result<i32, Failure> {
    let entries = catalog::entries();
    match action {
        CatalogAction::List => {
            let mut body = String::new();
            for e in &entries {
                body.push_str(&format!("{:<18} {}\n", e.name, e.description));
            }
            emit(out, None, &body)?;
            Ok(EXIT_OK)
        }
        CatalogAction::Show { name } => {
            let e = catalog::entry(&name).ok_or_else(|| usage(format!("no catalog entry named {name}")))?;
            let mut body = format!("# {}: {}\n{}", e.name, e.description, e.text);
            if let Some(s) = e.designated_seed {
                body.push_str(&format!("# designated chain: seed {s}\n"));
            }
            for x in &e.expectations {
                body.push_str(&format!(
                    "# expect at {}: {} = {} ({}: {})\n",
                    x.point,
                    x.check,
                    x.check.expected(),
                    x.source,
                    x.note
                ));
            }
            emit(out, None, &body)?;
            Ok(EXIT_OK)
        }
        CatalogAction::RunAll { json } => {
            let results: Vec<(catalog::Entry, Vec<catalog::Outcome>)> =
                entries.into_iter().map(|e| {
                    let o = catalog::run_entry(&e);
                    (e, o)
                }).collect();
            let checks: usize = results.iter().map(|(_, o)| o.len()).sum();
            let failures: usize = results.iter().map(|(_, o)| o.iter().filter(|x| !x.passed).count()).sum();
            let body = if json {
                let doc = RunAllJson {
                    schema_version: report::SCHEMA_VERSION,
                    tool: report::Tool {
                        name: env!("CARGO_PKG_NAME"),
                        version: env!("CARGO_PKG_VERSION"),
                    },
                    passed: failures == 0,
                    checks,
                    failures,
                    entries: results
                        .iter()
                        .map(|(e, o)| EntryJson {
                            name: e.name,
                            input_digest: report::digest(e.text),
                            passed: o.iter().all(|x| x.passed),
                            outcomes: o
                                .iter()
                                .map(|x| OutcomeJson {
                                    point: &x.point,
                                    check: &x.check,
                                    expected: &x.expected,
                                    actual: &x.actual,
                                    passed: x.passed,
                                    source: x.source.to_string(),
                                    note: &x.note,
                                })
                                .collect(),
                        })
                        .collect(),
                };
                serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
            } else {
                let mut body = String::new();
                for (e, outcomes) in &results {
                    for x in outcomes {
                        if x.passed {
                            body.push_str(&format!("PASS {} @{}: {} = {} ({})\n", e.name, x.point, x.check, x.actual, x.source));
                        } else {
                            body.push_str(&format!(
                                "FAIL {} @{}: {}: expected {}, got {} ({}: {})\n",
                                e.name, x.point, x.check, x.expected, x.actual, x.source, x.note
                            ));
                        }
                    }
                }
                body.push_str(&format!("{checks} checks, {failures} failed\n"));
                body
            };
            emit(out, None, &body)?;
            Ok(if failures == 0 { EXIT_OK } else { EXIT_ANALYSIS })
        }
    }
}


fn cmd_trace(t: TraceArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (_, doc) = load(&t.file)?;
    let (_, system) = doc.system(t.system.as_deref()).map_err(usage)?;
    let start = match doc.point(&t.from) {
        Ok(p) => p.to_vec(),
        Err(_) if t.from == "origin" => system.origin(),
        Err(e) => return Err(usage(e)),
    };
    let curve = trace_integral_curve(&system, &start, &Direction::Basis(t.dir), t.step, t.count).map_err(analysis)?;
    std::fs::write(&t.csv, curve.to_csv(system.coordinates(), system.labels()))
        .map_err(|e| analysis(format!("{}: {e}", t.csv.display())))?;
    emit(
        out,
        None,
        &format!(
            "{} samples written to {}; max residual {:e}\n",
            curve.samples.len(),
            t.csv.display(),
            curve.max_residual
        ),
    )?;
    Ok(EXIT_OK)
}
