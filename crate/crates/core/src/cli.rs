//! The `qgen` command line.
//!
//! Exit codes: 0 on success, 1 when a generation verdict is not a pass (or
//! a suite result is not as expected), 2 on usage and input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diagrams::{enumerate, gram_matrix, DiagramFamily};
use crate::exact_linalg::{dim_intersection, dim_span, intersect};
use crate::fixed_spaces::{fixed_space, lie_kernel_oracle, GroupFamily, GroupSpec};
use crate::gencheck::{
    run_generation_check, run_paper_suite, CheckOptions, GenerationReport, GenerationTask, Overall,
    SuiteConfig, SuiteInstance, SuiteReport, Verdict, WordFilter,
};
use crate::limits::Limits;
use crate::words::{parse_word, ColoredWord, Dimension};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn group_names() -> PossibleValuesParser {
    PossibleValuesParser::new(GroupFamily::ALL.map(GroupFamily::name))
}

fn family_names() -> PossibleValuesParser {
    PossibleValuesParser::new(DiagramFamily::ALL.map(DiagramFamily::name))
}

fn instance_names() -> PossibleValuesParser {
    PossibleValuesParser::new(SuiteInstance::ALL.map(SuiteInstance::name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "qgen",
    version,
    about = "Exact fixed-space computations for classical and free quantum groups",
    long_about = "Exact fixed-space computations for classical and free quantum groups.\n\n\
Words use 'u' for the fundamental representation V and 'U' for its dual V*.\n\
Group families: classical-u, classical-o, classical-s, free-u, free-o, free-s,\n\
torus-abelian, torus-free-group, torus-z2, embedded-free-u-lower.\n\
Diagram families: all-pairings, nc-pairings, matched, nc-matched,\n\
all-partitions, nc-partitions.\n\n\
A generation pass certifies agreement of fixed spaces up to the word-length\n\
cap only; it is evidence, not a proof."
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for generation checks (0 = one per core)
    #[arg(long, default_value_t = 0, global = true)]
    pub workers: usize,
    /// Longest word any command will materialize
    #[arg(long, default_value_t = Limits::DEFAULT_MAX_WORD_LEN, global = true)]
    pub max_word_len: usize,
    /// Largest number of entries a single tensor or ambient space may have
    #[arg(long, default_value_t = Limits::DEFAULT_MAX_ENTRIES, global = true)]
    pub max_entries: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the diagrams of a family on a word
    Enumerate {
        #[arg(long, value_parser = family_names())]
        family: String,
        /// Word over {u, U}; may be empty
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Gram matrix N^{loops} of a diagram family and its exact rank
    Gram {
        #[arg(long, value_parser = family_names())]
        family: String,
        #[arg(long)]
        word: String,
        #[arg(long = "N")]
        n: u32,
    },
    /// Dimension of the fixed space of a group on a word
    Fixdim {
        #[arg(long, value_parser = group_names())]
        group: String,
        #[arg(long)]
        word: String,
        #[arg(long = "N")]
        n: u32,
        /// Also compute the Lie-algebra kernel (classical-u, classical-o, torus-abelian)
        #[arg(long)]
        oracle: bool,
    },
    /// Dimension of the intersection of several fixed spaces on one word
    Intersect {
        #[arg(long, value_parser = group_names(), value_delimiter = ',', required = true)]
        groups: Vec<String>,
        #[arg(long)]
        word: String,
        #[arg(long = "N")]
        n: u32,
    },
    /// Check target = <subgroups> on every word up to --max-len
    Gencheck {
        #[arg(long, value_parser = group_names())]
        target: String,
        #[arg(long, value_parser = group_names(), value_delimiter = ',', required = true)]
        subgroups: Vec<String>,
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        max_len: usize,
        /// Only check the uncolored words u, uu, uuu, ... (required for orthogonal targets)
        #[arg(long)]
        uncolored: bool,
    },
    /// Run the generation statements and the two negative controls
    PaperSuite {
        #[arg(long = "N", value_delimiter = ',', default_values_t = [2u32, 3])]
        n_list: Vec<u32>,
        /// Word length for colored instances
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Word length for uncolored instances
        #[arg(long, default_value_t = 8)]
        max_len_uncolored: usize,
        /// Restrict to these instances (default: all that apply)
        #[arg(long, value_parser = instance_names(), value_delimiter = ',')]
        instances: Vec<String>,
    },
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

struct Output {
    text: String,
    code: i32,
}

fn dimension(n: u32) -> Result<Dimension, CliError> {
    Dimension::new(n).map_err(|e| CliError(format!("--N: {e}")))
}

fn word(s: &str) -> Result<ColoredWord, CliError> {
    parse_word(s).map_err(|e| CliError(format!("--word: {e}")))
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn opt(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Skipped => "skipped",
    }
}

/// One CSV row per word: `word, <dim per subgroup>, intersection, target, verdict`.
pub fn gencheck_csv(report: &GenerationReport) -> String {
    let names: Vec<String> = report
        .task
        .subgroups
        .iter()
        .map(|s| s.family.name().to_string())
        .collect();
    let mut header = vec!["word".to_string()];
    header.extend(names.iter().cloned());
    header.extend(["intersection", "target", "verdict"].map(String::from));
    let rows: Vec<Vec<String>> = report
        .words
        .iter()
        .map(|r| {
            let mut row = vec![r.word.to_string()];
            row.extend(names.iter().map(|n| opt(r.dims.get(n).copied())));
            row.extend([
                opt(r.intersection),
                opt(r.target),
                verdict_name(r.verdict).to_string(),
            ]);
            row
        })
        .collect();
    csv_text(&header, &rows).expect("in-memory csv")
}

/// Long format: one row per (instance, word).
pub fn suite_csv(report: &SuiteReport) -> String {
    let header: Vec<String> = [
        "instance",
        "N",
        "word",
        "subgroup_a",
        "dim_a",
        "subgroup_b",
        "dim_b",
        "intersection",
        "target",
        "verdict",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::new();
    for entry in &report.entries {
        let subs: Vec<&str> = entry
            .report
            .task
            .subgroups
            .iter()
            .map(|s| s.family.name())
            .collect();
        for r in &entry.report.words {
            let mut row = vec![
                entry.instance.name().to_string(),
                entry.report.task.n.to_string(),
                r.word.to_string(),
            ];
            for k in 0..2 {
                match subs.get(k) {
                    Some(name) => {
                        row.push(name.to_string());
                        row.push(opt(r.dims.get(*name).copied()));
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            row.extend([
                opt(r.intersection),
                opt(r.target),
                verdict_name(r.verdict).to_string(),
            ]);
            rows.push(row);
        }
    }
    csv_text(&header, &rows).expect("in-memory csv")
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let c = &cli.common;
    let limits = Limits {
        max_word_len: c.max_word_len,
        max_entries: c.max_entries,
    };
    let options = CheckOptions {
        workers: c.workers,
        limits,
    };
    let ok = |text: String| {
        Ok(Output {
            text,
            code: EXIT_OK,
        })
    };

    match &cli.command {
        Command::Enumerate { family, word: w } => {
            let family: DiagramFamily = family.parse()?;
            let w = word(w)?;
            let ds = enumerate(family, &w, &limits)?;
            match c.format {
                Format::Json => ok(json_text(&json!({
                    "family": family,
                    "word": w,
                    "count": ds.len(),
                    "diagrams": ds,
                }))),
                Format::Csv => ok(csv_text(
                    &["index".into(), "blocks".into()],
                    &ds.iter()
                        .enumerate()
                        .map(|(i, d)| vec![(i + 1).to_string(), d.to_string()])
                        .collect::<Vec<_>>(),
                )?),
            }
        }
        Command::Gram { family, word: w, n } => {
            let family: DiagramFamily = family.parse()?;
            let w = word(w)?;
            let ds = enumerate(family, &w, &limits)?;
            let g = gram_matrix(&ds, dimension(*n)?)?;
            let rank = g.rank();
            let matrix: Vec<Vec<String>> = (0..g.nrows())
                .map(|i| g.row(i).iter().map(|x| x.to_string()).collect())
                .collect();
            match c.format {
                Format::Json => {
                    let numeric: Vec<Vec<serde_json::Value>> = matrix
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|x| x.parse::<u64>().map_or_else(|_| json!(x), |v| json!(v)))
                                .collect()
                        })
                        .collect();
                    ok(json_text(&json!({
                        "family": family,
                        "word": w,
                        "N": n,
                        "diagrams": ds,
                        "matrix": numeric,
                        "rank": rank,
                    })))
                }
                Format::Csv => {
                    let mut header = vec!["diagram".to_string(), "rank".to_string()];
                    header.extend(ds.iter().map(|d| d.to_string()));
                    let rows: Vec<Vec<String>> = ds
                        .iter()
                        .zip(matrix)
                        .map(|(d, r)| {
                            let mut row = vec![d.to_string(), rank.to_string()];
                            row.extend(r);
                            row
                        })
                        .collect();
                    ok(csv_text(&header, &rows)?)
                }
            }
        }
        Command::Fixdim {
            group,
            word: w,
            n,
            oracle,
        } => {
            let spec = GroupSpec::new(group.parse()?, dimension(*n)?)?;
            let w = word(w)?;
            let space = fixed_space(&spec, &w, &limits)?;
            let dim = dim_span(&space);
            let oracle_dim = if *oracle {
                Some(dim_span(&lie_kernel_oracle(&spec, &w, &limits)?))
            } else {
                None
            };
            match c.format {
                Format::Json => ok(json_text(&json!({
                    "group": spec.family,
                    "N": n,
                    "word": w,
                    "spanning_vectors": space.len(),
                    "dim": dim,
                    "oracle_dim": oracle_dim,
                }))),
                Format::Csv => ok(csv_text(
                    &[
                        "group",
                        "N",
                        "word",
                        "spanning_vectors",
                        "dim",
                        "oracle_dim",
                    ]
                    .map(String::from),
                    &[vec![
                        spec.family.to_string(),
                        n.to_string(),
                        w.to_string(),
                        space.len().to_string(),
                        dim.to_string(),
                        opt(oracle_dim),
                    ]],
                )?),
            }
        }
        Command::Intersect { groups, word: w, n } => {
            let n_dim = dimension(*n)?;
            let w = word(w)?;
            let specs = groups
                .iter()
                .map(|g| Ok(GroupSpec::new(g.parse()?, n_dim)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let spaces = specs
                .iter()
                .map(|s| fixed_space(s, &w, &limits))
                .collect::<Result<Vec<_>, _>>()?;
            let dims: Vec<usize> = spaces.iter().map(dim_span).collect();
            let intersection = match spaces.as_slice() {
                [only] => dim_span(only),
                [first, rest @ ..] => {
                    let mut acc = first.clone();
                    for s in &rest[..rest.len() - 1] {
                        acc = intersect(&acc, s)?;
                    }
                    dim_intersection(&acc, &rest[rest.len() - 1])?
                }
                [] => unreachable!("clap requires at least one group"),
            };
            match c.format {
                Format::Json => {
                    let dims_obj: serde_json::Map<String, serde_json::Value> = specs
                        .iter()
                        .zip(&dims)
                        .map(|(s, d)| (s.family.to_string(), json!(d)))
                        .collect();
                    ok(json_text(&json!({
                        "word": w,
                        "N": n,
                        "dims": dims_obj,
                        "intersection": intersection,
                    })))
                }
                Format::Csv => {
                    let mut header = vec!["word".to_string(), "N".to_string()];
                    header.extend(specs.iter().map(|s| s.family.to_string()));
                    header.push("intersection".into());
                    let mut row = vec![w.to_string(), n.to_string()];
                    row.extend(dims.iter().map(|d| d.to_string()));
                    row.push(intersection.to_string());
                    ok(csv_text(&header, &[row])?)
                }
            }
        }
        Command::Gencheck {
            target,
            subgroups,
            n,
            max_len,
            uncolored,
        } => {
            let subs = subgroups
                .iter()
                .map(|s| s.parse::<GroupFamily>())
                .collect::<Result<Vec<_>, _>>()?;
            let filter = if *uncolored {
                WordFilter::UncoloredOnly
            } else {
                WordFilter::AllColorings
            };
            let task =
                GenerationTask::new(target.parse()?, &subs, dimension(*n)?, *max_len, filter)?;
            let report = run_generation_check(&task, &options)?;
            eprintln!(
                "{}: {} ({})",
                report.statement, report.overall, report.claim
            );
            let text = match c.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => gencheck_csv(&report),
            };
            Ok(Output {
                text,
                code: if report.overall == Overall::Pass {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                },
            })
        }
        Command::PaperSuite {
            n_list,
            max_len,
            max_len_uncolored,
            instances,
        } => {
            let instances = if instances.is_empty() {
                None
            } else {
                Some(
                    instances
                        .iter()
                        .map(|s| s.parse::<SuiteInstance>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(CliError)?,
                )
            };
            let config = SuiteConfig {
                n_list: n_list.clone(),
                max_len: *max_len,
                max_len_uncolored: *max_len_uncolored,
                instances,
            };
            let report = run_paper_suite(&config, &options)?;
            for e in &report.entries {
                eprintln!(
                    "[{}] {} {}: {} (expected {}, {} ms)",
                    if e.as_expected { "ok" } else { "UNEXPECTED" },
                    e.instance.name(),
                    e.report.statement,
                    e.report.overall,
                    e.expected,
                    e.report.elapsed_ms,
                );
            }
            let text = match c.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => suite_csv(&report),
            };
            Ok(Output {
                text,
                code: if report.all_as_expected {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                },
            })
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn main(argv: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let output = match execute(&cli) {
        Ok(o) => o,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &output.text),
        None => std::io::stdout().write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    output.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_every_group_family() {
        let help = Cli::command().render_long_help().to_string();
        for g in GroupFamily::ALL {
            assert!(help.contains(g.name()), "{} missing from --help", g.name());
        }
        let mut cmd = Cli::command();
        let gencheck = cmd.find_subcommand_mut("gencheck").unwrap();
        let help = gencheck.render_long_help().to_string();
        for g in GroupFamily::ALL {
            assert!(help.contains(g.name()));
        }
    }

    #[test]
    fn unknown_flags_and_bad_values_are_usage_errors() {
        let args = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(
            main(args(&[
                "qgen",
                "enumerate",
                "--family",
                "nc-matched",
                "--word",
                "uU",
                "--bogus"
            ])),
            EXIT_USAGE
        );
        assert_eq!(
            main(args(&[
                "qgen", "fixdim", "--group", "free-q", "--word", "uU", "--N", "2"
            ])),
            EXIT_USAGE
        );
        assert_eq!(
            main(args(&[
                "qgen", "fixdim", "--group", "free-u", "--word", "uz", "--N", "2"
            ])),
            EXIT_USAGE
        );
        assert_eq!(
            main(args(&[
                "qgen", "fixdim", "--group", "free-u", "--word", "uU", "--N", "0"
            ])),
            EXIT_USAGE
        );
        assert_eq!(
            main(args(&[
                "qgen",
                "paper-suite",
                "--N",
                "2",
                "--instances",
                "lower-rank"
            ])),
            EXIT_USAGE
        );
    }
}
