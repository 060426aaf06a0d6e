//! Command-line front end: `fmt`, `check`, `lint`, `query`, `fulfill`, `translate` and
//! `membership` subcommands over `.dsr` files.
//!
//! Exit codes: 0 when clean, 1 when findings or diagnostics are reported, 2 on usage, I/O or
//! parse errors.

use crate::export::{emit_owl, emit_report_extended, ReportFinding};
use crate::lint::{lint_model, LintConfig};
use crate::model::Model;
use crate::parser::{parse_description, parse_model_with_spans, print_model, SourceSpan};
use crate::reasoner::{check_consistency, check_strength_tags, default_bound, propagate_fulfillment, query, Consistency};
use crate::value::{format_rational, parse_decimal, Rational};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "dsr", version, about = "Parse, check, lint, query and export requirements models")]
struct Cli {
    /// Emit the JSON report format instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pretty-print a model in canonical form.
    Fmt { file: PathBuf },
    /// Validate a model, its strength tags and its consistency.
    Check {
        file: PathBuf,
        /// Largest counter-model searched for.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Report requirements issues.
    Lint {
        file: PathBuf,
        /// Key-value lexicon file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List the elements matching a description pattern.
    Query {
        file: PathBuf,
        #[arg(long)]
        pattern: String,
    },
    /// Propagate fulfillment marks through the refinement graph.
    Fulfill {
        file: PathBuf,
        /// Number of outputs of a one-to-many refinement that suffice.
        #[arg(long)]
        threshold: Option<usize>,
    },
    /// Export the model as an OWL 2 functional-syntax ontology.
    Translate {
        file: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graded membership of a value in the regions of a quality.
    Membership {
        file: PathBuf,
        #[arg(long)]
        quality: String,
        #[arg(long)]
        value: String,
        #[arg(long)]
        region: Option<String>,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

/// A failure that ends the command with exit code 2.
enum Fatal {
    /// A plain message, printed after an `error:` prefix.
    Message(String),
    /// Parse diagnostics, which already carry their location and severity.
    Diagnostics(String),
}

impl From<String> for Fatal {
    fn from(message: String) -> Self {
        Fatal::Message(message)
    }
}

/// Outcome of a subcommand: exit code, or a fatal error.
type Outcome = Result<i32, Fatal>;

fn load(path: &Path) -> Result<(Model, HashMap<String, SourceSpan>), Fatal> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    parse_model_with_spans(&text, Some(path))
        .map_err(|diags| Fatal::Diagnostics(diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")))
}

fn finding(element: &str, issue: &str, detail: String, span: Option<&SourceSpan>) -> ReportFinding {
    ReportFinding {
        element: element.to_string(),
        issue: issue.to_string(),
        detail,
        suggestion: None,
        span: span.map(|s| s.to_string()),
    }
}

fn print_findings(io: &mut Io, findings: &[ReportFinding]) -> std::io::Result<()> {
    for f in findings {
        let place = f.span.as_deref().map(|s| format!("{}: ", s)).unwrap_or_default();
        let suggestion = f.suggestion.as_deref().map(|s| format!(" (suggest {})", s)).unwrap_or_default();
        writeln!(io.out, "{}{} [{}] {}{}", place, f.element, f.issue, f.detail, suggestion)?;
    }
    Ok(())
}

fn cmd_fmt(io: &mut Io, file: &Path) -> Outcome {
    let (model, _) = load(file)?;
    let text = print_model(&model);
    if io.json {
        writeln!(io.out, "{}", emit_report_extended(&[], None, &[], &[("formatted", json!(text))])).map_err(io_err)?;
    } else {
        write!(io.out, "{}", text).map_err(io_err)?;
    }
    Ok(0)
}

fn cmd_check(io: &mut Io, file: &Path, bound: Option<usize>) -> Outcome {
    let (model, spans) = load(file)?;
    let bound = bound.unwrap_or_else(default_bound);
    if bound == 0 {
        return Err("--bound must be at least 1".to_string().into());
    }
    let mut findings = Vec::new();
    for d in check_strength_tags(&model, Some(bound)) {
        let key = format!("app#{}", d.application);
        let element = model.applications[d.application].inputs.join(", ");
        findings.push(finding(&element, "StrengthTag", d.message, spans.get(&key)));
    }
    let consistency = check_consistency(&model, Some(bound));
    let status = match &consistency {
        Consistency::Consistent(_) => "consistent",
        Consistency::Inconsistent(_) => "inconsistent",
        Consistency::Unknown => "unknown",
    };
    if let Consistency::Inconsistent(expl) = &consistency {
        let mut detail = format!("violates {}", expl.clash);
        if !expl.facts.is_empty() {
            detail.push_str(&format!("; facts: {}", expl.facts.join("; ")));
        }
        if expl.axioms.len() > 1 {
            detail.push_str(&format!("; axioms: {}", expl.axioms.join("; ")));
        }
        findings.push(finding("model", "Inconsistent", detail, spans.get("model")));
    }
    if io.json {
        let text = emit_report_extended(&findings, None, &[], &[("consistency", json!(status))]);
        writeln!(io.out, "{}", text).map_err(io_err)?;
    } else {
        print_findings(io, &findings).map_err(io_err)?;
        writeln!(io.out, "consistency: {}", status).map_err(io_err)?;
    }
    Ok(i32::from(!findings.is_empty()))
}

fn cmd_lint(io: &mut Io, file: &Path, config: Option<&Path>) -> Outcome {
    let (model, spans) = load(file)?;
    let config = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
            LintConfig::parse(&text).map_err(|e| format!("{}: {}", path.display(), e))?
        }
        None => LintConfig::default(),
    };
    let findings: Vec<ReportFinding> = lint_model(&model, &config)
        .into_iter()
        .map(|mut f| {
            f.span = spans.get(&f.element).map(|s| s.to_string());
            ReportFinding::from(&f)
        })
        .collect();
    if io.json {
        writeln!(io.out, "{}", emit_report_extended(&findings, None, &[], &[])).map_err(io_err)?;
    } else {
        print_findings(io, &findings).map_err(io_err)?;
    }
    Ok(i32::from(!findings.is_empty()))
}

fn cmd_query(io: &mut Io, file: &Path, pattern: &str) -> Outcome {
    let (model, _) = load(file)?;
    let pattern = parse_description(pattern)
        .map_err(|d| format!("invalid pattern: {}", d.iter().map(|x| x.message.clone()).collect::<Vec<_>>().join("; ")))?;
    let ids = query(&model, &pattern);
    if io.json {
        writeln!(io.out, "{}", emit_report_extended(&[], None, &[], &[("matches", json!(ids))])).map_err(io_err)?;
    } else {
        for id in &ids {
            writeln!(io.out, "{}", id).map_err(io_err)?;
        }
    }
    Ok(0)
}

fn cmd_fulfill(io: &mut Io, file: &Path, threshold: Option<usize>) -> Outcome {
    let (model, _) = load(file)?;
    if threshold == Some(0) {
        return Err("--threshold must be positive".to_string().into());
    }
    let state = propagate_fulfillment(&model, threshold);
    let findings: Vec<ReportFinding> =
        state.warnings.iter().map(|w| finding("model", "ThresholdUnreachable", w.to_string(), None)).collect();
    if io.json {
        writeln!(io.out, "{}", emit_report_extended(&findings, Some(&state), &[], &[])).map_err(io_err)?;
    } else {
        for id in model.elements.keys() {
            let label = match state.get(id) {
                crate::reasoner::Fulfillment::Fulfilled => "fulfilled",
                crate::reasoner::Fulfillment::Unfulfilled => "unfulfilled",
                crate::reasoner::Fulfillment::Unknown => "unknown",
            };
            writeln!(io.out, "{}: {}", id, label).map_err(io_err)?;
        }
        for w in &state.warnings {
            writeln!(io.err, "warning: {}", w).map_err(io_err)?;
        }
    }
    Ok(i32::from(!state.warnings.is_empty()))
}

fn cmd_translate(io: &mut Io, file: &Path, out: Option<&Path>) -> Outcome {
    let (model, _) = load(file)?;
    let owl = match emit_owl(&model) {
        Ok(owl) => owl,
        Err(e) => {
            if io.json {
                let f = [finding("model", "NotExportable", e.to_string(), None)];
                writeln!(io.out, "{}", emit_report_extended(&f, None, &[], &[])).map_err(io_err)?;
            } else {
                writeln!(io.err, "error: {}", e).map_err(io_err)?;
            }
            return Ok(1);
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, &owl).map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
            if io.json {
                let extra = [("output", json!(path.display().to_string()))];
                writeln!(io.out, "{}", emit_report_extended(&[], None, &[], &extra)).map_err(io_err)?;
            }
        }
        None if io.json => {
            writeln!(io.out, "{}", emit_report_extended(&[], None, &[], &[("owl", json!(owl))])).map_err(io_err)?
        }
        None => write!(io.out, "{}", owl).map_err(io_err)?,
    }
    Ok(0)
}

fn cmd_membership(io: &mut Io, file: &Path, quality: &str, value: &str, region: Option<&str>) -> Outcome {
    let (model, _) = load(file)?;
    let value: Rational = parse_decimal(value).ok_or_else(|| format!("invalid value '{}'", value))?;
    let spec = model
        .membership_specs
        .iter()
        .find(|s| s.quality == quality)
        .ok_or_else(|| format!("no regions declared for quality {}", quality))?;
    let degrees = crate::membership::membership_degrees(&value, &spec.regions).map_err(|e| e.to_string())?;
    let selected: Vec<(&String, &Rational)> = match region {
        Some(r) => {
            let d = degrees.get_key_value(r).ok_or_else(|| format!("region {} is not declared for {}", r, quality))?;
            vec![d]
        }
        None => spec.regions.iter().filter_map(|r| degrees.get_key_value(&r.name)).collect(),
    };
    if io.json {
        let map: serde_json::Map<String, serde_json::Value> =
            selected.iter().map(|(k, v)| (k.to_string(), json!(format_rational(v)))).collect();
        writeln!(io.out, "{}", emit_report_extended(&[], None, &[], &[("membership", serde_json::Value::Object(map))]))
            .map_err(io_err)?;
    } else if region.is_some() {
        writeln!(io.out, "{}", format_rational(selected[0].1)).map_err(io_err)?;
    } else {
        for (name, degree) in selected {
            writeln!(io.out, "{}: {}", name, format_rational(degree)).map_err(io_err)?;
        }
    }
    Ok(0)
}

fn io_err(e: std::io::Error) -> String {
    format!("output error: {}", e)
}

/// Runs the command line `argv` (including the program name), writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{}", e) } else { write!(err, "{}", e) };
            return code;
        }
    };
    let mut io = Io { out, err, json: cli.json };
    let result = match &cli.command {
        Command::Fmt { file } => cmd_fmt(&mut io, file),
        Command::Check { file, bound } => cmd_check(&mut io, file, *bound),
        Command::Lint { file, config } => cmd_lint(&mut io, file, config.as_deref()),
        Command::Query { file, pattern } => cmd_query(&mut io, file, pattern),
        Command::Fulfill { file, threshold } => cmd_fulfill(&mut io, file, *threshold),
        Command::Translate { file, out } => cmd_translate(&mut io, file, out.as_deref()),
        Command::Membership { file, quality, value, region } => {
            cmd_membership(&mut io, file, quality, value, region.as_deref())
        }
    };
    match result {
        Ok(code) => code,
        Err(Fatal::Message(message)) => {
            let _ = writeln!(io.err, "error: {}", message);
            2
        }
        Err(Fatal::Diagnostics(text)) => {
            let _ = writeln!(io.err, "{}", text);
            2
        }
    }
}

/// Runs the command line against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with(argv, &mut out, &mut err)
}
