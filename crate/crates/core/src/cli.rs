//! Command-line front end: `enumerate`, `verify`, `scan` and `table`.
//!
//! Exit codes: 0 when everything passes, 1 on a verification failure, 2 on invalid input.
//! Reports go to stdout (or `--out`), diagnostics to stderr.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{conductors_in, validate_conductor, Conductor, Ramification};
use crate::cubicpoly::{affine_relation, period_poly_formula, shanks_poly, RationalCubic};
use crate::error::{Error, Result};
use crate::periods::{match_fields, FieldRecord, DEFAULT_TOLERANCE};
use crate::quadform::{representations, shanks_params};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// The conductor reproduced by `table`.
pub const TABLE_CONDUCTOR: u64 = 819;

/// Expected markdown rendering of `table`.
pub const GOLDEN_TABLE: &str = include_str!("../fixtures/table_819.md");

#[derive(Debug, Parser)]
#[command(
    name = "cubic-periods",
    version,
    about = "Gaussian periods and Shanks' cubics of cyclic cubic fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the pairs (M, N), Shanks' cubic and the period polynomial for a conductor.
    Enumerate {
        #[arg(long)]
        conductor: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the periods and run every check for a conductor.
    Verify {
        #[arg(long)]
        conductor: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify every conductor in a range.
    Scan {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        kind: Option<Ramification>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce the conductor 819 table and diff it against the golden copy.
    Table {
        /// Compare against this file instead of the built-in copy.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
    #[value(name = "md", alias = "markdown")]
    Markdown,
}

impl ValueEnum for Ramification {
    fn value_variants<'a>() -> &'a [Self] {
        &[Ramification::Tame, Ramification::Wild]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Ramification::Tame => "tame",
            Ramification::Wild => "wild",
        }))
    }
}

/// One row of a report. `periods`, `verdicts` and `residual` are absent for `enumerate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub n1: i64,
    pub n2: i64,
    pub shanks: RationalCubic,
    pub period_poly: [i64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<BTreeMap<String, bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductorReport {
    pub conductor: u64,
    pub kind: Ramification,
    pub fields: Vec<FieldReport>,
}

impl ConductorReport {
    pub fn all_pass(&self) -> bool {
        self.fields
            .iter()
            .all(|f| f.verdicts.as_ref().is_none_or(|v| v.values().all(|&b| b)))
    }
}

fn int_coeffs(p: &RationalCubic) -> Result<[i64; 4]> {
    let mut out = [0i64; 4];
    for (k, c) in p.coeffs.iter().enumerate() {
        if !c.is_integer() {
            return Err(Error::NonIntegralCoefficient {
                degree: k,
                value: c.to_string(),
            });
        }
        out[3 - k] = c
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::CoefficientTooLarge(c.to_string()))?;
    }
    Ok(out)
}

pub fn enumerate_report(f: &Conductor) -> Result<ConductorReport> {
    let fields = representations(f)?
        .iter()
        .map(|r| {
            let sp = shanks_params(r)?;
            Ok(FieldReport {
                m: r.m,
                n: r.n,
                n1: sp.n1,
                n2: sp.n2,
                shanks: shanks_poly(&sp.n()),
                period_poly: int_coeffs(&period_poly_formula(f, r)?)?,
                periods: None,
                verdicts: None,
                residual: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConductorReport {
        conductor: f.value,
        kind: f.kind,
        fields,
    })
}

pub fn field_report(rec: &FieldRecord) -> Result<FieldReport> {
    Ok(FieldReport {
        m: rec.representation.m,
        n: rec.representation.n,
        n1: rec.shanks_params.n1,
        n2: rec.shanks_params.n2,
        shanks: rec.shanks_poly.clone(),
        period_poly: int_coeffs(&rec.predicted_p)?,
        periods: Some(rec.periods.etas),
        verdicts: Some(
            rec.verdicts
                .iter()
                .map(|(k, v)| (k.clone(), v.pass))
                .collect(),
        ),
        residual: Some(rec.max_residual()),
    })
}

pub fn verify_report(f: &Conductor, tolerance: f64) -> Result<ConductorReport> {
    check_tolerance(tolerance)?;
    let fields = match_fields(f, tolerance)?
        .iter()
        .map(field_report)
        .collect::<Result<_>>()?;
    Ok(ConductorReport {
        conductor: f.value,
        kind: f.kind,
        fields,
    })
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "tolerance must be positive, got {tolerance}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub conductor: u64,
    pub kind: Ramification,
    pub fields: usize,
    pub pass: bool,
    /// Absent when the conductor failed before any residual was computed.
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub min: u64,
    pub max: u64,
    pub kind: Option<Ramification>,
    pub conductors: usize,
    pub fields: usize,
    pub failures: usize,
    pub first_failure: Option<u64>,
    pub worst_residual: f64,
    pub entries: Vec<ScanEntry>,
}

pub fn scan(min: u64, max: u64, kind: Option<Ramification>, tolerance: f64) -> Result<ScanSummary> {
    if min == 0 || min > max {
        return Err(Error::Precondition(format!(
            "empty conductor range [{min}, {max}]"
        )));
    }
    check_tolerance(tolerance)?;
    let conductors = conductors_in(min, max, kind);
    let entries: Vec<ScanEntry> = conductors
        .par_iter()
        .map(|f| match match_fields(f, tolerance) {
            Ok(recs) => ScanEntry {
                conductor: f.value,
                kind: f.kind,
                fields: recs.len(),
                pass: recs.iter().all(FieldRecord::all_pass),
                residual: Some(
                    recs.iter()
                        .map(FieldRecord::max_residual)
                        .fold(0.0, f64::max),
                ),
                error: recs
                    .iter()
                    .flat_map(|r| r.verdicts.iter())
                    .find(|(_, v)| !v.pass)
                    .map(|(k, v)| format!("{k}: {}", v.detail.as_deref().unwrap_or("failed"))),
            },
            Err(e) => ScanEntry {
                conductor: f.value,
                kind: f.kind,
                fields: 0,
                pass: false,
                residual: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let failing: Vec<&ScanEntry> = entries.iter().filter(|e| !e.pass).collect();
    Ok(ScanSummary {
        min,
        max,
        kind,
        conductors: entries.len(),
        fields: entries.iter().map(|e| e.fields).sum(),
        failures: failing.len(),
        first_failure: failing.first().map(|e| e.conductor),
        worst_residual: entries
            .iter()
            .filter_map(|e| e.residual)
            .fold(0.0, f64::max),
        entries,
    })
}

/// One row of the conductor 819 table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n1: i64,
    pub n2: i64,
    /// `eta = scale * rho + shift`.
    pub scale: i64,
    pub shift: i64,
    pub shanks: RationalCubic,
    pub period_poly: [i64; 4],
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub conductor: u64,
    pub rows: Vec<TableRow>,
}

pub fn table() -> Result<Table> {
    let f = validate_conductor(TABLE_CONDUCTOR)?;
    let mut recs = match_fields(&f, DEFAULT_TOLERANCE)?;
    recs.sort_by_key(|r| r.shanks_params.n2);
    let rows = recs
        .iter()
        .map(|r| {
            let (a, b) = affine_relation(&f, &r.shanks_params);
            Ok(TableRow {
                n1: r.shanks_params.n1,
                n2: r.shanks_params.n2,
                scale: small_int(&a)?,
                shift: small_int(&b)?,
                shanks: r.shanks_poly.clone(),
                period_poly: int_coeffs(&r.predicted_p)?,
                verified: r.all_pass(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        conductor: f.value,
        rows,
    })
}

fn small_int(x: &BigRational) -> Result<i64> {
    x.is_integer()
        .then(|| x.to_integer().to_i64())
        .flatten()
        .ok_or_else(|| Error::CoefficientTooLarge(x.to_string()))
}

/// `a rho + b` written the way the table writes it, e.g. `5ρ-6`.
pub fn linear_in_rho(a: i64, b: i64, prime: &str) -> String {
    let mut s = match a {
        1 => String::new(),
        -1 => "-".to_string(),
        _ => a.to_string(),
    };
    write!(s, "ρ{prime}").unwrap();
    if b != 0 {
        write!(s, "{}{}", if b < 0 { "-" } else { "+" }, b.abs()).unwrap();
    }
    s
}

fn int_poly(c: &[i64; 4]) -> RationalCubic {
    RationalCubic::from_ints(c[0], c[1], c[2], c[3])
}

pub fn table_markdown(t: &Table) -> String {
    let mut s = String::new();
    writeln!(s, "| (n1,n2) | {{η0, η1, η2}} | f_n(X) | P(X) |").unwrap();
    writeln!(s, "|---|---|---|---|").unwrap();
    for r in &t.rows {
        let etas: Vec<String> = ["", "'", "''"]
            .iter()
            .map(|p| linear_in_rho(r.scale, r.shift, p))
            .collect();
        writeln!(
            s,
            "| ({},{}) | {{{}}} | {} | {} |",
            r.n1,
            r.n2,
            etas.join(", "),
            r.shanks,
            int_poly(&r.period_poly)
        )
        .unwrap();
    }
    s
}

/// Line-by-line differences between two renderings, empty when identical.
pub fn diff_lines(expected: &str, actual: &str) -> Vec<String> {
    let e: Vec<&str> = expected.lines().collect();
    let a: Vec<&str> = actual.lines().collect();
    let mut out = Vec::new();
    for i in 0..e.len().max(a.len()) {
        match (e.get(i), a.get(i)) {
            (Some(x), Some(y)) if x == y => {}
            (x, y) => out.push(format!(
                "line {}: expected {:?}, got {:?}",
                i + 1,
                x.unwrap_or(&""),
                y.unwrap_or(&"")
            )),
        }
    }
    out
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).unwrap();
    for r in rows {
        w.write_record(&r).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

fn verdict_summary(v: &Option<BTreeMap<String, bool>>) -> String {
    v.as_ref()
        .map(|m| {
            m.iter()
                .map(|(k, &b)| format!("{k}={}", if b { "pass" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
}

pub fn render_conductor(r: &ConductorReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => json_string(r),
        ReportFormat::Csv => {
            let rows = r
                .fields
                .iter()
                .map(|f| {
                    let mut row = vec![
                        r.conductor.to_string(),
                        r.kind.to_string(),
                        f.m.to_string(),
                        f.n.to_string(),
                        f.n1.to_string(),
                        f.n2.to_string(),
                        f.shanks.to_string(),
                        int_poly(&f.period_poly).to_string(),
                    ];
                    row.extend(
                        f.periods
                            .map(|p| p.map(|x| x.to_string()))
                            .unwrap_or_default(),
                    );
                    if f.periods.is_none() {
                        row.extend(std::iter::repeat_n(String::new(), 3));
                    }
                    row.push(verdict_summary(&f.verdicts));
                    row.push(f.residual.map(|x| x.to_string()).unwrap_or_default());
                    row
                })
                .collect();
            csv_string(
                &[
                    "conductor",
                    "kind",
                    "M",
                    "N",
                    "n1",
                    "n2",
                    "shanks",
                    "period_poly",
                    "eta0",
                    "eta1",
                    "eta2",
                    "verdicts",
                    "residual",
                ],
                rows,
            )
        }
        ReportFormat::Markdown => {
            let mut s = format!("## Conductor {} ({})\n\n", r.conductor, r.kind);
            let verified = r.fields.iter().any(|f| f.verdicts.is_some());
            if verified {
                s.push_str("| M | N | (n1,n2) | f_n(X) | P(X) | periods | verdicts | residual |\n");
                s.push_str("|---|---|---|---|---|---|---|---|\n");
            } else {
                s.push_str("| M | N | (n1,n2) | f_n(X) | P(X) |\n");
                s.push_str("|---|---|---|---|---|\n");
            }
            for f in &r.fields {
                write!(
                    s,
                    "| {} | {} | ({},{}) | {} | {} |",
                    f.m,
                    f.n,
                    f.n1,
                    f.n2,
                    f.shanks,
                    int_poly(&f.period_poly)
                )
                .unwrap();
                if verified {
                    let p = f.periods.unwrap_or_default();
                    write!(
                        s,
                        " {:.10}, {:.10}, {:.10} | {} | {:.3e} |",
                        p[0],
                        p[1],
                        p[2],
                        verdict_summary(&f.verdicts),
                        f.residual.unwrap_or_default()
                    )
                    .unwrap();
                }
                s.push('\n');
            }
            s
        }
    }
}

pub fn render_scan(s: &ScanSummary, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => json_string(s),
        ReportFormat::Csv => csv_string(
            &["conductor", "kind", "fields", "pass", "residual", "error"],
            s.entries
                .iter()
                .map(|e| {
                    vec![
                        e.conductor.to_string(),
                        e.kind.to_string(),
                        e.fields.to_string(),
                        e.pass.to_string(),
                        e.residual.map(|r| r.to_string()).unwrap_or_default(),
                        e.error.clone().unwrap_or_default(),
                    ]
                })
                .collect(),
        ),
        ReportFormat::Markdown => {
            let mut out = format!(
                "## Scan [{}, {}]\n\nconductors: {}, fields: {}, failures: {}, worst residual: {:.3e}\n\n",
                s.min, s.max, s.conductors, s.fields, s.failures, s.worst_residual
            );
            out.push_str(
                "| conductor | kind | fields | pass | residual |\n|---|---|---|---|---|\n",
            );
            for e in &s.entries {
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    e.conductor,
                    e.kind,
                    e.fields,
                    if e.pass { "pass" } else { "FAIL" },
                    e.residual
                        .map(|r| format!("{r:.3e}"))
                        .unwrap_or_else(|| "-".into())
                )
                .unwrap();
            }
            out
        }
    }
}

pub fn render_table(t: &Table, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => json_string(t),
        ReportFormat::Markdown => table_markdown(t),
        ReportFormat::Csv => csv_string(
            &["n1", "n2", "periods", "shanks", "period_poly"],
            t.rows
                .iter()
                .map(|r| {
                    vec![
                        r.n1.to_string(),
                        r.n2.to_string(),
                        linear_in_rho(r.scale, r.shift, ""),
                        r.shanks.to_string(),
                        int_poly(&r.period_poly).to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

/// Whether the error is the caller's fault (exit 2) rather than a failed check (exit 1).
pub fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::InvalidConductor { .. } | Error::Precondition(_))
}

struct Diagnostics {
    color: bool,
}

impl Diagnostics {
    fn new() -> Self {
        let color = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
            && std::io::stderr().is_terminal();
        Self { color }
    }

    fn emit(&self, label: &str, code: &str, msg: &str) {
        if self.color {
            eprintln!("\x1b[{code}m{label}\x1b[0m: {msg}");
        } else {
            eprintln!("{label}: {msg}");
        }
    }

    fn error(&self, msg: &str) {
        self.emit("error", "1;31", msg);
    }

    fn fail(&self, msg: &str) {
        self.emit("FAIL", "1;31", msg);
    }
}

fn write_report(out: &Option<PathBuf>, report: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, report),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.as_bytes())?;
            stdout.flush()
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let diag = Diagnostics::new();
    let (result, out) = match cli.command {
        Command::Enumerate { conductor, output } => (
            validate_conductor(conductor)
                .and_then(|f| enumerate_report(&f))
                .map(|r| (render_conductor(&r, output.format), Ok(()))),
            output.out,
        ),
        Command::Verify {
            conductor,
            tolerance,
            output,
        } => (
            validate_conductor(conductor)
                .and_then(|f| verify_report(&f, tolerance))
                .map(|r| {
                    let status = if r.all_pass() {
                        Ok(())
                    } else {
                        let bad: Vec<String> = r
                            .fields
                            .iter()
                            .filter_map(|f| {
                                let v = f.verdicts.as_ref()?;
                                let failed: Vec<&str> = v
                                    .iter()
                                    .filter(|(_, &b)| !b)
                                    .map(|(k, _)| k.as_str())
                                    .collect();
                                (!failed.is_empty()).then(|| {
                                    format!("(M, N) = ({}, {}): {}", f.m, f.n, failed.join(", "))
                                })
                            })
                            .collect();
                        Err(format!("conductor {}: {}", r.conductor, bad.join("; ")))
                    };
                    (render_conductor(&r, output.format), status)
                }),
            output.out,
        ),
        Command::Scan {
            min,
            max,
            kind,
            tolerance,
            output,
        } => (
            scan(min, max, kind, tolerance).map(|s| {
                let status = match s.first_failure {
                    None => Ok(()),
                    Some(c) => {
                        let e = s.entries.iter().find(|e| e.conductor == c).unwrap();
                        Err(format!(
                            "{} of {} conductors failed; first failing conductor {c}: {}",
                            s.failures,
                            s.conductors,
                            e.error.as_deref().unwrap_or("verification failed")
                        ))
                    }
                };
                (render_scan(&s, output.format), status)
            }),
            output.out,
        ),
        Command::Table { golden, output } => {
            let golden = match golden {
                Some(p) => match std::fs::read_to_string(&p) {
                    Ok(s) => s,
                    Err(e) => {
                        diag.error(&format!("cannot read {}: {e}", p.display()));
                        return EXIT_INPUT;
                    }
                },
                None => GOLDEN_TABLE.to_string(),
            };
            (
                table().map(|t| {
                    let diffs = diff_lines(&golden, &table_markdown(&t));
                    let status = if !diffs.is_empty() {
                        Err(format!(
                            "table differs from the golden copy:\n  {}",
                            diffs.join("\n  ")
                        ))
                    } else if !t.rows.iter().all(|r| r.verified) {
                        Err("a table row failed verification".to_string())
                    } else {
                        Ok(())
                    };
                    (render_table(&t, output.format), status)
                }),
                output.out,
            )
        }
    };

    match result {
        Err(e) => {
            diag.error(&e.to_string());
            if is_input_error(&e) {
                EXIT_INPUT
            } else {
                EXIT_FAIL
            }
        }
        Ok((report, status)) => {
            if let Err(e) = write_report(&out, &report) {
                diag.error(&format!("cannot write report: {e}"));
                return EXIT_INPUT;
            }
            match status {
                Ok(()) => EXIT_PASS,
                Err(msg) => {
                    diag.fail(&msg);
                    EXIT_FAIL
                }
            }
        }
    }
}
