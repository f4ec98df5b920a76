//! The `bispinor` command line.
//!
//! ```text
//! bispinor <command> [--rep majorana_real|dirac_complex] [--seed N]
//!          [--format json|table] [--margin-min X] [--count N] [input]
//! ```
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible, 3 partial batch failure.
//! Reports are newline-delimited JSON, one object per input row; `gen` and
//! `transform` always write the corpus format.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{DiracRep, RepKind};
use crate::corpus::{generate, GenParams, Sector};
use crate::factorization::{self, bilinears, enumerate_hermitian_factors, solve_z_with};
use crate::frames::{apply_lorentz, LorentzTransform, TensorQuintuple};
use crate::io::{parse_input, to_json_line, write_corpus, Corpus, CorpusHeader, MatrixJson, QuintupleRecord, Row};
use crate::linalg::{self, CMat4, RMat4};
use crate::spectrum::{build_m, spectrum_report, SpectrumReport, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Round-trip residual below which a row passes.
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Feasibility report; exit 2 if any row is infeasible.
    Check,
    /// Arithmetic-root Z, gauge classes and round-trip residual per row.
    Solve,
    /// Full spectrum report including the matrix M.
    Spectrum,
    /// Round-trip residual per row plus a summary; exit 3 on any failure.
    Roundtrip,
    /// Write a random corpus.
    Gen,
    /// Apply a local Lorentz transformation to every row.
    Transform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Table,
}

/// A fully resolved job. Config files use the same shape; missing fields take
/// their defaults and unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub command: Option<Command>,
    /// Path or `-` for standard input.
    pub input_path: String,
    pub output_path: Option<PathBuf>,
    pub rep_kind: RepKind,
    pub gauge_seed: Option<u64>,
    pub output_format: OutputFormat,
    pub tolerances: Tolerances,
    pub gen: GenParams,
    /// Worker threads for batch rows; output order never depends on it.
    pub jobs: usize,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            command: None,
            input_path: "-".into(),
            output_path: None,
            rep_kind: RepKind::MajoranaReal,
            gauge_seed: None,
            output_format: OutputFormat::Json,
            tolerances: Tolerances::default(),
            gen: GenParams::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bispinor", version, about = "Tensor quintuples to bispinor matrices and back")]
struct Args {
    /// Command to run; may instead come from --config.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Input file, `-` for standard input.
    input: Option<String>,
    #[arg(long, value_name = "KIND")]
    rep: Option<RepKind>,
    /// Corpus seed for `gen`, gauge seed for `solve`.
    #[arg(long, visible_alias = "gauge-seed")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// JSON job file; explicit flags win over its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,

    #[arg(long, help_heading = "gen")]
    count: Option<usize>,
    #[arg(long, help_heading = "gen", allow_negative_numbers = true)]
    margin_min: Option<f64>,
    #[arg(long, help_heading = "gen")]
    feasible_only: bool,
    #[arg(long, help_heading = "gen")]
    max_attempts: Option<u64>,
    #[arg(long, value_enum, help_heading = "gen")]
    sector: Option<Sector>,
    #[arg(long, help_heading = "gen")]
    j0_shift: Option<f64>,

    /// AXIS:RAPIDITY, axis x|y|z or 1|2|3.
    #[arg(long, help_heading = "transform", allow_hyphen_values = true)]
    boost: Option<String>,
    /// A,B:ANGLE, rotating spatial axis A toward B.
    #[arg(long, help_heading = "transform", allow_hyphen_values = true)]
    rotation: Option<String>,
    /// SEED:BOUND or SEED:BOUND:rot (boost times rotation).
    #[arg(long, help_heading = "transform")]
    random_lorentz: Option<String>,
    /// Sixteen comma-separated entries of w, row-major.
    #[arg(long, help_heading = "transform", allow_hyphen_values = true)]
    matrix: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

impl Args {
    fn has_gen_flags(&self) -> bool {
        self.count.is_some()
            || self.margin_min.is_some()
            || self.feasible_only
            || self.max_attempts.is_some()
            || self.sector.is_some()
            || self.j0_shift.is_some()
    }

    fn transform_flags(&self) -> usize {
        [&self.boost, &self.rotation, &self.random_lorentz, &self.matrix].iter().filter(|f| f.is_some()).count()
    }
}

fn resolve(args: &Args) -> Result<JobConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<JobConfig>(&text)
                .map_err(|e| input_error(format!("{}: line {}: {e}", path.display(), e.line())))?
        }
        None => JobConfig::default(),
    };
    if args.command.is_some() {
        cfg.command = args.command;
    }
    let command = cfg.command.ok_or_else(|| input_error("no command given"))?;
    if let Some(input) = &args.input {
        cfg.input_path = input.clone();
    }
    if args.output.is_some() {
        cfg.output_path = args.output.clone();
    }
    if let Some(rep) = args.rep {
        cfg.rep_kind = rep;
    }
    if let Some(format) = args.format {
        cfg.output_format = format;
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = jobs;
    }
    if let Some(seed) = args.seed {
        match command {
            Command::Gen => cfg.gen.seed = seed,
            _ => cfg.gauge_seed = Some(seed),
        }
    }
    if args.has_gen_flags() && command != Command::Gen {
        return Err(input_error("--count, --margin-min, --feasible-only, --max-attempts, --sector and --j0-shift apply to `gen` only"));
    }
    if let Some(count) = args.count {
        cfg.gen.count = count;
    }
    if let Some(margin_min) = args.margin_min {
        cfg.gen.margin_min = margin_min;
    }
    if args.feasible_only {
        cfg.gen.feasible_only = true;
    }
    if let Some(max_attempts) = args.max_attempts {
        cfg.gen.max_attempts = max_attempts;
    }
    if let Some(sector) = args.sector {
        cfg.gen.sector = sector;
    }
    if let Some(shift) = args.j0_shift {
        cfg.gen.j0_shift = shift;
    }
    let transforms = args.transform_flags();
    if command == Command::Transform && transforms != 1 {
        return Err(input_error("transform needs exactly one of --boost, --rotation, --random-lorentz, --matrix"));
    }
    if command != Command::Transform && transforms != 0 {
        return Err(input_error("Lorentz parameters apply to `transform` only"));
    }
    if cfg.jobs == 0 {
        return Err(input_error("--jobs must be at least 1"));
    }
    Ok(cfg)
}

fn parse_axis(text: &str) -> Result<usize, Failure> {
    match text.trim() {
        "x" | "1" => Ok(1),
        "y" | "2" => Ok(2),
        "z" | "3" => Ok(3),
        other => Err(input_error(format!("bad spatial axis `{other}`"))),
    }
}

fn parse_f64(text: &str, what: &str) -> Result<f64, Failure> {
    let value: f64 = text.trim().parse().map_err(|_| input_error(format!("bad {what} `{text}`")))?;
    if !value.is_finite() {
        return Err(input_error(format!("{what} must be finite")));
    }
    Ok(value)
}

fn lorentz_from_args(args: &Args) -> Result<LorentzTransform, Failure> {
    if let Some(spec) = &args.boost {
        let (axis, phi) = spec.split_once(':').ok_or_else(|| input_error("--boost expects AXIS:RAPIDITY"))?;
        return Ok(LorentzTransform::boost(parse_axis(axis)?, parse_f64(phi, "rapidity")?));
    }
    if let Some(spec) = &args.rotation {
        let (axes, angle) = spec.split_once(':').ok_or_else(|| input_error("--rotation expects A,B:ANGLE"))?;
        let (a, b) = axes.split_once(',').ok_or_else(|| input_error("--rotation expects A,B:ANGLE"))?;
        let (a, b) = (parse_axis(a)?, parse_axis(b)?);
        if a == b {
            return Err(input_error("rotation axes must differ"));
        }
        return Ok(LorentzTransform::rotation(a, b, parse_f64(angle, "angle")?));
    }
    if let Some(spec) = &args.random_lorentz {
        let parts: Vec<&str> = spec.split(':').collect();
        let (seed, bound, rot) = match parts.as_slice() {
            [s, b] => (s, b, false),
            [s, b, "rot"] => (s, b, true),
            _ => return Err(input_error("--random-lorentz expects SEED:BOUND[:rot]")),
        };
        let seed: u64 = seed.parse().map_err(|_| input_error(format!("bad seed `{seed}`")))?;
        let bound = parse_f64(bound, "rapidity bound")?;
        if bound < 0.0 {
            return Err(input_error("rapidity bound must be nonnegative"));
        }
        return Ok(LorentzTransform::random(seed, bound, rot));
    }
    let spec = args.matrix.as_deref().unwrap_or_default();
    let values = spec.split(',').map(|v| parse_f64(v, "matrix entry")).collect::<Result<Vec<_>, _>>()?;
    if values.len() != 16 {
        return Err(input_error(format!("--matrix expects 16 entries, got {}", values.len())));
    }
    LorentzTransform::new(RMat4::from_row_slice(&values)).map_err(|e| input_error(e.to_string()))
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<Corpus, Failure> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|e| input_error(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{path}: {e}")))?;
    }
    parse_input(&text).map_err(|e| input_error(if path == "-" { e.to_string() } else { format!("{path}: {e}") }))
}

/// Applies `f` to every row, optionally on several threads; results keep row
/// order.
fn map_rows<T: Send>(rows: &[Row], jobs: usize, f: impl Fn(usize, &Row) -> T + Sync) -> Vec<T> {
    if jobs <= 1 || rows.len() < 2 {
        return rows.iter().enumerate().map(|(i, r)| f(i, r)).collect();
    }
    let chunk = rows.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = rows
            .chunks(chunk)
            .enumerate()
            .map(|(k, part)| {
                let f = &f;
                scope.spawn(move || part.iter().enumerate().map(|(i, r)| f(k * chunk + i, r)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// `¼j⁰` for real-sector rows with a future current: the factor by which the
/// normalized system divides the data.
fn normalization(q: &TensorQuintuple) -> Option<f64> {
    (q.is_real_sector() && q.j[0] > 1e-12).then(|| 0.25 * q.j[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRow {
    pub row: usize,
    pub line: usize,
    pub report: Option<SpectrumReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRow {
    pub row: usize,
    pub line: usize,
    pub report: Option<SpectrumReport>,
    pub m: Option<MatrixJson>,
    pub normalization: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRow {
    pub row: usize,
    pub line: usize,
    pub feasible: bool,
    pub margin: Option<f64>,
    pub rank: Option<usize>,
    pub z: Option<MatrixJson>,
    pub gauge: Option<MatrixJson>,
    pub bilinears: Option<QuintupleRecord>,
    pub residual: Option<f64>,
    /// Eigenvalue multiset of each class of Hermitian factors of `M`.
    pub gauge_classes: Option<Vec<[f64; 4]>>,
    pub factor_count: Option<usize>,
    pub normalization: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripRow {
    pub row: usize,
    pub line: usize,
    pub residual: Option<f64>,
    pub margin: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripSummary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
}

/// One line of `roundtrip` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RoundtripLine {
    Summary { summary: RoundtripSummary },
    Row(RoundtripRow),
}

struct Context<'a> {
    cfg: &'a JobConfig,
    rep: &'static DiracRep,
}

fn local_row(row: &Row) -> Result<TensorQuintuple, String> {
    row.record.to_local().map_err(|e| format!("line {}: {e}", row.line))
}

fn check_row(ctx: &Context, i: usize, row: &Row) -> CheckRow {
    let result = local_row(row).and_then(|q| spectrum_report(&q, ctx.rep, &ctx.cfg.tolerances).map_err(|e| e.to_string()));
    match result {
        Ok(report) => CheckRow { row: i, line: row.line, report: Some(report), error: None },
        Err(e) => CheckRow { row: i, line: row.line, report: None, error: Some(e) },
    }
}

fn spectrum_row(ctx: &Context, i: usize, row: &Row) -> SpectrumRow {
    let result = local_row(row).and_then(|q| {
        let report = spectrum_report(&q, ctx.rep, &ctx.cfg.tolerances).map_err(|e| e.to_string())?;
        let m = build_m(&q, ctx.rep).map_err(|e| e.to_string())?;
        Ok((report, MatrixJson::from_matrix(&m.m, ctx.rep.kind), normalization(&q)))
    });
    match result {
        Ok((report, m, norm)) => {
            SpectrumRow { row: i, line: row.line, report: Some(report), m: Some(m), normalization: norm, error: None }
        }
        Err(e) => SpectrumRow { row: i, line: row.line, report: None, m: None, normalization: None, error: Some(e) },
    }
}

fn solve_row(ctx: &Context, i: usize, row: &Row, gauge: Option<&CMat4>) -> SolveRow {
    let mut out = SolveRow {
        row: i,
        line: row.line,
        feasible: false,
        margin: None,
        rank: None,
        z: None,
        gauge: None,
        bilinears: None,
        residual: None,
        gauge_classes: None,
        factor_count: None,
        normalization: None,
        error: None,
    };
    let q = match local_row(row) {
        Ok(q) => q,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    let tol = &ctx.cfg.tolerances;
    let report = match spectrum_report(&q, ctx.rep, tol) {
        Ok(r) => r,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.margin = Some(report.margin);
    out.rank = Some(report.rank);
    out.normalization = normalization(&q);
    let z = match solve_z_with(&q, ctx.rep, gauge, tol) {
        Ok(z) => z,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.feasible = true;
    let back = bilinears(&z.z, ctx.rep);
    out.residual = Some(back.max_abs_diff(&q));
    out.bilinears = Some(QuintupleRecord::from_quintuple(&back, None));
    out.z = Some(MatrixJson::from_matrix(&z.z, ctx.rep.kind));
    out.gauge = z.gauge.map(|u| MatrixJson::from_matrix(&u, ctx.rep.kind));
    match build_m(&q, ctx.rep).map_err(factorization::FactorError::from).and_then(|m| enumerate_hermitian_factors(&m, tol)) {
        Ok(set) => {
            out.factor_count = Some(set.factors.len());
            out.gauge_classes = Some(set.classes);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

fn roundtrip_row(ctx: &Context, i: usize, row: &Row) -> RoundtripRow {
    let tol = &ctx.cfg.tolerances;
    let mut out = RoundtripRow { row: i, line: row.line, residual: None, margin: None, passed: false, error: None };
    let q = match local_row(row) {
        Ok(q) => q,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    out.margin = spectrum_report(&q, ctx.rep, tol).map(|r| r.margin).ok();
    match solve_z_with(&q, ctx.rep, None, tol) {
        Ok(z) => {
            let residual = bilinears(&z.z, ctx.rep).max_abs_diff(&q);
            out.residual = Some(residual);
            out.passed = residual < ROUNDTRIP_TOLERANCE;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"))
}

fn lines_json<T: Serialize>(items: &[T]) -> String {
    items.iter().map(|r| to_json_line(r) + "\n").collect()
}

fn check_table(rows: &[CheckRow]) -> String {
    let mut out = format!("{:>5} {:>5} {:>8} {:>14} {:>4} {:>14}  {}\n", "row", "line", "feasible", "margin", "rank", "lambda_min", "reason");
    for r in rows {
        match (&r.report, &r.error) {
            (Some(rep), _) => out += &format!(
                "{:>5} {:>5} {:>8} {:>14.6e} {:>4} {:>14.6e}  {:?}\n",
                r.row, r.line, rep.feasible, rep.margin, rep.rank, rep.lambda_numeric[3], rep.reason
            ),
            (None, e) => out += &format!("{:>5} {:>5} error: {}\n", r.row, r.line, e.as_deref().unwrap_or("")),
        }
    }
    out
}

fn spectrum_table(rows: &[SpectrumRow]) -> String {
    let mut out = String::new();
    for r in rows {
        match &r.report {
            Some(rep) => {
                out += &format!("row {} (line {})  margin {:.6e}  rank {}  kappa {}\n", r.row, r.line, rep.margin, rep.rank, rep.kappa);
                out += &format!("  numeric {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}\n", rep.lambda_numeric[0], rep.lambda_numeric[1], rep.lambda_numeric[2], rep.lambda_numeric[3]);
                if let Some(l) = rep.lambda_closed {
                    out += &format!("  closed  {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}\n", l[0], l[1], l[2], l[3]);
                }
            }
            None => out += &format!("row {} (line {})  error: {}\n", r.row, r.line, r.error.as_deref().unwrap_or("")),
        }
    }
    out
}

fn solve_table(rows: &[SolveRow]) -> String {
    let mut out = format!("{:>5} {:>5} {:>8} {:>14} {:>4} {:>7} {:>14}  {}\n", "row", "line", "feasible", "margin", "rank", "classes", "residual", "error");
    for r in rows {
        out += &format!(
            "{:>5} {:>5} {:>8} {:>14} {:>4} {:>7} {:>14}  {}\n",
            r.row,
            r.line,
            r.feasible,
            fmt_opt(r.margin),
            r.rank.map_or("-".into(), |k| k.to_string()),
            r.gauge_classes.as_ref().map_or("-".into(), |c| c.len().to_string()),
            fmt_opt(r.residual),
            r.error.as_deref().unwrap_or("")
        );
    }
    out
}

fn roundtrip_table(rows: &[RoundtripRow], summary: &RoundtripSummary) -> String {
    let mut out = format!("{:>5} {:>5} {:>6} {:>14} {:>14}  {}\n", "row", "line", "passed", "residual", "margin", "error");
    for r in rows {
        out += &format!(
            "{:>5} {:>5} {:>6} {:>14} {:>14}  {}\n",
            r.row,
            r.line,
            r.passed,
            fmt_opt(r.residual),
            fmt_opt(r.margin),
            r.error.as_deref().unwrap_or("")
        );
    }
    out += &format!(
        "rows {}  passed {}  failed {}  max {}  mean {}\n",
        summary.rows,
        summary.passed,
        summary.failed,
        fmt_opt(summary.max_residual),
        fmt_opt(summary.mean_residual)
    );
    out
}

fn summarize(rows: &[RoundtripRow]) -> RoundtripSummary {
    let residuals: Vec<f64> = rows.iter().filter_map(|r| r.residual).collect();
    let passed = rows.iter().filter(|r| r.passed).count();
    RoundtripSummary {
        rows: rows.len(),
        passed,
        failed: rows.len() - passed,
        max_residual: residuals.iter().copied().reduce(f64::max),
        mean_residual: (!residuals.is_empty()).then(|| residuals.iter().sum::<f64>() / residuals.len() as f64),
        tolerance: ROUNDTRIP_TOLERANCE,
    }
}

/// Output text and exit code of one job.
fn execute(args: &Args, cfg: &JobConfig, stdin: &mut dyn Read) -> Result<(String, i32), Failure> {
    let rep = DiracRep::shared(cfg.rep_kind);
    let ctx = Context { cfg, rep };
    let table = cfg.output_format == OutputFormat::Table;
    match cfg.command.expect("resolved") {
        Command::Gen => {
            let g = generate(&cfg.gen, rep, &cfg.tolerances).map_err(|e| input_error(e.to_string()))?;
            Ok((write_corpus(&g.header, &g.records()), EXIT_OK))
        }
        Command::Transform => {
            let w = lorentz_from_args(args)?;
            let corpus = read_input(&cfg.input_path, stdin)?;
            let mut records = Vec::with_capacity(corpus.rows.len());
            for row in &corpus.rows {
                let q = local_row(row).map_err(input_error)?;
                let moved = apply_lorentz(&q, &w).map_err(|e| input_error(format!("line {}: {e}", row.line)))?;
                records.push(QuintupleRecord::from_quintuple(&moved, None));
            }
            let w_rows: [f64; 16] = std::array::from_fn(|i| w.matrix()[(i / 4, i % 4)]);
            let header = corpus.header.unwrap_or_else(|| CorpusHeader::new(None)).with("transform", w_rows);
            Ok((write_corpus(&header, &records), EXIT_OK))
        }
        Command::Check => {
            let corpus = read_input(&cfg.input_path, stdin)?;
            let rows = map_rows(&corpus.rows, cfg.jobs, |i, r| check_row(&ctx, i, r));
            let code = if rows.iter().any(|r| r.error.is_some()) {
                EXIT_INPUT
            } else if rows.iter().any(|r| r.report.as_ref().is_some_and(|rep| !rep.feasible)) {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            };
            Ok((if table { check_table(&rows) } else { lines_json(&rows) }, code))
        }
        Command::Spectrum => {
            let corpus = read_input(&cfg.input_path, stdin)?;
            let rows = map_rows(&corpus.rows, cfg.jobs, |i, r| spectrum_row(&ctx, i, r));
            let code = if rows.iter().any(|r| r.error.is_some()) { EXIT_INPUT } else { EXIT_OK };
            Ok((if table { spectrum_table(&rows) } else { lines_json(&rows) }, code))
        }
        Command::Solve => {
            let corpus = read_input(&cfg.input_path, stdin)?;
            let gauges: Vec<Option<CMat4>> = match cfg.gauge_seed {
                Some(seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    corpus.rows.iter().map(|_| Some(linalg::random_unitary(&mut rng, rep.kind.is_real()))).collect()
                }
                None => vec![None; corpus.rows.len()],
            };
            let rows = map_rows(&corpus.rows, cfg.jobs, |i, r| solve_row(&ctx, i, r, gauges[i].as_ref()));
            let code = if rows.iter().any(|r| r.error.is_some() && r.margin.is_none()) {
                EXIT_INPUT
            } else if rows.iter().any(|r| !r.feasible) {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            };
            Ok((if table { solve_table(&rows) } else { lines_json(&rows) }, code))
        }
        Command::Roundtrip => {
            let corpus = read_input(&cfg.input_path, stdin)?;
            let rows = map_rows(&corpus.rows, cfg.jobs, |i, r| roundtrip_row(&ctx, i, r));
            let summary = summarize(&rows);
            let code = if summary.failed > 0 { EXIT_PARTIAL } else { EXIT_OK };
            let text = if table {
                roundtrip_table(&rows, &summary)
            } else {
                let mut lines: Vec<RoundtripLine> = rows.into_iter().map(RoundtripLine::Row).collect();
                lines.push(RoundtripLine::Summary { summary });
                lines_json(&lines)
            };
            Ok((text, code))
        }
    }
}

/// Runs the command line with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = resolve(&args).and_then(|cfg| {
        let (text, code) = execute(&args, &cfg, stdin)?;
        match &cfg.output_path {
            Some(path) => std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))?,
            None => stdout.write_all(text.as_bytes()).map_err(|e| input_error(format!("stdout: {e}")))?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "bispinor: {}", f.message);
            f.code
        }
    }
}
