//! Command-line front end: spectra, eigenvectors, error tables, the
//! verification sweep and plot data.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Map, Value};

use crate::asymptotics::{lambda_second_order, lambda_small_j};
use crate::charpoly::{build_l, charpoly_l, charpoly_l_real, factor_p, factor_q, ProblemInstance};
use crate::error::{Error, Result};
use crate::numerics::{decimal_digits, fmt_sci, g, Cplx, PrecisionContext, EXPERIMENT_BITS};
use crate::oracle::{charpoly_root_isolate, dense_det};
use crate::solvers::{
    newton_fixed_steps, solve_theta_bisection, solve_theta_fixed_point, solve_theta_newton, Method,
};
use crate::spectrum::{
    alpha_sweep, eigenvector, eigenvector_coords, euclidean_norm, full_spectrum, residual,
};
use crate::symbolfns::{eta, eta_by, h_main, AlphaParam, EtaFormula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_SOLVER_REFUSED: i32 = 3;
pub const EXIT_TABLE_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "cycle-laplacian",
    version,
    about = "Spectra of the weighted-cycle Laplacian"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All eigenvalues and angles of L_{alpha,n}.
    Spectrum(SpectrumArgs),
    /// One eigenvector with its exact and asymptotic norms.
    Eigvec(EigvecArgs),
    /// Error tables for the asymptotic and two-step Newton approximations.
    Table(TableArgs),
    /// Invariant checks over a seeded parameter sweep.
    Verify(VerifyArgs),
    /// Sampled curves for plotting.
    Plotdata(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    Bisect,
    FixedPoint,
    Asymptotic,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Edge weight: "p/q" or a decimal in (0, 1).
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Newton)]
    pub method: MethodArg,
    #[arg(long, default_value_t = EXPERIMENT_BITS)]
    pub precision_bits: u32,
    #[arg(long)]
    pub tol: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct EigvecArgs {
    /// Edge weight; complex values such as "1/3+0.5i" are accepted.
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub j: usize,
    #[arg(long, default_value_t = EXPERIMENT_BITS)]
    pub precision_bits: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum TableKind {
    /// n^3 max_j |lambda^asympt - lambda^N|.
    AsymptT1,
    /// n^7 max_j |lambda^{N,2} - lambda^N|.
    Newton2T2,
    /// (n/j)^4 |lambda^N - small-j expansion|.
    SmalljT3,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub table: TableKind,
    /// Restrict to these weights instead of the defaults.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<String>,
    /// Skip orders above this value.
    #[arg(long, default_value_t = 8192)]
    pub max_n: usize,
    /// Diff against the reference values; exit 4 on any deviation beyond tolerance.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value_t = EXPERIMENT_BITS)]
    pub precision_bits: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    EtaSign,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub max_n: usize,
    #[arg(long, default_value_t = 350)]
    pub precision_bits: u32,
    /// Deliberately corrupt one computation to check that the sweep notices.
    #[arg(long, value_enum, hide = true)]
    pub inject: Option<Fault>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// `n x - (j-1) pi` for every even j against `eta(x)`.
    MainEq,
    /// `tan(n x / 2)` against `-(1-alpha)/alpha tan(x/2)`.
    EtaLines,
    /// Angles and eigenvalues with the mesh `k pi / n`.
    ThetaLambda,
    /// `lambda_{alpha,n,j}` as a function of alpha.
    AlphaSweep,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[arg(long, default_value = "1/3")]
    pub alpha: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Index for the alpha sweep.
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    #[arg(long, default_value_t = 128)]
    pub precision_bits: u32,
    #[command(flatten)]
    pub output: Output,
}

/// Rows of string cells under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub config: Value,
}

impl Report {
    fn new(headers: &[&str], config: Value) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            config,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(&self.headers)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .headers
                            .iter()
                            .cloned()
                            .zip(r.iter().map(|c| Value::String(c.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "config": self.config, "rows": rows });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)
            }
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoProgress { .. }
        | Error::ContractionNotGuaranteed { .. }
        | Error::PreconditionViolated(_) => EXIT_SOLVER_REFUSED,
        _ => EXIT_BAD_CONFIG,
    }
}

fn context(bits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(bits)
}

fn real_alpha(text: &str, ctx: &PrecisionContext) -> Result<AlphaParam> {
    let a = AlphaParam::parse(text, ctx)?;
    if !a.is_real() {
        return Err(Error::InvalidAlpha(format!(
            "{text}: this command needs a real weight"
        )));
    }
    Ok(a)
}

fn sci(x: &Float, ctx: &PrecisionContext) -> String {
    fmt_sci(x, decimal_digits(ctx.bits()))
}

fn short(x: &Float) -> String {
    fmt_sci(x, 6)
}

/// Parses the arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_CONFIG
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(report: &Report, output: &Output, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(output.format, &mut w)?;
            w.flush()?;
        }
        None => report.write(output.format, stdout)?,
    }
    Ok(())
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Spectrum(a) => {
            let r = cmd_spectrum(a)?;
            emit(&r, &a.output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Eigvec(a) => {
            let r = cmd_eigvec(a)?;
            emit(&r, &a.output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Table(a) => {
            let (r, ok) = cmd_table(a)?;
            emit(&r, &a.output, stdout)?;
            Ok(if ok { EXIT_OK } else { EXIT_TABLE_MISMATCH })
        }
        Command::Verify(a) => {
            let (r, ok) = cmd_verify(a)?;
            emit(&r, &a.output, stdout)?;
            Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Plotdata(a) => {
            let r = cmd_plotdata(a)?;
            emit(&r, &a.output, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

// ---------------------------------------------------------------------------
// spectrum / eigvec

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<Report> {
    let ctx = context(args.precision_bits)?;
    let alpha = real_alpha(&args.alpha, &ctx)?;
    let inst = ProblemInstance::new(alpha, args.n)?;
    let tol = args.tol.as_deref().map(|t| ctx.parse(t)).transpose()?;
    let config = json!({
        "command": "spectrum",
        "alpha": args.alpha,
        "n": args.n,
        "method": args.method.to_possible_value().map(|v| v.get_name().to_owned()),
        "precision_bits": args.precision_bits,
        "tol": args.tol,
    });
    let mut report = Report::new(
        &[
            "j",
            "theta",
            "lambda",
            "method",
            "iterations",
            "certified_error",
            "residual",
        ],
        config,
    );

    let method = match args.method {
        MethodArg::Newton => Method::Newton,
        MethodArg::Bisect => Method::Bisection,
        MethodArg::FixedPoint => Method::FixedPoint,
        MethodArg::Asymptotic => {
            for j in 1..=inst.n {
                report.push(asymptotic_row(&inst, j, &ctx)?);
            }
            return Ok(report);
        }
    };
    let spec = full_spectrum(&inst, method, &ctx, tol.as_ref())?;
    for j in 1..=spec.len() {
        let (iters, cert, res) = match &spec.reports[j - 1] {
            Some(r) => (
                r.iterations.to_string(),
                short(&r.certified_error),
                short(&r.residual),
            ),
            None => ("0".into(), "0".into(), "0".into()),
        };
        report.push(vec![
            j.to_string(),
            sci(spec.theta(j), &ctx),
            sci(spec.lambda(j), &ctx),
            spec.sources[j - 1].to_string(),
            iters,
            cert,
            res,
        ]);
    }
    Ok(report)
}

fn asymptotic_row(inst: &ProblemInstance, j: usize, ctx: &PrecisionContext) -> Result<Vec<String>> {
    let n = inst.n;
    if j % 2 == 1 {
        let theta = ctx.pi_ratio(j as i64 - 1, n as i64);
        let lambda = g(&theta, ctx);
        return Ok(vec![
            j.to_string(),
            sci(&theta, ctx),
            sci(&lambda, ctx),
            "closed-form".into(),
            "0".into(),
            "0".into(),
            "0".into(),
        ]);
    }
    let lambda = lambda_second_order(&inst.alpha, n, j, ctx)?.value;
    // theta = 2 asin(sqrt(lambda) / 2)
    let theta = (Float::with_val(ctx.bits(), lambda.sqrt_ref()) / 2u32).asin() * 2u32;
    let res = h_main(&inst.alpha, n, j, &theta, ctx).abs();
    Ok(vec![
        j.to_string(),
        sci(&theta, ctx),
        sci(&lambda, ctx),
        "asymptotic".into(),
        "0".into(),
        "-".into(),
        short(&res),
    ])
}

pub fn cmd_eigvec(args: &EigvecArgs) -> Result<Report> {
    let ctx = context(args.precision_bits)?;
    let alpha = AlphaParam::parse(&args.alpha, &ctx)?;
    let inst = ProblemInstance::new(alpha, args.n)?;
    if args.j == 0 || args.j > args.n {
        return Err(Error::InvalidIndex {
            j: args.j,
            n: args.n,
            reason: "need 1 <= j <= n",
        });
    }
    let theta = if args.j % 2 == 1 {
        ctx.pi_ratio(args.j as i64 - 1, args.n as i64)
    } else {
        solve_theta_newton(&inst.alpha, args.n, args.j, None, &ctx, None)?.root
    };
    let lambda = g(&theta, &ctx);
    let v = eigenvector(&inst, args.j, &theta, &ctx)?;
    let res = residual(&inst, &lambda, &v.coords, &ctx);
    let config = json!({
        "command": "eigvec",
        "alpha": args.alpha,
        "n": args.n,
        "j": args.j,
        "precision_bits": args.precision_bits,
        "theta": sci(&theta, &ctx),
        "lambda": sci(&lambda, &ctx),
        "exact_norm": sci(&v.exact_norm, &ctx),
        "asympt_norm": sci(&v.asympt_norm, &ctx),
        "residual": short(&res),
    });
    eprintln!(
        "lambda = {}  |v| = {}  asymptotic |v| = {}  residual = {}",
        short(&lambda),
        short(&v.exact_norm),
        short(&v.asympt_norm),
        short(&res)
    );
    let mut report = Report::new(&["k", "re", "im"], config);
    for (k, z) in v.coords.iter().enumerate() {
        report.push(vec![
            (k + 1).to_string(),
            sci(&z.re, &ctx),
            sci(&z.im, &ctx),
        ]);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// tables

pub const TABLE_ORDERS: [usize; 6] = [256, 512, 1024, 2048, 4096, 8192];

/// Reference cells `(alpha, n, j, scaled value)`; `j = 0` marks a max over all `j`.
const REF_T1: &[((i64, i64), usize, usize, f64)] = &[
    ((1, 3), 256, 0, 38.24),
    ((1, 3), 512, 0, 38.86),
    ((1, 3), 1024, 0, 39.17),
    ((1, 3), 2048, 0, 39.32),
    ((1, 3), 4096, 0, 39.40),
    ((1, 3), 8192, 0, 39.44),
    ((4, 5), 256, 0, 11.58),
    ((4, 5), 512, 0, 11.62),
    ((4, 5), 1024, 0, 11.63),
    ((4, 5), 2048, 0, 11.64),
    ((4, 5), 4096, 0, 11.64),
    ((4, 5), 8192, 0, 11.64),
];

const REF_T2: &[((i64, i64), usize, usize, f64)] = &[
    ((1, 3), 256, 0, 2.97),
    ((1, 3), 512, 0, 3.01),
    ((1, 3), 1024, 0, 3.03),
    ((1, 3), 2048, 0, 3.04),
    ((1, 3), 4096, 0, 3.04),
    ((1, 3), 8192, 0, 3.05),
    ((4, 5), 256, 0, 45.41),
    ((4, 5), 512, 0, 46.33),
    ((4, 5), 1024, 0, 46.80),
    ((4, 5), 2048, 0, 47.04),
    ((4, 5), 4096, 0, 47.16),
    ((4, 5), 8192, 0, 47.22),
];

const REF_T3: &[((i64, i64), usize, usize, f64)] = &[
    ((1, 3), 256, 2, 21.80),
    ((1, 3), 256, 4, 0.18),
    ((1, 3), 256, 6, 4.25),
    ((1, 3), 512, 2, 21.65),
    ((1, 3), 512, 4, 0.44),
    ((1, 3), 512, 6, 4.53),
    ((1, 3), 1024, 2, 21.57),
    ((1, 3), 1024, 4, 0.58),
    ((1, 3), 1024, 6, 4.67),
    ((1, 3), 2048, 2, 21.53),
    ((1, 3), 2048, 4, 0.65),
    ((1, 3), 2048, 6, 4.75),
    ((1, 3), 4096, 2, 21.51),
    ((1, 3), 4096, 4, 0.68),
    ((1, 3), 4096, 6, 4.79),
    ((1, 3), 8192, 2, 21.50),
    ((1, 3), 8192, 4, 0.70),
    ((1, 3), 8192, 6, 4.81),
];

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::AsymptT1 => "asympt-t1",
            TableKind::Newton2T2 => "newton2-t2",
            TableKind::SmalljT3 => "smallj-t3",
        }
    }

    /// Relative tolerance for `--compare`.
    pub fn tolerance(self) -> f64 {
        match self {
            TableKind::AsymptT1 | TableKind::Newton2T2 => 0.02,
            TableKind::SmalljT3 => 0.03,
        }
    }

    fn reference(self) -> &'static [((i64, i64), usize, usize, f64)] {
        match self {
            TableKind::AsymptT1 => REF_T1,
            TableKind::Newton2T2 => REF_T2,
            TableKind::SmalljT3 => REF_T3,
        }
    }

    pub fn default_alphas(self) -> Vec<(i64, i64)> {
        match self {
            TableKind::AsymptT1 | TableKind::Newton2T2 => vec![(1, 3), (4, 5)],
            TableKind::SmalljT3 => vec![(1, 3)],
        }
    }

    pub fn reference_value(self, alpha: (i64, i64), n: usize, j: usize) -> Option<f64> {
        self.reference()
            .iter()
            .find(|r| r.0 == alpha && r.1 == n && r.2 == j)
            .map(|r| r.3)
    }
}

#[derive(Debug, Clone)]
pub struct TableCell {
    pub alpha: String,
    pub n: usize,
    /// `None` for max-over-`j` cells.
    pub j: Option<usize>,
    /// Unscaled error.
    pub raw: Float,
    pub scaled: f64,
    pub reference: Option<f64>,
}

impl TableCell {
    /// `|scaled / reference - 1|`.
    pub fn deviation(&self) -> Option<f64> {
        self.reference.map(|r| (self.scaled / r - 1.0).abs())
    }
}

fn scaled(raw: &Float, factor: f64) -> f64 {
    raw.to_f64() * factor
}

/// Even-index Newton angles at full precision, in parallel.
fn newton_thetas(a: &AlphaParam, n: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    (1..=n / 2)
        .into_par_iter()
        .map(|i| Ok(solve_theta_newton(a, n, 2 * i, None, ctx, None)?.root))
        .collect()
}

/// One table for the given weights `p/q` and orders.
pub fn compute_table(
    kind: TableKind,
    alphas: &[(i64, i64)],
    orders: &[usize],
    ctx: &PrecisionContext,
) -> Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    for &(p, q) in alphas {
        let a = AlphaParam::ratio(p, q, ctx)?;
        let label = format!("{p}/{q}");
        for &n in orders {
            let nf = n as f64;
            match kind {
                TableKind::AsymptT1 | TableKind::Newton2T2 => {
                    let thetas = newton_thetas(&a, n, ctx)?;
                    let errs: Vec<Float> = thetas
                        .par_iter()
                        .enumerate()
                        .map(|(i, theta)| {
                            let j = 2 * i + 2;
                            let approx = if kind == TableKind::AsymptT1 {
                                lambda_second_order(&a, n, j, ctx)?.value
                            } else {
                                g(&newton_fixed_steps(&a, n, j, None, 2, ctx)?.root, ctx)
                            };
                            Ok((approx - g(theta, ctx)).abs())
                        })
                        .collect::<Result<_>>()?;
                    let raw = errs
                        .into_iter()
                        .fold(ctx.zero(), |m, e| if e > m { e } else { m });
                    let factor = if kind == TableKind::AsymptT1 {
                        nf.powi(3)
                    } else {
                        nf.powi(7)
                    };
                    cells.push(TableCell {
                        alpha: label.clone(),
                        n,
                        j: None,
                        scaled: scaled(&raw, factor),
                        raw,
                        reference: kind.reference_value((p, q), n, 0),
                    });
                }
                TableKind::SmalljT3 => {
                    for j in [2usize, 4, 6] {
                        let theta = solve_theta_newton(&a, n, j, None, ctx, None)?.root;
                        let raw = (g(&theta, ctx) - lambda_small_j(&a, n, j, ctx)?.value).abs();
                        let factor = (nf / j as f64).powi(4);
                        cells.push(TableCell {
                            alpha: label.clone(),
                            n,
                            j: Some(j),
                            scaled: scaled(&raw, factor),
                            raw,
                            reference: kind.reference_value((p, q), n, j),
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}

fn parse_ratio(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("{text}: table weights must be written p/q"));
    let (p, q) = text.split_once('/').ok_or_else(bad)?;
    Ok((
        p.trim().parse().map_err(|_| bad())?,
        q.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn cmd_table(args: &TableArgs) -> Result<(Report, bool)> {
    let ctx = context(args.precision_bits)?;
    let alphas = if args.alpha.is_empty() {
        args.table.default_alphas()
    } else {
        args.alpha
            .iter()
            .map(|s| parse_ratio(s))
            .collect::<Result<_>>()?
    };
    let orders: Vec<usize> = TABLE_ORDERS
        .iter()
        .copied()
        .filter(|&n| n <= args.max_n)
        .collect();
    if orders.is_empty() {
        return Err(Error::InvalidOrder(args.max_n));
    }
    let cells = compute_table(args.table, &alphas, &orders, &ctx)?;
    let config = json!({
        "command": "table",
        "table": args.table.name(),
        "alphas": alphas.iter().map(|(p, q)| format!("{p}/{q}")).collect::<Vec<_>>(),
        "orders": orders,
        "precision_bits": args.precision_bits,
        "compare": args.compare,
        "tolerance": args.table.tolerance(),
    });
    let mut headers = vec!["table", "alpha", "n", "j", "error", "scaled"];
    if args.compare {
        headers.extend(["reference", "deviation", "status"]);
    }
    let mut report = Report::new(&headers, config);
    let mut ok = true;
    for c in &cells {
        let mut row = vec![
            args.table.name().to_string(),
            c.alpha.clone(),
            c.n.to_string(),
            c.j.map_or("max".into(), |j| j.to_string()),
            short(&c.raw),
            format!("{:.6}", c.scaled),
        ];
        if args.compare {
            match (c.reference, c.deviation()) {
                (Some(r), Some(d)) => {
                    let pass = d <= args.table.tolerance();
                    ok &= pass;
                    row.extend([
                        format!("{r}"),
                        format!("{:.4}", d),
                        if pass { "ok" } else { "MISMATCH" }.into(),
                    ]);
                }
                _ => row.extend(["-".into(), "-".into(), "no-reference".into()]),
            }
        }
        report.push(row);
    }
    Ok((report, ok))
}

// ---------------------------------------------------------------------------
// verify

/// Reduced fractions `p/q` in `(0, 1)` with `q <= max_den`, ordered by value.
pub fn rational_grid(max_den: i64) -> Vec<(i64, i64)> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut out: Vec<(i64, i64)> = (2..=max_den)
        .flat_map(|q| (1..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out
}

struct Check {
    name: &'static str,
    cases: usize,
    max_error: f64,
    threshold: f64,
}

impl Check {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self {
            name,
            cases: 0,
            max_error: 0.0,
            threshold,
        }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        if err.is_nan() || err > self.max_error {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    fn passed(&self) -> bool {
        self.max_error <= self.threshold
    }
}

fn abs_diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(a.prec().max(b.prec()), a - b)
        .abs()
        .to_f64()
}

fn rel_diff(a: &Float, b: &Float) -> f64 {
    let scale = Float::with_val(a.prec(), a.abs_ref()).to_f64().max(1.0);
    abs_diff(a, b) / scale
}

struct Sweep {
    ctx: PrecisionContext,
    alphas: Vec<(i64, i64)>,
    max_n: usize,
    fault: Option<Fault>,
}

impl Sweep {
    fn alpha(&self, pq: (i64, i64)) -> AlphaParam {
        AlphaParam::ratio(pq.0, pq.1, &self.ctx).expect("grid weights lie in (0,1)")
    }

    fn orders(&self) -> std::ops::RangeInclusive<usize> {
        3..=self.max_n
    }
}

fn run_checks(sweep: &Sweep, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let ctx = &sweep.ctx;
    let p = ctx.bits();
    let ident = ctx.pow2(40 - p as i32).to_f64();
    let mut checks = Vec::new();

    // eta: all formulas agree, and eta is an involution.
    let mut equiv = Check::new("eta-equivalence", ident);
    let mut invol = Check::new("eta-involution", ident);
    for &pq in &sweep.alphas {
        let a = sweep.alpha(pq);
        for _ in 0..16 {
            let x = Float::with_val(p, rng.gen_range(1e-3..std::f64::consts::PI - 1e-3));
            let base = eta(&a, &x, ctx);
            for f in EtaFormula::ALL {
                let mut v = eta_by(f, &a, &x, ctx);
                if sweep.fault == Some(Fault::EtaSign) && f == EtaFormula::Tan {
                    v = -v;
                }
                equiv.record(abs_diff(&v, &base));
            }
            invol.record(abs_diff(&eta(&a, &base, ctx), &x));
        }
    }
    checks.extend([equiv, invol]);

    // characteristic polynomial identities
    let mut fact = Check::new("charpoly-factorization", ident);
    let mut collapse = Check::new("real-part-collapse", ident);
    let mut det = Check::new("determinant", ident);
    for &pq in &sweep.alphas {
        let a = sweep.alpha(pq);
        for n in [3usize, 4, 7, 12, 25, 40]
            .into_iter()
            .filter(|&n| n <= sweep.max_n.max(12))
        {
            let inst = ProblemInstance::new(a.clone(), n)?;
            let t = Float::with_val(p, rng.gen_range(0.01..1.99));
            let lam = Float::with_val(p, 4u32 - Float::with_val(p, t.square_ref()));
            let d = charpoly_l_real(&inst, &lam, ctx);
            let lhs = Float::with_val(p, &t * &d);
            let mut rhs = factor_p(n, &t, ctx) * factor_q(&inst, &t, ctx) * 2u32;
            if n % 2 == 1 {
                rhs = -rhs;
            }
            fact.record(abs_diff(&lhs, &rhs) / (1.0 + d.to_f64().abs()));

            let im = rng.gen_range(-2.0..2.0);
            let z = AlphaParam::new(a.re().clone(), Float::with_val(p, im), ctx)?;
            let zi = ProblemInstance::new(z, n)?;
            let lz = Cplx::from_real(lam.clone());
            let cz = charpoly_l(&zi, &lz, ctx);
            collapse
                .record(abs_diff(&cz.re, &d).max(cz.im.to_f64().abs()) / (1.0 + d.to_f64().abs()));

            if n <= 12 {
                let shifted = build_l(&inst, ctx).shifted_negative(&lz);
                let dd = dense_det(&shifted, ctx);
                det.record(rel_diff(&d, &dd.re).max(dd.im.to_f64().abs()));
            }
        }
    }
    checks.extend([fact, collapse, det]);

    // full spectra: localization, trace, eigenvectors
    let per_alpha: Vec<[f64; 4]> = sweep
        .alphas
        .par_iter()
        .map(|&pq| {
            let a = sweep.alpha(pq);
            let mut worst = [0.0f64; 4];
            for n in sweep.orders() {
                let inst = ProblemInstance::new(a.clone(), n)?;
                let spec = full_spectrum(&inst, Method::Newton, ctx, None)?;
                for j in (2..=n).step_by(2) {
                    let th = spec.theta(j);
                    let lo = ctx.pi_ratio(j as i64 - 1, n as i64);
                    let hi = ctx.pi_ratio(j as i64, n as i64);
                    if !(*th > lo && *th < hi) {
                        worst[0] = f64::INFINITY;
                    }
                }
                let sum = spec.lambdas.iter().fold(ctx.zero(), |s, x| s + x);
                let want = Float::with_val(p, a.re() * 2u32) + (2 * n as u32 - 2);
                worst[1] = worst[1].max(abs_diff(&sum, &want));
                for j in 1..=n {
                    let v = eigenvector_coords(&inst, j, spec.theta(j), ctx)?;
                    let nv = euclidean_norm(&v, ctx);
                    let r = Float::with_val(p, residual(&inst, spec.lambda(j), &v, ctx) / &nv);
                    worst[2] = worst[2].max(r.to_f64());
                    let exact = crate::spectrum::eigvec_norm_exact(&inst, j, spec.theta(j), ctx)?;
                    worst[3] = worst[3].max(abs_diff(&exact, &nv) / nv.to_f64());
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let names = ["localization", "trace", "eigvec-residual", "eigvec-norm"];
    let thresholds = [
        0.0,
        (sweep.max_n as f64) * 1e3 * ctx.eps().to_f64(),
        1e-90_f64.max(ident),
        1e-90_f64.max(ident),
    ];
    for (k, name) in names.into_iter().enumerate() {
        let mut c = Check::new(name, thresholds[k]);
        for w in &per_alpha {
            c.record(w[k]);
        }
        checks.push(c);
    }

    // independent oracle on small orders
    let mut oracle = Check::new("oracle-agreement", ident);
    let small: Vec<usize> = (0..4)
        .map(|_| rng.gen_range(3..=sweep.max_n.min(24)))
        .collect();
    for &pq in &sweep.alphas {
        let a = sweep.alpha(pq);
        for &n in &small {
            let inst = ProblemInstance::new(a.clone(), n)?;
            let spec = full_spectrum(&inst, Method::Newton, ctx, None)?;
            let or = charpoly_root_isolate(&inst, ctx, None)?;
            for (x, y) in spec.lambdas.iter().zip(&or.lambdas) {
                oracle.record(abs_diff(x, y));
            }
        }
    }
    checks.push(oracle);

    // cross-method agreement and Newton certificate soundness
    let mut bis = Check::new("newton-vs-bisection", ident);
    let mut cert = Check::new("newton-certificate", 1.0);
    let mut fp = Check::new("newton-vs-fixed-point", ident);
    for _ in 0..60 {
        let pq = sweep.alphas[rng.gen_range(0..sweep.alphas.len())];
        let a = sweep.alpha(pq);
        let n = rng.gen_range(3..=sweep.max_n);
        let j = 2 * rng.gen_range(1..=n / 2);
        let rn = solve_theta_newton(&a, n, j, None, ctx, None)?;
        let rb = solve_theta_bisection(&a, n, j, ctx, None)?;
        bis.record(abs_diff(&rn.root, &rb.root));
        let slack = Float::with_val(p, &rn.certified_error + &rb.certified_error);
        cert.record(abs_diff(&rn.root, &rb.root) / slack.to_f64());
        if (n as f64) > a.k1(ctx).to_f64() {
            let rf = solve_theta_fixed_point(&a, n, j, None, ctx, None)?;
            fp.record(abs_diff(&rn.root, &rf.root));
        }
    }
    checks.extend([bis, cert, fp]);

    // eigenvalues increase with alpha
    let mut mono = Check::new("alpha-monotonicity", 0.0);
    for _ in 0..8 {
        let n = rng.gen_range(3..=sweep.max_n.min(40));
        let j = 2 * rng.gen_range(1..=n / 2);
        let grid: Vec<AlphaParam> = (1..20)
            .map(|k| AlphaParam::ratio(k, 20, ctx))
            .collect::<Result<_>>()?;
        let vals = alpha_sweep(n, j, &grid, ctx)?;
        let bad = vals.windows(2).any(|w| w[1].1 <= w[0].1);
        mono.record(if bad { 1.0 } else { 0.0 });
    }
    checks.push(mono);

    Ok(checks)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(Report, bool)> {
    if args.max_n < 3 {
        return Err(Error::InvalidOrder(args.max_n));
    }
    let ctx = context(args.precision_bits)?;
    let sweep = Sweep {
        ctx,
        alphas: rational_grid(10),
        max_n: args.max_n,
        fault: args.inject,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let checks = run_checks(&sweep, &mut rng)?;
    let config = json!({
        "command": "verify",
        "seed": args.seed,
        "max_n": args.max_n,
        "precision_bits": args.precision_bits,
        "alphas": sweep.alphas.len(),
    });
    let mut report = Report::new(
        &["check", "cases", "max_error", "threshold", "status"],
        config,
    );
    let mut ok = true;
    for c in &checks {
        let pass = c.passed();
        ok &= pass;
        report.push(vec![
            c.name.to_string(),
            c.cases.to_string(),
            format!("{:.3e}", c.max_error),
            format!("{:.3e}", c.threshold),
            if pass { "ok" } else { "FAIL" }.into(),
        ]);
    }
    Ok((report, ok))
}

// ---------------------------------------------------------------------------
// plot data

fn samples(count: usize, ctx: &PrecisionContext) -> Vec<Float> {
    let count = count.max(2);
    (0..count)
        .map(|k| ctx.pi_ratio(k as i64, count as i64 - 1))
        .collect()
}

pub fn cmd_plotdata(args: &PlotArgs) -> Result<Report> {
    let ctx = context(args.precision_bits)?;
    let p = ctx.bits();
    let n = args.n;
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    let config = json!({
        "command": "plotdata",
        "figure": args.figure.to_possible_value().map(|v| v.get_name().to_owned()),
        "alpha": args.alpha,
        "n": n,
        "j": args.j,
        "samples": args.samples,
        "precision_bits": args.precision_bits,
    });
    let f = |x: &Float| fmt_sci(x, 17);
    match args.figure {
        Figure::MainEq => {
            let a = real_alpha(&args.alpha, &ctx)?;
            let evens: Vec<usize> = (2..=n).step_by(2).collect();
            let mut headers = vec!["x".to_string(), "eta".to_string()];
            headers.extend(evens.iter().map(|j| format!("line_j{j}")));
            let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
            let mut report = Report::new(&header_refs, config);
            for x in samples(args.samples, &ctx) {
                let mut row = vec![f(&x), f(&eta(&a, &x, &ctx))];
                for &j in &evens {
                    let line = Float::with_val(p, &x * n as u64) - ctx.pi_ratio(j as i64 - 1, 1);
                    row.push(f(&line));
                }
                report.push(row);
            }
            Ok(report)
        }
        Figure::EtaLines => {
            let a = real_alpha(&args.alpha, &ctx)?;
            let ratio = Float::with_val(p, 1 - a.re()) / a.re();
            let mut report = Report::new(&["x", "lhs", "rhs"], config);
            for x in samples(args.samples, &ctx).into_iter().skip(1) {
                let lhs = (Float::with_val(p, &x * n as u64) / 2u32).tan();
                let rhs = -(Float::with_val(p, &x / 2u32).tan() * &ratio);
                report.push(vec![f(&x), f(&lhs), f(&rhs)]);
            }
            Ok(report)
        }
        Figure::ThetaLambda => {
            let a = real_alpha(&args.alpha, &ctx)?;
            let inst = ProblemInstance::new(a, n)?;
            let spec = full_spectrum(&inst, Method::Newton, &ctx, None)?;
            let mut report = Report::new(&["kind", "index", "theta", "lambda"], config);
            for j in 1..=n {
                report.push(vec![
                    "eigen".into(),
                    j.to_string(),
                    f(spec.theta(j)),
                    f(spec.lambda(j)),
                ]);
            }
            for k in 1..n {
                let x = ctx.pi_ratio(k as i64, n as i64);
                report.push(vec!["mesh".into(), k.to_string(), f(&x), f(&g(&x, &ctx))]);
            }
            Ok(report)
        }
        Figure::AlphaSweep => {
            crate::solvers::check_index(n, args.j)?;
            let m = args.samples.max(2) as i64;
            let grid: Vec<AlphaParam> = (1..m)
                .map(|k| AlphaParam::ratio(k, m, &ctx))
                .collect::<Result<_>>()?;
            let mut report = Report::new(&["alpha", "lambda"], config);
            for (al, lam) in alpha_sweep(n, args.j, &grid, &ctx)? {
                report.push(vec![f(&al), f(&lam)]);
            }
            Ok(report)
        }
    }
}
