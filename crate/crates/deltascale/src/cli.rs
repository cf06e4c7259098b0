//! Batch front-end: parse scale specs and integrand expressions, run
//! integrations, conversions, and experiments, and emit JSON or CSV reports.
//!
//! Exit codes: 0 success, 1 deviation beyond the agreement envelope,
//! 2 validation error, 3 convergence failure, 4 chain ascent failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::calculus::{classical_integral, riemann_delta_integral, IntegralReport};
use crate::conversion::{by_parts_cross_scale, chain_convergence, convert_via_real, convert_via_superscale};
use crate::corpus;
use crate::error::{Error, Result};
use crate::expr::{fmt_float, parse as parse_expr, Expr};
use crate::scale::TimeScale;

#[derive(Parser)]
#[command(
    name = "deltascale",
    about = "Delta-integrals on time scales: direct Riemann sums and conversion formulas",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Left-endpoint delta-Riemann sums with gauge halving (the oracle path)
    Riemann,
    /// Real-line conversion: dense quadrature plus jump terms
    Real,
    /// Superscale conversion formula
    Super,
    /// Cross-scale integration by parts
    Parts,
    /// Classical quadrature, ignoring the scale
    Classical,
    /// All scale-aware methods side by side
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate an expression over a window of a scale.
    Integrate {
        /// Scale spec, e.g. "union(interval(0,1), points(2))"
        scale: String,
        /// Integrand over s, e.g. "s^2"
        expr: String,
        a: f64,
        b: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Riemann)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Superscale spec for --method super/parts; defaults to the real
        /// window [a, b]
        #[arg(long)]
        superscale: Option<String>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every method on one case, or sweep a seeded corpus.
    Compare {
        scale: Option<String>,
        superscale: Option<String>,
        expr: Option<String>,
        a: Option<f64>,
        b: Option<f64>,
        /// Run a seeded random corpus instead of a single case
        #[arg(long)]
        corpus: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate along an ascending chain of scales from a spec file.
    ///
    /// The file lists one scale spec per line, the last line being the
    /// union scale; `#` starts a comment.
    Chain {
        chain_file: PathBuf,
        expr: String,
        a: f64,
        b: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point for the binary.
pub fn run_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version printing
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = String::new();
    let code = match dispatch(cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), e);
            e.exit_code()
        }
    };
    print!("{stdout}");
    let _ = std::io::stdout().flush();
    code
}

fn emit(out: &Option<PathBuf>, text: String, stdout: &mut String) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            stdout.push_str(&text);
            Ok(())
        }
    }
}

fn report_json(r: &IntegralReport) -> String {
    serde_json::to_string(r).expect("report serializes")
}

fn report_csv_row(r: &IntegralReport) -> String {
    format!(
        "{},{},{},{},{}",
        r.method.name(),
        fmt_float(r.value),
        fmt_float(r.est_error),
        r.evaluations,
        fmt_float(r.truncation_residual)
    )
}

fn dispatch(cli: Cli, stdout: &mut String) -> Result<i32> {
    match cli.cmd {
        Cmd::Integrate { scale, expr, a, b, method, tol, superscale, format, out } => {
            let scale = TimeScale::parse(&scale)?;
            let f = parse_expr(&expr)?;
            let sup = match &superscale {
                Some(spec) => Some(TimeScale::parse(spec)?),
                None => None,
            };
            let reports = integrate_reports(&scale, sup.as_ref(), &f, a, b, method, tol)?;
            let text = match format {
                FormatArg::Json => {
                    if reports.len() == 1 {
                        format!("{}\n", report_json(&reports[0]))
                    } else {
                        let mut obj = String::from("{");
                        for (i, r) in reports.iter().enumerate() {
                            if i > 0 {
                                obj.push(',');
                            }
                            let _ = write!(obj, "\"{}\":{}", r.method.name(), report_json(r));
                        }
                        obj.push_str("}\n");
                        obj
                    }
                }
                FormatArg::Csv => {
                    let mut text =
                        String::from("method,value,est_error,evaluations,truncation_residual\n");
                    for r in &reports {
                        text.push_str(&report_csv_row(r));
                        text.push('\n');
                    }
                    text
                }
            };
            emit(&out, text, stdout)?;
            Ok(0)
        }
        Cmd::Compare { scale, superscale, expr, a, b, corpus: corpus_mode, seed, cases, tol, out } => {
            if corpus_mode {
                return compare_corpus(seed, cases, &out, stdout);
            }
            let (scale, superscale, expr, a, b) = match (scale, superscale, expr, a, b) {
                (Some(s), Some(ss), Some(e), Some(a), Some(b)) => (s, ss, e, a, b),
                _ => {
                    return Err(Error::InvalidArgument(
                        "compare needs SCALE SUPERSCALE EXPR A B, or --corpus".into(),
                    ))
                }
            };
            compare_single(&scale, &superscale, &expr, a, b, tol, &out, stdout)
        }
        Cmd::Chain { chain_file, expr, a, b, out } => {
            let text = std::fs::read_to_string(&chain_file).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", chain_file.display()))
            })?;
            let mut scales = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                scales.push(TimeScale::parse(line)?);
            }
            if scales.len() < 2 {
                return Err(Error::InvalidArgument(
                    "chain file needs at least one chain scale plus the union scale".into(),
                ));
            }
            let sup = scales.pop().expect("checked length");
            let f = parse_expr(&expr)?;
            let rows = chain_convergence(&scales, &sup, &f, a, b)?;
            let mut csv = String::from("n,value,gap_to_limit\n");
            for r in &rows {
                let _ = writeln!(csv, "{},{},{}", r.n, fmt_float(r.value), fmt_float(r.gap_to_limit));
            }
            emit(&out, csv, stdout)?;
            Ok(0)
        }
    }
}

fn integrate_reports(
    scale: &TimeScale,
    sup: Option<&TimeScale>,
    f: &Expr,
    a: f64,
    b: f64,
    method: MethodArg,
    tol: f64,
) -> Result<Vec<IntegralReport>> {
    let default_sup = || TimeScale::real_window(a, b);
    let mut out = Vec::new();
    let methods: Vec<MethodArg> = match method {
        MethodArg::All => vec![MethodArg::Riemann, MethodArg::Real, MethodArg::Super, MethodArg::Parts],
        m => vec![m],
    };
    for m in methods {
        out.push(match m {
            MethodArg::Riemann => riemann_delta_integral(scale, f, a, b, tol)?,
            MethodArg::Real => convert_via_real(scale, f, a, b, tol)?,
            MethodArg::Super => {
                let sup = match sup {
                    Some(s) => s.clone(),
                    None => default_sup()?,
                };
                convert_via_superscale(scale, &sup, f, a, b, tol)?
            }
            MethodArg::Parts => {
                let sup = match sup {
                    Some(s) => s.clone(),
                    None => default_sup()?,
                };
                by_parts_cross_scale(scale, &sup, f, a, b, tol)?
            }
            MethodArg::Classical => classical_integral(f, a, b, tol)?,
            MethodArg::All => unreachable!(),
        });
    }
    Ok(out)
}

fn compare_single(
    scale_spec: &str,
    sup_spec: &str,
    expr: &str,
    a: f64,
    b: f64,
    tol: f64,
    out: &Option<PathBuf>,
    stdout: &mut String,
) -> Result<i32> {
    let scale = TimeScale::parse(scale_spec)?;
    let sup = TimeScale::parse(sup_spec)?;
    let f = parse_expr(expr)?;
    let oracle = riemann_delta_integral(&scale, &f, a, b, tol.min(corpus::ORACLE_TOL))?;
    let real = convert_via_real(&scale, &f, a, b, corpus::CONVERSION_TOL)?;
    let sup_r = convert_via_superscale(&scale, &sup, &f, a, b, corpus::CONVERSION_TOL)?;
    let parts = by_parts_cross_scale(&scale, &sup, &f, a, b, corpus::CONVERSION_TOL)?;

    let fsup = corpus::sup_abs(&f, a, b);
    let mut csv = String::from(
        "riemann,convert_real,convert_superscale,by_parts,dev_real,dev_super,dev_parts\n",
    );
    let devs = [
        (real.value - oracle.value).abs(),
        (sup_r.value - oracle.value).abs(),
        (parts.value - oracle.value).abs(),
    ];
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{}",
        fmt_float(oracle.value),
        fmt_float(real.value),
        fmt_float(sup_r.value),
        fmt_float(parts.value),
        fmt_float(devs[0]),
        fmt_float(devs[1]),
        fmt_float(devs[2]),
    );
    emit(out, csv, stdout)?;
    let allowed = corpus::agreement_envelope(oracle.value)
        + fsup
            * [&real, &sup_r, &parts]
                .iter()
                .map(|r| r.truncation_residual)
                .fold(oracle.truncation_residual, f64::max);
    Ok(if devs.iter().any(|d| *d > allowed) { 1 } else { 0 })
}

fn compare_corpus(seed: u64, cases: u32, out: &Option<PathBuf>, stdout: &mut String) -> Result<i32> {
    let corpus_cases = corpus::generate(seed, cases);
    let mut csv = String::from("case_id,method,value,reference,abs_err,residual\n");
    let mut max_err = 0.0f64;
    let mut violations = 0u32;
    for case in &corpus_cases {
        for row in corpus::run_case(case)? {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                row.case_id,
                row.method.name(),
                fmt_float(row.value),
                fmt_float(row.reference),
                fmt_float(row.abs_err),
                fmt_float(row.residual),
            );
            max_err = max_err.max(row.abs_err);
            if row.abs_err > row.allowed {
                violations += 1;
            }
        }
    }
    let _ = writeln!(
        csv,
        "# cases={} seed={} max_abs_err={} envelope_violations={}",
        cases,
        seed,
        fmt_float(max_err),
        violations
    );
    emit(out, csv, stdout)?;
    Ok(if violations > 0 { 1 } else { 0 })
}
