//! Seeded random (scale, superscale, integrand) cases for the cross-check
//! sweeps: every conversion path is compared against the Riemann-sum oracle
//! on each case.

use crate::calculus::{riemann_delta_integral, Method};
use crate::conversion::{by_parts_cross_scale, convert_via_superscale};
use crate::error::Result;
use crate::expr::Expr;
use crate::scale::{Piece, TimeScale};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stopping tolerance handed to the Riemann oracle during sweeps. The
/// halving scheme leaves a true error of the same order, well inside the
/// comparison envelope.
pub const ORACLE_TOL: f64 = 4e-7;
/// Quadrature tolerance for the conversion paths during sweeps.
pub const CONVERSION_TOL: f64 = 1e-9;

/// Absolute/relative agreement envelope between a conversion value and the
/// oracle, before truncation allowances.
pub fn agreement_envelope(value: f64) -> f64 {
    1e-6_f64.max(1e-6 * value.abs())
}

#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub id: u32,
    pub scale: TimeScale,
    pub superscale: TimeScale,
    pub integrand: Expr,
    pub a: f64,
    pub b: f64,
}

/// One method's outcome on a case, lined up against the oracle value.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub case_id: u32,
    pub method: Method,
    pub value: f64,
    pub reference: f64,
    pub abs_err: f64,
    /// Envelope the deviation is held to: agreement envelope plus the
    /// propagated truncation bound.
    pub allowed: f64,
    pub residual: f64,
}

/// Deterministic corpus of nested-scale cases with smooth integrands.
pub fn generate(seed: u64, count: u32) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|id| gen_case(id, &mut rng, false)).collect()
}

/// Corpus variant whose integrands are non-decreasing on the whole line.
pub fn generate_monotone(seed: u64, count: u32) -> Vec<CorpusCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|id| gen_case(id, &mut rng, true)).collect()
}

fn gen_case(id: u32, rng: &mut ChaCha8Rng, monotone: bool) -> CorpusCase {
    let scale = gen_scale(rng);
    let superscale = gen_superscale(rng, &scale);
    let (a, b) = (scale.min(), scale.max());
    let raw = if monotone { gen_monotone_expr(rng) } else { gen_expr(rng) };
    let integrand = normalize_oscillation(raw, a, b, monotone);
    CorpusCase { id, scale, superscale, integrand, a, b }
}

fn gen_scale(rng: &mut ChaCha8Rng) -> TimeScale {
    loop {
        let mut pieces = Vec::new();
        let n_intervals = rng.gen_range(1..=5);
        for _ in 0..n_intervals {
            let lo = rng.gen_range(-3.0..2.6);
            let len = rng.gen_range(0.08..0.45);
            pieces.push(Piece::interval(lo, lo + len));
        }
        let n_points = rng.gen_range(0..=10);
        if n_points > 0 {
            let mut pts: Vec<f64> = (0..n_points).map(|_| rng.gen_range(-3.3..3.3)).collect();
            // keep isolated points well separated so windows stay benign
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
            pieces.push(Piece::points(pts));
        }
        match rng.gen_range(0..10) {
            0..=2 => {
                let q = rng.gen_range(0.35..0.65);
                let c = rng.gen_range(0.25..0.8);
                let offset = rng.gen_range(-3.0..2.0);
                pieces.push(Piece::geometric_at(q, c, offset));
            }
            3 => {
                let c = rng.gen_range(0.3..0.8);
                let offset = rng.gen_range(-3.0..2.0);
                pieces.push(Piece::Harmonic { c, offset, first: 1 });
            }
            _ => {}
        }
        if let Ok(scale) = TimeScale::new(pieces) {
            return scale;
        }
    }
}

fn gen_superscale(rng: &mut ChaCha8Rng, sub: &TimeScale) -> TimeScale {
    loop {
        let mut pieces: Vec<Piece> = sub.pieces().to_vec();
        match rng.gen_range(0..4) {
            // the real window itself
            0 => pieces = vec![Piece::interval(sub.min(), sub.max())],
            // widen with extra intervals
            1 | 2 => {
                for _ in 0..rng.gen_range(1..=2) {
                    let lo = rng.gen_range(sub.min()..sub.max() - 0.1);
                    let len = rng.gen_range(0.1..0.6);
                    pieces.push(Piece::interval(lo, (lo + len).min(sub.max())));
                }
                if rng.gen_bool(0.5) {
                    let pts: Vec<f64> = (0..rng.gen_range(1..=6))
                        .map(|_| rng.gen_range(sub.min()..sub.max()))
                        .collect();
                    pieces.push(Piece::points(pts));
                }
            }
            // sprinkle points only
            _ => {
                let pts: Vec<f64> = (0..rng.gen_range(2..=8))
                    .map(|_| rng.gen_range(sub.min()..sub.max()))
                    .collect();
                pieces.push(Piece::points(pts));
            }
        }
        if let Ok(sup) = TimeScale::new(pieces) {
            return sup;
        }
    }
}

fn lit(x: f64) -> Expr {
    Expr::Lit(x)
}

fn bin(op: fn(Box<Expr>, Box<Expr>) -> Expr, a: Expr, b: Expr) -> Expr {
    op(Box::new(a), Box::new(b))
}

fn powi(e: Expr, n: u32) -> Expr {
    bin(Expr::Pow, e, lit(f64::from(n)))
}

fn gen_expr(rng: &mut ChaCha8Rng) -> Expr {
    let coeff = |rng: &mut ChaCha8Rng| rng.gen_range(-1.0..1.0);
    match rng.gen_range(0..4) {
        0 => {
            // polynomial of degree ≤ 4
            let deg = rng.gen_range(1..=4);
            let mut e = lit(coeff(rng));
            for k in 1..=deg {
                e = bin(Expr::Add, e, bin(Expr::Mul, lit(coeff(rng)), powi(Expr::Var, k)));
            }
            e
        }
        1 => {
            let omega = rng.gen_range(0.5..2.0);
            let phase = rng.gen_range(-1.5..1.5);
            let arg = bin(Expr::Add, bin(Expr::Mul, lit(omega), Expr::Var), lit(phase));
            bin(
                Expr::Add,
                lit(coeff(rng)),
                bin(Expr::Mul, lit(coeff(rng)), Expr::Call(crate::expr::Func::Sin, Box::new(arg))),
            )
        }
        2 => {
            let lambda = rng.gen_range(-0.8..0.8);
            let arg = bin(Expr::Mul, lit(lambda), Expr::Var);
            bin(
                Expr::Add,
                lit(coeff(rng)),
                bin(Expr::Mul, lit(coeff(rng)), Expr::Call(crate::expr::Func::Exp, Box::new(arg))),
            )
        }
        _ => {
            // low-degree polynomial plus a sine ripple
            let base = bin(
                Expr::Add,
                bin(Expr::Mul, lit(coeff(rng)), Expr::Var),
                bin(Expr::Mul, lit(coeff(rng)), powi(Expr::Var, 2)),
            );
            let omega = rng.gen_range(0.5..1.5);
            let ripple = Expr::Call(
                crate::expr::Func::Sin,
                Box::new(bin(Expr::Mul, lit(omega), Expr::Var)),
            );
            bin(Expr::Add, base, bin(Expr::Mul, lit(0.5 * coeff(rng)), ripple))
        }
    }
}

fn gen_monotone_expr(rng: &mut ChaCha8Rng) -> Expr {
    let c0 = rng.gen_range(-1.0..1.0);
    match rng.gen_range(0..4) {
        0 => bin(Expr::Add, lit(c0), bin(Expr::Mul, lit(rng.gen_range(0.0..1.0)), Expr::Var)),
        1 => {
            let lam = rng.gen_range(0.1..0.7);
            let arg = bin(Expr::Mul, lit(lam), Expr::Var);
            bin(
                Expr::Add,
                lit(c0),
                bin(
                    Expr::Mul,
                    lit(rng.gen_range(0.05..1.0)),
                    Expr::Call(crate::expr::Func::Exp, Box::new(arg)),
                ),
            )
        }
        2 => bin(Expr::Add, lit(c0), bin(Expr::Mul, lit(rng.gen_range(0.05..0.6)), powi(Expr::Var, 3))),
        _ => lit(c0),
    }
}

/// Rescale the integrand so its oscillation over the window stays near
/// unity; keeps the oracle's halving budget uniform across cases.
fn normalize_oscillation(e: Expr, a: f64, b: f64, monotone: bool) -> Expr {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=64 {
        let s = a + (b - a) * i as f64 / 64.0;
        if let Ok(v) = e.eval(s) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let osc = (hi - lo).max(1e-9);
    let target = 2.0;
    if osc <= target || !osc.is_finite() {
        return e;
    }
    let k = target / osc;
    if monotone && k < 0.0 {
        return e;
    }
    bin(Expr::Mul, lit(k), e)
}

/// Largest sampled magnitude of the integrand over the window, padded; used
/// to convert a truncation residual into a value bound.
pub fn sup_abs(e: &Expr, a: f64, b: f64) -> f64 {
    let mut m = 0.0f64;
    for i in 0..=128 {
        let s = a + (b - a) * i as f64 / 128.0;
        if let Ok(v) = e.eval(s) {
            m = m.max(v.abs());
        }
    }
    m * 1.25 + 1e-9
}

/// Run the by-parts and superscale conversions against the Riemann oracle.
pub fn run_case(case: &CorpusCase) -> Result<Vec<ComparisonRow>> {
    let CorpusCase { id, scale, superscale, integrand, a, b } = case;
    let oracle = riemann_delta_integral(scale, integrand, *a, *b, ORACLE_TOL)?;
    let fsup = sup_abs(integrand, *a, *b);
    let mut rows = Vec::new();
    for report in [
        by_parts_cross_scale(scale, superscale, integrand, *a, *b, CONVERSION_TOL)?,
        convert_via_superscale(scale, superscale, integrand, *a, *b, CONVERSION_TOL)?,
    ] {
        let abs_err = (report.value - oracle.value).abs();
        rows.push(ComparisonRow {
            case_id: *id,
            method: report.method,
            value: report.value,
            reference: oracle.value,
            abs_err,
            allowed: agreement_envelope(oracle.value)
                + fsup * (report.truncation_residual + oracle.truncation_residual),
            residual: report.truncation_residual,
        });
    }
    Ok(rows)
}
