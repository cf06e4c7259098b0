//! Delta-derivatives and the oracle-path delta-Riemann integrator.
//!
//! [`riemann_delta_integral`] sums `f(t_{i-1})·(t_i - t_{i-1})` over greedy
//! delta-partitions and halves the gauge until two successive sums agree.
//! It deliberately shares no code with the conversion formulas in
//! [`crate::conversion`]; the two paths check each other.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::num::{tol_at, KahanSum};
use crate::partition::{safe_delta0, walk_cells};
use crate::quad;
use crate::scale::TimeScale;
use serde::Serialize;

/// Which evaluation path produced an [`IntegralReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RiemannSum,
    PiecewiseClosed,
    ConvertReal,
    ConvertSuperscale,
    ByParts,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RiemannSum => "riemann_sum",
            Method::PiecewiseClosed => "piecewise_closed",
            Method::ConvertReal => "convert_real",
            Method::ConvertSuperscale => "convert_superscale",
            Method::ByParts => "by_parts",
        }
    }
}

/// One integral evaluation: value, how it was computed, and its error
/// accounting.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    pub value: f64,
    pub method: Method,
    /// Heuristic error estimate; for the Riemann path the last halving
    /// difference, for quadrature paths the accumulated Simpson defect plus
    /// cluster-tail bounds.
    pub est_error: f64,
    pub evaluations: u64,
    /// Total length of cluster gaps beyond the enumeration cutoff.
    pub truncation_residual: f64,
}

/// Hard ceiling on partition cells walked in one sum; the default CLI
/// tolerance of 1e-8 on a unit window needs about 7e7.
const MAX_RIEMANN_CELLS: u64 = 400_000_000;
const MAX_HALVINGS: u32 = 30;

/// Delta-derivative on a scale: forward difference quotient at
/// right-scattered points, the classical derivative at right-dense ones.
pub fn delta_derivative(scale: &TimeScale, f: &Expr, t: f64) -> Result<f64> {
    let m = scale.member(t).ok_or(Error::QueryOutsideScale { t })?;
    let sig = scale.sigma(m)?;
    if sig > m + tol_at(m) {
        Ok((f.eval(sig)? - f.eval(m)?) / (sig - m))
    } else {
        let vd = f.eval_vd(m)?;
        if !vd.smooth_at_point {
            return Err(Error::NotDifferentiable { t: m });
        }
        Ok(vd.derivative)
    }
}

/// Left-endpoint delta-Riemann integral of `f` over `[a, b]_T`, computed by
/// halving the partition gauge until `|S_δ - S_{δ/2}| < tol`.
pub fn riemann_delta_integral(
    scale: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralReport> {
    let a = scale.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = scale.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    // the gauge must start below the shortest dense run, otherwise an
    // interval shorter than the gauge hides in one cell and two successive
    // sums can agree long before the dense part is resolved
    let mut min_dense = f64::INFINITY;
    for p in scale.pieces() {
        if let crate::scale::Piece::Interval { lo, hi } = p {
            let len = hi.min(b) - lo.max(a);
            if len > 0.0 {
                min_dense = min_dense.min(len);
            }
        }
    }
    let delta0 = safe_delta0(scale, a, b)?
        .min((b - a) / 8.0)
        .min(min_dense);
    let mut evaluations = 0u64;
    let mut prev = riemann_sum(scale, f, a, b, delta0, &mut evaluations)?;
    let mut last_diff = f64::INFINITY;
    for k in 1..=MAX_HALVINGS {
        let delta = delta0 / f64::from(1u32 << k.min(31));
        let cur = riemann_sum(scale, f, a, b, delta, &mut evaluations)?;
        last_diff = (cur - prev).abs();
        if last_diff < tol {
            return Ok(IntegralReport {
                value: cur,
                method: Method::RiemannSum,
                est_error: last_diff,
                evaluations,
                truncation_residual: 0.0,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence { halvings: MAX_HALVINGS, last_diff })
}

/// One left-endpoint delta-Riemann sum at a fixed gauge.
fn riemann_sum(
    scale: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
    delta: f64,
    evaluations: &mut u64,
) -> Result<f64> {
    let mut sum = KahanSum::new();
    let mut cells = 0u64;
    walk_cells(scale, a, b, delta, |lo, hi, _| {
        cells += 1;
        if cells > MAX_RIEMANN_CELLS {
            return Err(Error::NoConvergence { halvings: MAX_HALVINGS, last_diff: f64::NAN });
        }
        sum.add(f.eval(lo)? * (hi - lo));
        Ok(())
    })?;
    *evaluations += cells;
    Ok(sum.value())
}

/// Classical (real-line) integral by adaptive Simpson quadrature, splitting
/// cells at the integrand's floor/abs break points.
pub fn classical_integral(f: &Expr, a: f64, b: f64, tol: f64) -> Result<IntegralReport> {
    if b < a {
        return Err(Error::InvalidArgument(format!("window [{a}, {b}] is reversed")));
    }
    let breaks = f.breakpoints(a, b);
    let mut g = |s: f64| f.eval(s);
    let out = quad::integrate(&mut g, &breaks, a, b, tol)?;
    Ok(IntegralReport {
        value: out.value,
        method: Method::PiecewiseClosed,
        est_error: out.est_error,
        evaluations: out.evaluations,
        truncation_residual: 0.0,
    })
}

/// Both sides of the Abel summation identity, evaluated independently:
/// `Σ αᵢβᵢ` on the left and the summation-by-parts form on the right.
pub fn abel_sum(alpha: &[f64], beta: &[f64]) -> Result<(f64, f64)> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch { left: alpha.len(), right: beta.len() });
    }
    let n = alpha.len();
    if n < 2 {
        return Err(Error::InvalidArgument("Abel summation needs n >= 2".into()));
    }
    let lhs: f64 = alpha.iter().zip(beta).map(|(a, b)| a * b).sum();

    let mut prefix = 0.0;
    let mut rhs = 0.0;
    for i in 0..n - 1 {
        prefix += alpha[i];
        rhs += prefix * (beta[i] - beta[i + 1]);
    }
    rhs += beta[n - 1] * alpha.iter().sum::<f64>();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scale::Piece;

    #[test]
    fn delta_derivative_examples() {
        let f = parse("s^2").unwrap();
        let z = TimeScale::integer_window(0, 5).unwrap();
        assert_eq!(delta_derivative(&z, &f, 3.0).unwrap(), 7.0);

        let r = TimeScale::real_window(0.0, 5.0).unwrap();
        assert_eq!(delta_derivative(&r, &f, 3.0).unwrap(), 6.0);

        let mixed =
            TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![2.0])]).unwrap();
        assert_eq!(delta_derivative(&mixed, &f, 1.0).unwrap(), 3.0);
    }

    #[test]
    fn delta_derivative_rejects_kinks_at_dense_points() {
        let f = parse("abs(s)").unwrap();
        let r = TimeScale::real_window(-1.0, 1.0).unwrap();
        assert!(matches!(
            delta_derivative(&r, &f, 0.0),
            Err(Error::NotDifferentiable { .. })
        ));
        // at a right-scattered point only the forward difference matters
        let z = TimeScale::integer_window(-1, 1).unwrap();
        assert_eq!(delta_derivative(&z, &f, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn riemann_integral_on_discrete_window_is_exact() {
        let f = parse("s^2").unwrap();
        let n = TimeScale::integer_window(0, 5).unwrap();
        let r = riemann_delta_integral(&n, &f, 0.0, 5.0, 1e-9).unwrap();
        assert_eq!(r.value, 30.0);
        assert_eq!(r.est_error, 0.0);
        assert_eq!(r.truncation_residual, 0.0);
    }

    #[test]
    fn riemann_integral_on_real_window() {
        let f = parse("s").unwrap();
        let r = TimeScale::real_window(0.0, 1.0).unwrap();
        let out = riemann_delta_integral(&r, &f, 0.0, 1.0, 1e-6).unwrap();
        assert!((out.value - 0.5).abs() < 2e-6, "got {}", out.value);
    }

    #[test]
    fn riemann_integral_mixed_scale() {
        let f = parse("s").unwrap();
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![2.0])]).unwrap();
        let out = riemann_delta_integral(&t, &f, 0.0, 2.0, 1e-6).unwrap();
        // 1/2 from the interval plus f(1)·μ(1) = 1
        assert!((out.value - 1.5).abs() < 2e-6, "got {}", out.value);
    }

    #[test]
    fn classical_integral_examples() {
        let f = parse("s").unwrap();
        assert!((classical_integral(&f, 0.0, 1.0, 1e-10).unwrap().value - 0.5).abs() < 1e-10);

        let f = parse("floor(s)*2*s").unwrap();
        let r = classical_integral(&f, 0.0, 3.0, 1e-10).unwrap();
        assert!((r.value - 13.0).abs() < 1e-9, "got {}", r.value);

        let f = parse("sin(s)").unwrap();
        let r = classical_integral(&f, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn abel_sum_examples() {
        let (l, r) = abel_sum(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((l, r), (6.0, 6.0));
        let (l, r) = abel_sum(&[0.0, 0.0], &[5.0, 7.0]).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let (l, r) = abel_sum(&[2.0, -1.0, 4.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((l, r), (5.0, 5.0));
        assert!(matches!(
            abel_sum(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn linearity_and_additivity_within_tolerance() {
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![1.5, 2.0])]).unwrap();
        let tol = 1e-6;
        let f = parse("s^2").unwrap();
        let g = parse("sin(s)").unwrap();
        let combo = parse("2*s^2+3*sin(s)").unwrap();
        let int_f = riemann_delta_integral(&t, &f, 0.0, 2.0, tol).unwrap().value;
        let int_g = riemann_delta_integral(&t, &g, 0.0, 2.0, tol).unwrap().value;
        let int_c = riemann_delta_integral(&t, &combo, 0.0, 2.0, tol).unwrap().value;
        assert!((int_c - (2.0 * int_f + 3.0 * int_g)).abs() < 6.0 * tol);

        let left = riemann_delta_integral(&t, &f, 0.0, 1.0, tol).unwrap().value;
        let right = riemann_delta_integral(&t, &f, 1.0, 2.0, tol).unwrap().value;
        assert!((int_f - left - right).abs() < 2.0 * tol);
    }
}
