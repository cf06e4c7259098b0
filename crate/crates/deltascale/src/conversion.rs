//! Conversion formulas between delta-integrals on nested scales.
//!
//! Every operation here rewrites a delta-integral over `T` into classical
//! quadrature plus jump corrections, either directly on the real line
//! ([`convert_via_real`]), through a superscale `T̃ ⊇ T`
//! ([`convert_via_superscale`]), or by cross-scale integration by parts
//! against the jump envelope ([`by_parts_cross_scale`]). The independent
//! check for all of them is [`crate::calculus::riemann_delta_integral`],
//! which never touches this module.

use crate::calculus::{IntegralReport, Method};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::num::{strictly_less, tol_at, KahanSum};
use crate::quad;
use crate::scale::{restrict, SubsetEvidence, TimeScale};

#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    value: f64,
    est_error: f64,
    evaluations: u64,
    truncation_residual: f64,
}

/// Delta-integral of a pointwise integrand over `[a, b]` on `scale`:
/// classical quadrature over the interval pieces plus `g(τ)·μ(τ)` over the
/// jumps with `τ < b`. Cluster tails beyond the enumeration cutoff
/// contribute their limit value `g(acc)·length`, with the replacement error
/// bounded by the sampled oscillation.
fn delta_integral_of(
    scale: &TimeScale,
    g: &mut dyn FnMut(f64) -> Result<f64>,
    breaks: &[f64],
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Accum> {
    let jumps = scale.jump_terms(a, b)?;
    let mut acc = Accum::default();

    let mut segments = Vec::new();
    let mut dense_total = 0.0;
    for p in scale.pieces() {
        if let crate::scale::Piece::Interval { lo, hi } = p {
            let s0 = lo.max(a);
            let s1 = hi.min(b);
            if s1 > s0 + tol_at(s0) {
                segments.push((s0, s1));
                dense_total += s1 - s0;
            }
        }
    }
    for (s0, s1) in segments {
        let share = tol * (s1 - s0) / dense_total;
        let out = quad::integrate(g, breaks, s0, s1, share)?;
        acc.value += out.value;
        acc.est_error += out.est_error;
        acc.evaluations += out.evaluations;
    }

    let mut jump_sum = KahanSum::new();
    for gap in &jumps.gaps {
        jump_sum.add(g(gap.tau)? * gap.length());
        acc.evaluations += 1;
    }
    acc.value += jump_sum.value();

    for &(lo_r, hi_r) in &jumps.residual_regions {
        let len = hi_r - lo_r;
        let g0 = g(lo_r)?;
        acc.value += g0 * len;
        acc.evaluations += 1;
        // replacement error bound from the oscillation toward the cutoff
        let mut osc = 0.0f64;
        for x in [hi_r, lo_r + 0.5 * len] {
            if let Ok(v) = g(x) {
                osc = osc.max((v - g0).abs());
                acc.evaluations += 1;
            }
        }
        acc.est_error += 2.0 * osc * len;
    }
    acc.truncation_residual = jumps.truncation_residual;
    Ok(acc)
}

fn require_subset(sup: &TimeScale, sub: &TimeScale) -> Result<()> {
    match restrict(sup, sub) {
        SubsetEvidence::Subset => Ok(()),
        SubsetEvidence::NotSubset { witness } => Err(Error::NotSubset { witness }),
    }
}

/// Delta-derivative of `f` on `scale` as a pointwise closure over members.
fn delta_derivative_at(scale: &TimeScale, f: &Expr, s: f64) -> Result<f64> {
    let m = scale.member(s).ok_or(Error::QueryOutsideScale { t: s })?;
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

/// Window-form real-line conversion: classical integral over the dense part
/// of the window plus the jump sum `Σ f(τ)·μ(τ)` over `τ ∈ [a, b)`.
pub fn convert_via_real(
    scale: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralReport> {
    let a = scale.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = scale.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    let breaks = f.breakpoints(a, b);
    let mut g = |s: f64| f.eval(s);
    let acc = delta_integral_of(scale, &mut g, &breaks, a, b, tol)?;
    Ok(IntegralReport {
        value: acc.value,
        method: Method::ConvertReal,
        est_error: acc.est_error,
        evaluations: acc.evaluations,
        truncation_residual: acc.truncation_residual,
    })
}

/// Superscale conversion: `∫f Δ_T` rewritten over `T̃ ⊇ T` as
/// `∫ f∘σ_T̃ Δ_T̃ + Σ_{τ<b} [μ_T(τ)f(τ) − ∫_τ^{σ_T(τ)} f∘σ_T̃ Δ_T̃]`.
pub fn convert_via_superscale(
    sub: &TimeScale,
    sup: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralReport> {
    let a = sub.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = sub.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    require_subset(sup, sub)?;
    let breaks = f.breakpoints(a, b);

    let mut g = |s: f64| {
        let sig = sup.successor_infimum(s).unwrap_or(s);
        f.eval(sig)
    };

    let mut acc = delta_integral_of(sup, &mut g, &breaks, a, b, tol / 2.0)?;
    let sub_jumps = sub.jump_terms(a, b)?;
    let inner_tol = tol / (2.0 * sub_jumps.gaps.len().max(1) as f64);

    let mut corrections = KahanSum::new();
    for gap in &sub_jumps.gaps {
        let mu = gap.length();
        let direct = mu * f.eval(gap.tau)?;
        acc.evaluations += 1;
        // with no superscale structure inside the gap, the inner integral is
        // a single two-point cell
        let sup_next = sup.successor_infimum(gap.tau).unwrap_or(gap.tau);
        if sup_next >= gap.sigma_tau - tol_at(gap.sigma_tau) {
            corrections.add(direct - mu * f.eval(gap.sigma_tau)?);
            acc.evaluations += 1;
        } else {
            let inner = delta_integral_of(sup, &mut g, &breaks, gap.tau, gap.sigma_tau, inner_tol)?;
            corrections.add(direct - inner.value);
            acc.est_error += inner.est_error;
            acc.evaluations += inner.evaluations;
            acc.truncation_residual += inner.truncation_residual;
        }
    }
    acc.value += corrections.value();

    // corrections for truncated cluster gaps of the subscale are second
    // order; account for them in the error bound only
    for &(lo_r, hi_r) in &sub_jumps.residual_regions {
        let len = hi_r - lo_r;
        let f0 = f.eval(lo_r)?;
        let f1 = f.eval(hi_r)?;
        acc.evaluations += 2;
        acc.est_error += 2.0 * (f1 - f0).abs() * len;
        acc.truncation_residual += len;
    }

    Ok(IntegralReport {
        value: acc.value,
        method: Method::ConvertSuperscale,
        est_error: acc.est_error,
        evaluations: acc.evaluations,
        truncation_residual: acc.truncation_residual,
    })
}

/// Cross-scale integration by parts:
/// `∫_a^b f Δ_T = [s·f(s)]_a^b − ∫_a^b S(T)·f^Δ̃ Δ_T̃`, where `S(T)` is the
/// jump envelope of the window on `T` and `f^Δ̃` the delta-derivative on the
/// superscale.
pub fn by_parts_cross_scale(
    sub: &TimeScale,
    sup: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralReport> {
    let a = sub.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = sub.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    require_subset(sup, sub)?;
    let rb = sub.rho(b)?;
    if !strictly_less(a, rb) {
        return Err(Error::DegenerateWindow { a, b });
    }

    let boundary = b * f.eval(b)? - a * f.eval(a)?;

    // the envelope is a step function; its breaks sit at the gap starts
    let mut breaks = f.breakpoints(a, b);
    let sub_jumps = sub.jump_terms(a, b)?;
    breaks.extend(sub_jumps.gaps.iter().map(|gp| gp.tau));
    breaks.push(rb);

    let envelope = |s: f64| -> f64 {
        if !strictly_less(s, rb) {
            b
        } else {
            sub.successor_infimum(s).unwrap_or(b).min(b)
        }
    };
    let mut g = |s: f64| -> Result<f64> { Ok(envelope(s) * delta_derivative_at(sup, f, s)?) };

    let acc = delta_integral_of(sup, &mut g, &breaks, a, b, tol)?;
    Ok(IntegralReport {
        value: boundary - acc.value,
        method: Method::ByParts,
        est_error: acc.est_error,
        evaluations: acc.evaluations + 2,
        truncation_residual: acc.truncation_residual,
    })
}

/// Result of the monotone comparison of `∫f Δ_T` against `∫f Δ_T̃`.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const MONOTONE_SLACK: f64 = -1e-12;
const COMPARE_TOL: f64 = 1e-9;

/// For non-decreasing `f`, the subscale integral is bounded by the
/// superscale integral. Monotonicity is checked by sampling the superscale
/// delta-derivative.
pub fn monotone_compare(
    sub: &TimeScale,
    sup: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
) -> Result<MonotoneComparison> {
    let a = sub.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = sub.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    require_subset(sup, sub)?;

    // sample f^Δ̃ at scattered members and across dense runs
    for m in sup.sample_members(a, b, 160) {
        if m >= b - tol_at(b) {
            continue;
        }
        match delta_derivative_at(sup, f, m) {
            Ok(d) if d < MONOTONE_SLACK => return Err(Error::NotMonotone { t: m }),
            _ => {}
        }
    }
    for p in sup.pieces() {
        if let crate::scale::Piece::Interval { lo, hi } = p {
            let (s0, s1) = (lo.max(a), hi.min(b));
            if s1 <= s0 {
                continue;
            }
            for i in 0..=64 {
                let s = s0 + (s1 - s0) * i as f64 / 64.0;
                if let Ok(vd) = f.eval_vd(s) {
                    if vd.smooth_at_point && vd.derivative < MONOTONE_SLACK {
                        return Err(Error::NotMonotone { t: s });
                    }
                }
            }
        }
    }

    let lhs = convert_via_superscale(sub, sup, f, a, b, 1e-10)?.value;
    let rhs = convert_via_real(sup, f, a, b, 1e-10)?.value;
    Ok(MonotoneComparison { lhs, rhs, holds: lhs <= rhs + COMPARE_TOL })
}

/// One row of a chain-convergence experiment.
#[derive(Debug, Clone, Copy)]
pub struct ChainRow {
    pub n: usize,
    pub value: f64,
    pub gap_to_limit: f64,
}

/// Integrate `f` along an ascending chain `T₀ ⊆ T₁ ⊆ …` inside the union
/// scale and report each value against the union-scale integral.
pub fn chain_convergence(
    chain: &[TimeScale],
    sup: &TimeScale,
    f: &Expr,
    a: f64,
    b: f64,
) -> Result<Vec<ChainRow>> {
    let first = chain
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty chain".into()))?;
    let a = first.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = first.member(b).ok_or(Error::QueryOutsideScale { t: b })?;

    if !(strictly_less(first.min(), a)) {
        return Err(Error::HypothesisViolated {
            reason: format!("window start {a} must lie strictly above the chain base minimum {}", first.min()),
        });
    }
    if !(strictly_less(b, first.max())) {
        return Err(Error::HypothesisViolated {
            reason: format!("window end {b} must lie strictly below the chain base maximum {}", first.max()),
        });
    }
    let rb0 = first.rho(b)?;
    if !strictly_less(a, rb0) {
        return Err(Error::HypothesisViolated {
            reason: format!("window [{a}, {b}] is degenerate on the chain base"),
        });
    }
    for (i, w) in chain.windows(2).enumerate() {
        if let SubsetEvidence::NotSubset { witness } = restrict(&w[1], &w[0]) {
            return Err(Error::ChainNotAscending { index: i, witness });
        }
    }
    if let Some(last) = chain.last() {
        if let SubsetEvidence::NotSubset { witness } = restrict(sup, last) {
            return Err(Error::ChainNotAscending { index: chain.len() - 1, witness });
        }
    }

    let limit = convert_via_real(sup, f, a, b, 1e-10)?.value;
    let mut rows = Vec::with_capacity(chain.len());
    for (n, scale) in chain.iter().enumerate() {
        let value = convert_via_superscale(scale, sup, f, a, b, 1e-10)?.value;
        rows.push(ChainRow { n, value, gap_to_limit: (value - limit).abs() });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::riemann_delta_integral;
    use crate::expr::parse;
    use crate::scale::Piece;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn via_real_on_pure_jumps() {
        let t = TimeScale::integer_window(0, 2).unwrap();
        let f = parse("s^2").unwrap();
        let r = convert_via_real(&t, &f, 0.0, 2.0, 1e-10).unwrap();
        assert!(close(r.value, 1.0, 1e-12), "got {}", r.value);
    }

    #[test]
    fn via_real_on_real_window() {
        let t = TimeScale::real_window(0.0, 1.0).unwrap();
        let f = parse("s").unwrap();
        let r = convert_via_real(&t, &f, 0.0, 1.0, 1e-10).unwrap();
        assert!(close(r.value, 0.5, 1e-10));
    }

    #[test]
    fn via_real_telescopes_on_q_scale() {
        // constant 1 over {0} ∪ {qⁿ}: the gaps telescope to b − a
        let t = TimeScale::new(vec![Piece::geometric(0.5, 1.0)]).unwrap();
        let f = parse("1").unwrap();
        let r = convert_via_real(&t, &f, 0.0, 1.0, 1e-10).unwrap();
        assert!(close(r.value, 1.0, 1e-9), "got {}", r.value);
        let oracle = riemann_delta_integral(&t, &f, 0.0, 1.0, 1e-9).unwrap();
        assert!(close(r.value, oracle.value, 1e-8));
    }

    #[test]
    fn by_parts_classical_case() {
        let t = TimeScale::real_window(0.0, 1.0).unwrap();
        let f = parse("s^2").unwrap();
        let r = by_parts_cross_scale(&t, &t, &f, 0.0, 1.0, 1e-10).unwrap();
        assert!(close(r.value, 1.0 / 3.0, 1e-9), "got {}", r.value);
    }

    #[test]
    fn by_parts_same_scale_discrete() {
        let t = TimeScale::integer_window(0, 2).unwrap();
        let f = parse("s^2").unwrap();
        let r = by_parts_cross_scale(&t, &t, &f, 0.0, 2.0, 1e-10).unwrap();
        let oracle = riemann_delta_integral(&t, &f, 0.0, 2.0, 1e-12).unwrap();
        assert!(close(r.value, oracle.value, 1e-9), "{} vs {}", r.value, oracle.value);
        assert_eq!(oracle.value, 1.0);
    }

    #[test]
    fn by_parts_integers_in_reals() {
        let sub = TimeScale::integer_window(0, 3).unwrap();
        let sup = TimeScale::real_window(0.0, 3.0).unwrap();
        let f = parse("s^2").unwrap();
        let r = by_parts_cross_scale(&sub, &sup, &f, 0.0, 3.0, 1e-10).unwrap();
        assert!(close(r.value, 5.0, 1e-9), "got {}", r.value);
    }

    #[test]
    fn superscale_reduces_to_real_for_real_superscale() {
        let sub = TimeScale::integer_window(0, 2).unwrap();
        let sup = TimeScale::real_window(0.0, 2.0).unwrap();
        let f = parse("s^2").unwrap();
        let s = convert_via_superscale(&sub, &sup, &f, 0.0, 2.0, 1e-10).unwrap();
        let r = convert_via_real(&sub, &f, 0.0, 2.0, 1e-10).unwrap();
        assert!(close(s.value, 1.0, 1e-9), "got {}", s.value);
        assert!(close(s.value, r.value, 1e-9));
    }

    #[test]
    fn superscale_identity_when_scales_equal() {
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![2.0])]).unwrap();
        let f = parse("s").unwrap();
        let s = convert_via_superscale(&t, &t, &f, 0.0, 2.0, 1e-10).unwrap();
        assert!(close(s.value, 1.5, 1e-9), "got {}", s.value);
    }

    #[test]
    fn superscale_with_intermediate_scale() {
        let sub = TimeScale::new(vec![Piece::points(vec![0.0]), Piece::interval(2.0, 4.0)]).unwrap();
        let sup =
            TimeScale::new(vec![Piece::points(vec![0.0, 1.0]), Piece::interval(2.0, 4.0)]).unwrap();
        let f = parse("s").unwrap();
        let s = convert_via_superscale(&sub, &sup, &f, 0.0, 4.0, 1e-10).unwrap();
        let oracle = riemann_delta_integral(&sub, &f, 0.0, 4.0, 1e-6).unwrap();
        assert!(close(s.value, 6.0, 1e-9), "got {}", s.value);
        assert!(close(s.value, oracle.value, 3e-6));
    }

    #[test]
    fn not_subset_is_rejected() {
        let sub = TimeScale::real_window(0.0, 1.0).unwrap();
        let sup = TimeScale::integer_window(0, 2).unwrap();
        let f = parse("s").unwrap();
        assert!(matches!(
            convert_via_superscale(&sub, &sup, &f, 0.0, 1.0, 1e-9),
            Err(Error::NotSubset { .. })
        ));
    }

    #[test]
    fn monotone_compare_examples() {
        let sub = TimeScale::integer_window(0, 2).unwrap();
        let sup = TimeScale::real_window(0.0, 2.0).unwrap();
        let f = parse("s").unwrap();
        let m = monotone_compare(&sub, &sup, &f, 0.0, 2.0).unwrap();
        assert!(close(m.lhs, 1.0, 1e-9));
        assert!(close(m.rhs, 2.0, 1e-9));
        assert!(m.holds);

        // halves vs integers
        let half = TimeScale::from_points(&[0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
        let m = monotone_compare(&sub, &half, &f, 0.0, 2.0).unwrap();
        assert!(close(m.lhs, 1.0, 1e-9));
        assert!(close(m.rhs, 1.5, 1e-9));
        assert!(m.holds);

        // equality for constant integrands
        let f = parse("3").unwrap();
        let m = monotone_compare(&sub, &sup, &f, 0.0, 2.0).unwrap();
        assert!(close(m.lhs, m.rhs, 1e-9));
        assert!(m.holds);
    }

    #[test]
    fn monotone_compare_rejects_decreasing() {
        let sub = TimeScale::integer_window(0, 2).unwrap();
        let sup = TimeScale::real_window(0.0, 2.0).unwrap();
        let f = parse("-s").unwrap();
        assert!(matches!(
            monotone_compare(&sub, &sup, &f, 0.0, 2.0),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn chain_rows_shrink_toward_limit() {
        let sup = TimeScale::new(vec![
            Piece::points(vec![-1.0, 0.0]),
            Piece::harmonic(1.0),
            Piece::interval(1.0, 3.0),
        ])
        .unwrap();
        let chain: Vec<TimeScale> = [1usize, 2, 4, 8, 16]
            .iter()
            .map(|&n| {
                let ks: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
                TimeScale::new(vec![
                    Piece::points(vec![-1.0, 0.0]),
                    Piece::points(ks),
                    Piece::interval(1.0, 3.0),
                ])
                .unwrap()
            })
            .collect();
        let f = parse("s").unwrap();
        let rows = chain_convergence(&chain, &sup, &f, 0.0, 2.0).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].gap_to_limit <= w[0].gap_to_limit + 1e-12);
        }
        assert!(rows.last().unwrap().gap_to_limit < rows[0].gap_to_limit);
    }

    #[test]
    fn chain_rejects_non_ascending() {
        let t1 = TimeScale::from_points(&[-1.0, 0.0, 0.5, 1.0, 3.0]).unwrap();
        let t2 = TimeScale::from_points(&[-1.0, 0.0, 0.4, 1.0, 3.0]).unwrap();
        let sup = TimeScale::new(vec![Piece::points(vec![-1.0]), Piece::interval(0.0, 3.0)]).unwrap();
        let f = parse("s").unwrap();
        match chain_convergence(&[t1, t2], &sup, &f, 0.0, 1.0) {
            Err(Error::ChainNotAscending { index: 0, witness }) => {
                assert!(close(witness, 0.5, 1e-12));
            }
            other => panic!("expected ChainNotAscending, got {other:?}"),
        }
    }
}
