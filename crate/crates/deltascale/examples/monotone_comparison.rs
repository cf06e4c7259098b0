//! For non-decreasing integrands, refining the scale can only increase the
//! delta-integral: `∫f Δ_T ≤ ∫f Δ_T̃` whenever `T ⊆ T̃`. Left-endpoint
//! sums undershoot, and coarser scales take longer steps.
//!
//! ```bash
//! cargo run --example monotone_comparison
//! ```

use deltascale::{monotone_compare, parse_expr, Error, TimeScale};

fn main() -> Result<(), Error> {
    let f = parse_expr("s")?;

    let ints = TimeScale::integer_window(0, 2)?;
    let halves = TimeScale::from_points(&[0.0, 0.5, 1.0, 1.5, 2.0])?;
    let m = monotone_compare(&ints, &halves, &f, 0.0, 2.0)?;
    println!("f = s on integers vs halves over [0,2]:");
    println!("  ∫ Δ_T = {}, ∫ Δ_T̃ = {}, holds: {}", m.lhs, m.rhs, m.holds);

    let reals = TimeScale::real_window(0.0, 2.0)?;
    let m = monotone_compare(&ints, &reals, &f, 0.0, 2.0)?;
    println!("f = s on integers vs the continuum:");
    println!("  ∫ Δ_T = {}, ∫ Δ_T̃ = {}, holds: {}", m.lhs, m.rhs, m.holds);

    // equality when the integrand is constant
    let c = parse_expr("3")?;
    let m = monotone_compare(&ints, &reals, &c, 0.0, 2.0)?;
    println!("f = 3 (constant): lhs = {}, rhs = {}", m.lhs, m.rhs);

    // decreasing integrands are rejected up front
    let g = parse_expr("-s")?;
    match monotone_compare(&ints, &reals, &g, 0.0, 2.0) {
        Err(Error::NotMonotone { t }) => println!("f = -s rejected: not monotone (sampled at {t})"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
