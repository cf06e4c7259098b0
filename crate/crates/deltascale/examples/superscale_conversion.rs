//! Rewriting a delta-integral through a larger scale:
//!
//! ```text
//! ∫ₐᵇ f Δ_T = ∫ₐᵇ f∘σ_T̃ Δ_T̃ + Σ_{τ<b, scattered} [μ_T(τ)f(τ) − ∫_τ^{σ_T(τ)} f∘σ_T̃ Δ_T̃]
//! ```
//!
//! With `T̃ = ℝ` this is the classical-plus-jump-sum decomposition; with a
//! proper intermediate scale the corrections account for the structure of
//! `T̃` inside each gap of `T`.
//!
//! ```bash
//! cargo run --example superscale_conversion
//! ```

use deltascale::{
    convert_via_real, convert_via_superscale, parse_expr, riemann_delta_integral, TimeScale,
};

fn main() -> Result<(), deltascale::Error> {
    let f = parse_expr("s^2")?;

    // T = {0,1,2} through T̃ = [0,2] collapses to the real-line form
    let t = TimeScale::integer_window(0, 2)?;
    let reals = TimeScale::real_window(0.0, 2.0)?;
    let via_super = convert_via_superscale(&t, &reals, &f, 0.0, 2.0, 1e-10)?;
    let via_real = convert_via_real(&t, &f, 0.0, 2.0, 1e-10)?;
    println!("T = {{0,1,2}}, f = s²:");
    println!("  superscale route: {:.12}", via_super.value);
    println!("  real-line route:  {:.12}", via_real.value);
    println!("  |difference|:     {:.3e}", (via_super.value - via_real.value).abs());

    // a genuine intermediate scale: T̃ adds points inside T's gaps
    let sub = TimeScale::parse("union(points(0), interval(2,4))")?;
    let sup = TimeScale::parse("union(points(0,1), interval(2,4))")?;
    let g = parse_expr("s")?;
    let conv = convert_via_superscale(&sub, &sup, &g, 0.0, 4.0, 1e-10)?;
    let oracle = riemann_delta_integral(&sub, &g, 0.0, 4.0, 1e-6)?;
    println!("\nT = {{0}} ∪ [2,4] inside T̃ = {{0,1}} ∪ [2,4], f = s:");
    println!("  conversion {:.9} vs oracle {:.9}", conv.value, oracle.value);

    // the q-scale: infinitely many jump corrections, telescoping exactly
    let q_scale = TimeScale::parse("geometric(q=0.5, c=1)")?;
    let unit = TimeScale::real_window(0.0, 1.0)?;
    let one = parse_expr("1")?;
    let conv = convert_via_superscale(&q_scale, &unit, &one, 0.0, 1.0, 1e-10)?;
    println!("\nT = {{0}} ∪ {{2⁻ⁿ}}, f = 1 on [0,1]:");
    println!(
        "  value {:.12} (gap sum telescopes to b - a = 1), residual {:.2e}",
        conv.value, conv.truncation_residual
    );
    Ok(())
}
