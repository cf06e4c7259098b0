//! Cross-scale integration by parts:
//!
//! ```text
//! ∫ₐᵇ f Δ_T s = [s·f(s)]ₐᵇ − ∫ₐᵇ S(T)·f^Δ̃ Δ_T̃ s
//! ```
//!
//! where `T ⊆ T̃`, `S(T)` is the jump envelope of the window, and `f^Δ̃`
//! the delta-derivative on the superscale. With `T̃ = T` this is ordinary
//! integration by parts on one scale; with `T̃ = ℝ` the right side only
//! involves classical calculus.
//!
//! ```bash
//! cargo run --example integration_by_parts
//! ```

use deltascale::{by_parts_cross_scale, parse_expr, riemann_delta_integral, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let f = parse_expr("s^2")?;

    // classical case: T = T̃ = [0,1]; ∫ s² ds = 1·1 − ∫ s·2s ds = 1/3
    let reals = TimeScale::real_window(0.0, 1.0)?;
    let r = by_parts_cross_scale(&reals, &reals, &f, 0.0, 1.0, 1e-10)?;
    println!("T = T̃ = [0,1]:      {:.12} (exact 1/3)", r.value);

    // same-scale discrete case: the envelope restricted to T is sigma
    let ints = TimeScale::integer_window(0, 2)?;
    let r = by_parts_cross_scale(&ints, &ints, &f, 0.0, 2.0, 1e-10)?;
    let oracle = riemann_delta_integral(&ints, &f, 0.0, 2.0, 1e-12)?;
    println!("T = T̃ = {{0,1,2}}:    {:.12} vs direct sum {}", r.value, oracle.value);

    // cross-scale: integers inside the reals; the delta sum becomes a
    // classical integral against the step envelope
    let n_window = TimeScale::integer_window(0, 3)?;
    let sup = TimeScale::real_window(0.0, 3.0)?;
    let r = by_parts_cross_scale(&n_window, &sup, &f, 0.0, 3.0, 1e-10)?;
    println!("T = {{0..3}}, T̃ = ℝ:  {:.12} (Σ i² over i<3 = 5)", r.value);

    // and on a mixed scale against the oracle
    let mixed = TimeScale::parse("union(interval(0,1), points(1.5, 2))")?;
    let sup = TimeScale::real_window(0.0, 2.0)?;
    let parts = by_parts_cross_scale(&mixed, &sup, &f, 0.0, 2.0, 1e-10)?;
    let oracle = riemann_delta_integral(&mixed, &f, 0.0, 2.0, 4e-7)?;
    println!(
        "mixed T in ℝ:        {:.9} vs oracle {:.9} (|diff| = {:.2e})",
        parts.value,
        oracle.value,
        (parts.value - oracle.value).abs()
    );
    Ok(())
}
