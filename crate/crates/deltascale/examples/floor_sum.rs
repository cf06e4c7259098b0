//! The floor-integral form of a discrete sum: on the naturals the jump
//! envelope is `⌊t⌋ + 1`, so integration by parts against the real line
//! turns a sum into a classical integral with a floor factor:
//!
//! ```text
//! Σ_{i=a}^{b-1} f(i) = (b-1)f(b) − (a-1)f(a) − ∫ₐᵇ ⌊s⌋·f'(s) ds
//! ```
//!
//! ```bash
//! cargo run --example floor_sum
//! ```

use deltascale::{classical_integral, parse_expr, riemann_delta_integral, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let (a, b) = (0.0, 3.0);
    let f = parse_expr("s^2")?;

    // left side: the delta-integral over {0,1,2,3} is the plain sum
    let naturals = TimeScale::integer_window(a as i64, b as i64)?;
    let lhs = riemann_delta_integral(&naturals, &f, a, b, 1e-12)?;
    println!("Σ i² for i in 0..3                   = {}", lhs.value);

    // right side: the floor integral, split automatically at 1 and 2
    let floor_term = parse_expr("floor(s)*2*s")?;
    let quad = classical_integral(&floor_term, a, b, 1e-11)?;
    println!("∫₀³ ⌊s⌋·2s ds                        = {:.12}", quad.value);

    let rhs = (b - 1.0) * f.eval(b)? - (a - 1.0) * f.eval(a)? - quad.value;
    println!("(b-1)f(b) - (a-1)f(a) - ∫ ⌊s⌋·2s ds  = {rhs:.12}");
    println!("agreement: |lhs - rhs| = {:.3e}", (lhs.value - rhs).abs());

    // the envelope itself: S(t) = ⌊t⌋ + 1 below rho(b), then b
    println!("\njump envelope of [0,3] on the naturals:");
    for t in [0.0, 0.4, 1.0, 1.9, 2.0, 2.5, 3.0] {
        println!("  S({t}) = {}", naturals.jump_envelope(a, b, t)?);
    }
    Ok(())
}
