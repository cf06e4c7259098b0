//! The oracle path: delta-integrals computed literally as left-endpoint
//! Riemann sums over delta-partitions, halving the gauge until two
//! successive sums agree. On a purely discrete window the sum is exact at
//! the first gauge.
//!
//! ```bash
//! cargo run --example riemann_oracle
//! ```

use deltascale::{parse_expr, riemann_delta_integral, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let f = parse_expr("s^2")?;

    let ints = TimeScale::integer_window(0, 5)?;
    let r = riemann_delta_integral(&ints, &f, 0.0, 5.0, 1e-9)?;
    println!(
        "∫ s² over {{0..5}}        = {} (exact jump sum, {} cells walked)",
        r.value, r.evaluations
    );

    let reals = TimeScale::real_window(0.0, 1.0)?;
    let r = riemann_delta_integral(&reals, &f, 0.0, 1.0, 1e-6)?;
    println!(
        "∫ s² over [0,1]         = {:.9} (true 1/3; est error {:.2e}, {} evals)",
        r.value, r.est_error, r.evaluations
    );

    let mixed = TimeScale::parse("union(interval(0,1), points(2))")?;
    let r = riemann_delta_integral(&mixed, &f, 0.0, 2.0, 1e-6)?;
    println!(
        "∫ s² over [0,1] ∪ {{2}}   = {:.9} (true 1/3 + f(1)·μ(1) = 4/3)",
        r.value
    );

    let q_scale = TimeScale::parse("geometric(q=0.5, c=1)")?;
    let r = riemann_delta_integral(&q_scale, &f, 0.0, 1.0, 1e-6)?;
    // Σ f(qⁿ⁺¹)·(qⁿ - qⁿ⁺¹) over n ≥ 0 = q²(1-q)/(1-q³) = 1/7 for q = 1/2
    let q: f64 = 0.5;
    let exact = q * q * (1.0 - q) / (1.0 - q * q * q);
    println!(
        "∫ s² over {{0}} ∪ {{2⁻ⁿ}}  = {:.9} (series value {exact:.9})",
        r.value
    );
    Ok(())
}
