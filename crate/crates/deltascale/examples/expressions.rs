//! The integrand mini-language: parsing, canonical printing, one-pass
//! value-plus-derivative evaluation, and break-point detection for
//! piecewise factors.
//!
//! ```bash
//! cargo run --example expressions
//! ```

use deltascale::parse_expr;

fn main() -> Result<(), deltascale::Error> {
    for text in ["s^2", "floor(s)*2*s", "-s^2+exp(s/2)", "abs(s-1)/(s+3)"] {
        let e = parse_expr(text)?;
        println!("{text:<22} prints as {e}");
    }

    let e = parse_expr("sin(s)*s^2")?;
    println!("\nf = {e}");
    for s in [0.0, 1.0, 2.0] {
        let vd = e.eval_vd(s)?;
        println!("  f({s}) = {:+.6}, f'({s}) = {:+.6}", vd.value, vd.derivative);
    }

    let e = parse_expr("floor(2*s+0.5)")?;
    println!("\nf = {e}");
    println!("  breaks in (0, 2): {:?}", e.breakpoints(0.0, 2.0));
    let vd = e.eval_vd(0.25)?;
    println!("  at a break: value {}, smooth_at_point = {}", vd.value, vd.smooth_at_point);

    let e = parse_expr("floor(s^2)")?;
    println!("\nf = {e} (non-affine argument, breaks found by bisection)");
    for b in e.breakpoints(0.5, 2.1) {
        println!("  break near {b:.12} (b² = {:.12})", b * b);
    }

    match parse_expr("sin(s") {
        Err(err) => println!("\nparse error reporting: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
