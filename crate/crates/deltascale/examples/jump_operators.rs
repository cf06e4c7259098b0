//! Forward/backward jump operators, graininess, and point classification on
//! three kinds of scales.
//!
//! ```bash
//! cargo run --example jump_operators
//! ```

use deltascale::{Piece, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let integers = TimeScale::integer_window(0, 5)?;
    println!("T = {}", integers.to_spec_string());
    for t in [0.0, 2.0, 4.0] {
        println!(
            "  sigma({t}) = {}, rho({t}) = {}, mu({t}) = {}",
            integers.sigma(t)?,
            integers.rho(t)?,
            integers.mu(t)?
        );
    }

    // half-open structure: a continuum with an isolated point after it
    let mixed = TimeScale::parse("union(interval(0,1), points(2))")?;
    println!("\nT = {}", mixed.to_spec_string());
    for t in [0.5, 1.0, 2.0] {
        let class = mixed.classify(t);
        println!(
            "  t = {t}: sigma = {}, rho = {}, class = {:?}",
            mixed.sigma(t).map_or("none (maximum)".into(), |v| v.to_string()),
            mixed.rho(t)?,
            class.map(|c| (c.left, c.right)),
        );
    }

    // the q-scale {0} ∪ {qⁿ}: every member is scattered, 0 is right-dense
    let q_scale = TimeScale::new(vec![Piece::geometric(0.5, 1.0)])?;
    println!("\nT = {}", q_scale.to_spec_string());
    for t in [1.0 / 8.0, 1.0 / 4.0, 0.0] {
        println!(
            "  t = {t}: rho = {}, mu = {}",
            q_scale.rho(t)?,
            q_scale.mu(t)?
        );
    }
    println!("  classify(0) = {:?}", q_scale.classify(0.0)?);
    Ok(())
}
