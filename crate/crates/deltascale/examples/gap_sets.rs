//! The gap set I(T) of a window: the real intervals `[τ, σ(τ))` a scale
//! skips over. Reproduces the three textbook cases: the real line has none,
//! the integers tile `[a, b-1)`, and the q-scale tiles `(0, q²)` with an
//! exactly-tracked residual near the accumulation point.
//!
//! ```bash
//! cargo run --example gap_sets
//! ```

use deltascale::{Piece, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let real = TimeScale::real_window(0.0, 1.0)?;
    let g = real.gap_set(0.0, 1.0)?;
    println!("I([0,1])      : {} gaps (dense window)", g.gaps.len());

    let ints = TimeScale::integer_window(0, 5)?;
    let g = ints.gap_set(0.0, 5.0)?;
    let tiles: Vec<String> = g.gaps.iter().map(|x| format!("[{}, {})", x.tau, x.sigma_tau)).collect();
    println!("I({{0..5}})     : {}", tiles.join(" ∪ "));
    println!("                total length {}", g.total_length());

    let q = 0.5;
    let q_scale = TimeScale::new(vec![Piece::geometric(q, 1.0)])?;
    let g = q_scale.gap_set(0.0, q)?;
    println!("I(q-scale on [0, {q}]):");
    println!("  {} enumerated gaps, largest [{}, {})", g.gaps.len(),
        g.gaps.last().unwrap().tau, g.gaps.last().unwrap().sigma_tau);
    println!("  truncation residual {:.3e} over {:?}", g.truncation_residual, g.residual_regions);
    println!("  total length {} (= q² = {})", g.total_length(), q * q);

    // jump-term enumeration differs only in the upper bound: it keeps the
    // final gap [rho(b), b) that the window's gap set excludes
    let j = ints.jump_terms(0.0, 5.0)?;
    println!("\njump terms of {{0..5}} up to b: taus = {:?}",
        j.gaps.iter().map(|x| x.tau).collect::<Vec<_>>());
    Ok(())
}
