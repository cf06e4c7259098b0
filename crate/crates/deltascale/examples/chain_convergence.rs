//! An ascending chain of scales whose union is a harmonic cluster: the
//! delta-integrals along the chain converge to the union-scale integral.
//!
//! `Tₙ = {-1, 0} ∪ {1/k : k ≤ n} ∪ [1, 3]`, integrated over `[0, 2]`.
//!
//! ```bash
//! cargo run --example chain_convergence
//! ```

use deltascale::{chain_convergence, parse_expr, Piece, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let union_scale = TimeScale::new(vec![
        Piece::points(vec![-1.0, 0.0]),
        Piece::harmonic(1.0),
        Piece::interval(1.0, 3.0),
    ])?;
    let chain: Vec<TimeScale> = [1, 2, 4, 8, 16, 32, 64, 128]
        .into_iter()
        .map(|n| {
            let ks: Vec<f64> = (1..=n).map(|k| 1.0 / f64::from(k)).collect();
            TimeScale::new(vec![
                Piece::points(vec![-1.0, 0.0]),
                Piece::points(ks),
                Piece::interval(1.0, 3.0),
            ])
        })
        .collect::<Result<_, _>>()?;

    let f = parse_expr("s")?;
    let rows = chain_convergence(&chain, &union_scale, &f, 0.0, 2.0)?;

    println!("union scale: {}", union_scale.to_spec_string());
    println!("{:>6} {:>18} {:>14}", "n", "value", "gap to limit");
    let sizes = [1, 2, 4, 8, 16, 32, 64, 128];
    for row in &rows {
        println!("{:>6} {:>18.12} {:>14.3e}", sizes[row.n], row.value, row.gap_to_limit);
    }
    println!("\nthe gap shrinks like the tail Σ_(k>n) 1/(k²(k-1)) ≈ 1/(2n²)");
    Ok(())
}
