//! Greedy delta-partitions: fine cells below the gauge, forced jumps across
//! wide gaps, and the partition function that approximates the jump
//! envelope once the gauge is below the safe threshold.
//!
//! ```bash
//! cargo run --example partitions
//! ```

use deltascale::{build_partition, safe_delta0, TimeScale};

fn main() -> Result<(), deltascale::Error> {
    let scale = TimeScale::parse("union(interval(0,1), points(2))")?;
    let (a, b) = (0.0, 2.0);

    let p = build_partition(&scale, a, b, 0.5)?;
    println!("delta = 0.5:");
    print!("{}", p.to_debug_csv());

    let refined = p.refine(&scale)?;
    println!("\nrefined to delta = {}: {:?}", refined.delta(), refined.points());

    let d0 = safe_delta0(&scale, a, b)?;
    println!("\nsafe delta0 = {d0} (half the final gap, since b is left-scattered)");

    let delta = 0.8 * d0;
    let p = build_partition(&scale, a, b, delta)?;
    println!("partition function vs jump envelope at delta = {delta}:");
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let t = a + (b - a) * f64::from(i) / 20.0;
        let sp = p.partition_function(t)?;
        let s = scale.jump_envelope(a, b, t)?;
        worst = worst.max((sp - s).abs());
        if i % 5 == 0 {
            println!("  t = {t:4}: S_P = {sp:5}, S = {s:5}");
        }
    }
    println!("max |S_P - S| = {worst} < delta = {delta}");
    Ok(())
}
