//! A seeded sweep: random nested scales and smooth integrands, every
//! conversion formula checked against the independent Riemann-sum oracle.
//! The CLI equivalent is `deltascale compare --corpus --seed 7 --cases 200`.
//!
//! ```bash
//! cargo run --release --example corpus_sweep
//! ```

use deltascale::corpus;

fn main() -> Result<(), deltascale::Error> {
    let cases = corpus::generate(7, 25);
    let mut max_err = 0.0f64;
    let mut worst_case = 0;
    println!("{:>4} {:>20} {:>14} {:>12}", "case", "oracle value", "by_parts err", "super err");
    for case in &cases {
        let rows = corpus::run_case(case)?;
        let errs: Vec<f64> = rows.iter().map(|r| r.abs_err).collect();
        println!(
            "{:>4} {:>20.12} {:>14.3e} {:>12.3e}",
            case.id, rows[0].reference, errs[0], errs[1]
        );
        for row in &rows {
            if row.abs_err > max_err {
                max_err = row.abs_err;
                worst_case = row.case_id;
            }
            assert!(row.abs_err <= row.allowed, "envelope violated on case {}", row.case_id);
        }
    }
    println!("\nmax |conversion - oracle| = {max_err:.3e} (case {worst_case}); all within envelope");
    Ok(())
}
