//! # deltascale
//!
//! Delta-calculus on time scales: exact jump operators, delta-partitions,
//! and Riemann delta-integrals computed two independent ways — literal
//! partition sums, and conversion formulas that trade scale jumps for
//! classical quadrature — with machinery to verify that both paths agree.
//!
//! A *time scale* is a closed subset of the reals. This crate represents
//! one as a finite union of pieces (intervals, point sets, geometric or
//! harmonic accumulation clusters), so queries like the forward jump
//! `σ(t)`, the graininess `μ(t)`, gap sets, and the jump envelope are
//! answered in closed form.
//!
//! ## Quick start
//!
//! ```
//! use deltascale::{TimeScale, parse_expr, riemann_delta_integral, convert_via_real};
//!
//! // T = {0, 1, ..., 5};  ∫₀⁵ s² Δs = 0² + 1² + ... + 4² = 30
//! let scale = TimeScale::parse("points(0,1,2,3,4,5)")?;
//! let f = parse_expr("s^2")?;
//! let direct = riemann_delta_integral(&scale, &f, 0.0, 5.0, 1e-9)?;
//! let converted = convert_via_real(&scale, &f, 0.0, 5.0, 1e-9)?;
//! assert_eq!(direct.value, 30.0);
//! assert!((converted.value - direct.value).abs() < 1e-9);
//! # Ok::<(), deltascale::Error>(())
//! ```
//!
//! ## Module map
//!
//! - [`scale`] — time scales, `σ`/`ρ`/`μ`, point classification, gap sets,
//!   the jump envelope, subset checks
//! - [`partition`] — greedy delta-partitions and the partition function
//! - [`expr`] — integrand parsing, dual-number evaluation, break points
//! - [`calculus`] — the delta-Riemann oracle integrator, classical
//!   quadrature, delta-derivatives, Abel summation
//! - [`conversion`] — integration by parts across scales, real-line and
//!   superscale conversion, monotone comparison, chain convergence
//! - [`corpus`] — seeded random cases for oracle-vs-conversion sweeps
//! - [`cli`] — the batch front-end behind the `deltascale` binary
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example jump_operators
//! cargo run --example gap_sets
//! cargo run --example partitions
//! cargo run --example riemann_oracle
//! cargo run --example integration_by_parts
//! cargo run --example floor_sum
//! cargo run --example superscale_conversion
//! cargo run --example monotone_comparison
//! cargo run --example chain_convergence
//! cargo run --example expressions
//! cargo run --example corpus_sweep
//! ```

pub mod calculus;
pub mod cli;
pub mod conversion;
pub mod corpus;
mod error;
pub mod expr;
mod num;
pub mod partition;
mod quad;
pub mod scale;

pub use calculus::{
    abel_sum, classical_integral, delta_derivative, riemann_delta_integral, IntegralReport, Method,
};
pub use conversion::{
    by_parts_cross_scale, chain_convergence, convert_via_real, convert_via_superscale,
    monotone_compare, ChainRow, MonotoneComparison,
};
pub use error::{Error, Result};
pub use expr::{parse as parse_expr, Expr, ValDer};
pub use partition::{build_partition, safe_delta0, CellKind, DeltaPartition};
pub use scale::{restrict, GapInterval, GapSet, Piece, PointClass, Side, SubsetEvidence, TimeScale};
