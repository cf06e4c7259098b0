//! Floating-point comparison helpers shared across the crate.
//!
//! Scale membership and window snapping use a relative tolerance so that
//! decimal inputs typed on the command line land on the exact members they
//! denote.

/// Relative membership tolerance: `t` counts as a member when within
/// `REL_TOL * max(1, |t|)` of an exact one.
pub const REL_TOL: f64 = 1e-12;

#[inline]
pub fn tol_at(t: f64) -> f64 {
    REL_TOL * t.abs().max(1.0)
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tol_at(a.abs().max(b.abs()))
}

/// `a < b` by more than the membership tolerance.
#[inline]
pub fn strictly_less(a: f64, b: f64) -> bool {
    a < b - tol_at(a.abs().max(b.abs()))
}

/// Compensated accumulator for long sums of small cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}
