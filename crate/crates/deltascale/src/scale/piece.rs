//! Building blocks of a time scale.
//!
//! A [`Piece`] is one closed elementary subset of the reals. A scale is a
//! finite, canonically ordered union of pieces. Cluster pieces carry their
//! accumulation point, so scales like `{0} ∪ {c·qⁿ}` are represented exactly
//! rather than by truncated point lists.

use crate::num::{approx_eq, tol_at};

/// One elementary closed subset of ℝ.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// Closed interval `[lo, hi]` with `lo < hi`.
    Interval { lo: f64, hi: f64 },
    /// Finite sorted set of isolated points.
    Points(Vec<f64>),
    /// `{offset} ∪ {offset + c·qⁿ : n ≥ 0}` with `q ∈ (0,1)`, `c > 0`.
    /// Accumulates at `offset` from above; largest member is `offset + c`.
    Geometric { q: f64, c: f64, offset: f64 },
    /// `{offset} ∪ {offset + c/n : n ≥ first}` with `c > 0`, `first ≥ 1`.
    /// Accumulates at `offset`; largest member is `offset + c/first`.
    Harmonic { c: f64, offset: f64, first: u64 },
}

/// Successor of a member inside its own piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepWithin {
    /// The piece continues immediately to the queried side (dense direction).
    Dense,
    /// The neighbouring member inside the piece.
    Next(f64),
    /// The member is the last one on the queried side of the piece.
    Edge,
}

impl Piece {
    pub fn interval(lo: f64, hi: f64) -> Piece {
        Piece::Interval { lo, hi }
    }

    pub fn points(mut values: Vec<f64>) -> Piece {
        values.sort_by(f64::total_cmp);
        Piece::Points(values)
    }

    pub fn geometric(q: f64, c: f64) -> Piece {
        Piece::Geometric { q, c, offset: 0.0 }
    }

    pub fn geometric_at(q: f64, c: f64, offset: f64) -> Piece {
        Piece::Geometric { q, c, offset }
    }

    pub fn harmonic(c: f64) -> Piece {
        Piece::Harmonic { c, offset: 0.0, first: 1 }
    }

    pub fn harmonic_at(c: f64, offset: f64) -> Piece {
        Piece::Harmonic { c, offset, first: 1 }
    }

    /// Smallest and largest element of the piece.
    pub fn span(&self) -> (f64, f64) {
        match self {
            Piece::Interval { lo, hi } => (*lo, *hi),
            Piece::Points(v) => (v[0], v[v.len() - 1]),
            Piece::Geometric { c, offset, .. } => (*offset, offset + c),
            Piece::Harmonic { c, offset, first } => (*offset, offset + c / *first as f64),
        }
    }

    pub fn is_cluster(&self) -> bool {
        matches!(self, Piece::Geometric { .. } | Piece::Harmonic { .. })
    }

    /// Accumulation point of a cluster piece.
    pub fn accumulation(&self) -> Option<f64> {
        match self {
            Piece::Geometric { offset, .. } | Piece::Harmonic { offset, .. } => Some(*offset),
            _ => None,
        }
    }

    /// Number of elements, saturating at `cap`.
    pub fn cardinality(&self, cap: usize) -> usize {
        match self {
            Piece::Interval { .. } | Piece::Geometric { .. } | Piece::Harmonic { .. } => cap,
            Piece::Points(v) => v.len().min(cap),
        }
    }

    /// Exact member nearest to `t` within the membership tolerance.
    pub fn member_near(&self, t: f64) -> Option<f64> {
        let tol = tol_at(t);
        match self {
            Piece::Interval { lo, hi } => {
                if t >= lo - tol && t <= hi + tol {
                    Some(t.clamp(*lo, *hi))
                } else {
                    None
                }
            }
            Piece::Points(v) => {
                let i = v.partition_point(|&p| p < t);
                for j in [i.wrapping_sub(1), i] {
                    if let Some(&p) = v.get(j) {
                        if (p - t).abs() <= tol {
                            return Some(p);
                        }
                    }
                }
                None
            }
            Piece::Geometric { q, c, offset } => {
                if (t - offset).abs() <= tol {
                    return Some(*offset);
                }
                let x = t - offset;
                if x < 0.0 || x > c + tol {
                    return None;
                }
                let guess = (x / c).ln() / q.ln();
                let base = guess.round().max(0.0) as i64;
                for n in base.saturating_sub(1)..=base + 1 {
                    if n < 0 {
                        continue;
                    }
                    let m = offset + c * q.powi(n.min(i64::from(i32::MAX)) as i32);
                    if (m - t).abs() <= tol {
                        return Some(m);
                    }
                }
                None
            }
            Piece::Harmonic { c, offset, first } => {
                if (t - offset).abs() <= tol {
                    return Some(*offset);
                }
                let x = t - offset;
                if x <= 0.0 || x > c / *first as f64 + tol {
                    return None;
                }
                let base = (c / x).round() as i64;
                for n in base.saturating_sub(1)..=base + 1 {
                    if n < *first as i64 {
                        continue;
                    }
                    let m = offset + c / n as f64;
                    if (m - t).abs() <= tol {
                        return Some(m);
                    }
                }
                None
            }
        }
    }

    /// Step from an exact member `m` toward larger elements of this piece.
    pub fn step_up(&self, m: f64) -> StepWithin {
        match self {
            Piece::Interval { hi, .. } => {
                if m >= hi - tol_at(m) {
                    StepWithin::Edge
                } else {
                    StepWithin::Dense
                }
            }
            Piece::Points(v) => {
                let i = v.partition_point(|&p| p <= m + tol_at(m));
                if i < v.len() {
                    StepWithin::Next(v[i])
                } else {
                    StepWithin::Edge
                }
            }
            Piece::Geometric { q, c, offset } => {
                if (m - offset).abs() <= tol_at(m) {
                    // members accumulate just above the offset
                    return StepWithin::Dense;
                }
                match self.cluster_index(m) {
                    Some(0) | None => StepWithin::Edge,
                    Some(n) => StepWithin::Next(offset + c * q.powi((n - 1) as i32)),
                }
            }
            Piece::Harmonic { c, offset, first } => {
                if (m - offset).abs() <= tol_at(m) {
                    return StepWithin::Dense;
                }
                match self.cluster_index(m) {
                    Some(n) if n > *first => StepWithin::Next(offset + c / (n - 1) as f64),
                    _ => StepWithin::Edge,
                }
            }
        }
    }

    /// Step from an exact member `m` toward smaller elements of this piece.
    pub fn step_down(&self, m: f64) -> StepWithin {
        match self {
            Piece::Interval { lo, .. } => {
                if m <= lo + tol_at(m) {
                    StepWithin::Edge
                } else {
                    StepWithin::Dense
                }
            }
            Piece::Points(v) => {
                let i = v.partition_point(|&p| p < m - tol_at(m));
                if i > 0 {
                    StepWithin::Next(v[i - 1])
                } else {
                    StepWithin::Edge
                }
            }
            Piece::Geometric { q, c, offset } => {
                if (m - offset).abs() <= tol_at(m) {
                    return StepWithin::Edge;
                }
                match self.cluster_index(m) {
                    Some(n) => {
                        let below = c * q.powi((n + 1) as i32);
                        if below <= tol_at(*offset) {
                            StepWithin::Next(*offset)
                        } else {
                            StepWithin::Next(offset + below)
                        }
                    }
                    None => StepWithin::Edge,
                }
            }
            Piece::Harmonic { c, offset, .. } => {
                if (m - offset).abs() <= tol_at(m) {
                    return StepWithin::Edge;
                }
                match self.cluster_index(m) {
                    Some(n) => {
                        let below = c / (n + 1) as f64;
                        if below <= tol_at(*offset) {
                            StepWithin::Next(*offset)
                        } else {
                            StepWithin::Next(offset + below)
                        }
                    }
                    None => StepWithin::Edge,
                }
            }
        }
    }

    /// Index of an exact cluster member (`None` for the accumulation point
    /// or a non-member).
    pub fn cluster_index(&self, m: f64) -> Option<u64> {
        match self {
            Piece::Geometric { q, c, offset } => {
                let x = m - offset;
                if x <= tol_at(m) {
                    return None;
                }
                let base = ((x / c).ln() / q.ln()).round().max(0.0) as u64;
                for n in base.saturating_sub(1)..=base + 1 {
                    if (offset + c * q.powi(n as i32) - m).abs() <= tol_at(m) {
                        return Some(n);
                    }
                }
                None
            }
            Piece::Harmonic { c, offset, first } => {
                let x = m - offset;
                if x <= tol_at(m) {
                    return None;
                }
                let base = (c / x).round().max(1.0) as u64;
                for n in base.saturating_sub(1)..=base + 1 {
                    if n >= *first && (offset + c / n as f64 - m).abs() <= tol_at(m) {
                        return Some(n);
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// Value of the cluster member with the given index.
    pub fn cluster_member(&self, n: u64) -> Option<f64> {
        match self {
            Piece::Geometric { q, c, offset } => Some(offset + c * q.powi(n.min(1 << 20) as i32)),
            Piece::Harmonic { c, offset, first } => {
                if n >= *first {
                    Some(offset + c / n as f64)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Largest element of the piece `<= x` (within tolerance).
    pub fn floor_element(&self, x: f64) -> Option<f64> {
        let tol = tol_at(x);
        let (min, max) = self.span();
        if x < min - tol {
            return None;
        }
        if x >= max - tol {
            return Some(max);
        }
        match self {
            Piece::Interval { lo, hi } => Some(x.clamp(*lo, *hi)),
            Piece::Points(v) => {
                let i = v.partition_point(|&p| p <= x + tol);
                if i > 0 {
                    Some(v[i - 1])
                } else {
                    None
                }
            }
            Piece::Geometric { q, c, offset } => {
                let rel = x - offset;
                if rel <= tol_at(*offset) {
                    return Some(*offset);
                }
                // smallest n with c·qⁿ ≤ rel, scanned around the log estimate
                let base = ((rel / c).ln() / q.ln()).floor().max(0.0) as i64;
                for n in base.saturating_sub(1)..=base + 2 {
                    if n < 0 {
                        continue;
                    }
                    let v = c * q.powi(n as i32);
                    if v <= rel + tol {
                        return Some(if v <= tol_at(*offset) { *offset } else { offset + v });
                    }
                }
                Some(*offset)
            }
            Piece::Harmonic { c, offset, first } => {
                let rel = x - offset;
                if rel <= tol_at(*offset) {
                    return Some(*offset);
                }
                let base = ((c / rel).ceil().max(1.0) as i64).max(*first as i64);
                for n in base.saturating_sub(2)..=base + 1 {
                    if n < *first as i64 {
                        continue;
                    }
                    let v = c / n as f64;
                    if v <= rel + tol {
                        return Some(if v <= tol_at(*offset) { *offset } else { offset + v });
                    }
                }
                Some(*offset)
            }
        }
    }

    /// Smallest element of the piece strictly greater than `x`
    /// (beyond tolerance). For cluster pieces with `x` at or below the
    /// accumulation point this is the offset itself: the infimum of the
    /// members, attained because the offset belongs to the piece.
    pub fn ceil_element_above(&self, x: f64) -> Option<f64> {
        let tol = tol_at(x);
        let (min, max) = self.span();
        if x >= max - tol {
            return None;
        }
        if x < min - tol {
            return Some(min);
        }
        match self {
            Piece::Interval { lo, hi } => Some(x.clamp(*lo, *hi)),
            Piece::Points(v) => {
                let i = v.partition_point(|&p| p <= x + tol);
                v.get(i).copied()
            }
            Piece::Geometric { q, c, offset } => {
                let rel = x - offset;
                if rel.abs() <= tol_at(*offset) {
                    // dense from the right at the accumulation point
                    return Some(*offset);
                }
                // largest n with c·qⁿ > rel
                let base = ((rel / c).ln() / q.ln()).ceil().max(0.0) as i64;
                for n in (base.saturating_sub(2)..=base + 1).rev() {
                    if n < 0 {
                        continue;
                    }
                    let v = c * q.powi(n as i32);
                    if v > rel + tol {
                        return Some(offset + v);
                    }
                }
                Some(offset + c)
            }
            Piece::Harmonic { c, offset, first } => {
                let rel = x - offset;
                if rel.abs() <= tol_at(*offset) {
                    return Some(*offset);
                }
                // largest n with c/n > rel, scanned from above
                let base = (c / rel).ceil().max(1.0) as i64;
                for n in (base.saturating_sub(3)..=base + 1).rev() {
                    if n < *first as i64 {
                        continue;
                    }
                    let v = c / n as f64;
                    if v > rel + tol {
                        return Some(offset + v);
                    }
                }
                None
            }
        }
    }

    /// True if `other` describes the same point set.
    pub fn same_set(&self, other: &Piece) -> bool {
        match (self, other) {
            (Piece::Interval { lo: a, hi: b }, Piece::Interval { lo: c, hi: d }) => {
                approx_eq(*a, *c) && approx_eq(*b, *d)
            }
            (Piece::Points(a), Piece::Points(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| approx_eq(*x, *y))
            }
            (
                Piece::Geometric { q: q1, c: c1, offset: o1 },
                Piece::Geometric { q: q2, c: c2, offset: o2 },
            ) => approx_eq(*q1, *q2) && approx_eq(*c1, *c2) && approx_eq(*o1, *o2),
            (
                Piece::Harmonic { c: c1, offset: o1, first: f1 },
                Piece::Harmonic { c: c2, offset: o2, first: f2 },
            ) => approx_eq(*c1, *c2) && approx_eq(*o1, *o2) && f1 == f2,
            _ => false,
        }
    }
}
