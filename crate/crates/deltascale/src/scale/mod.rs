//! Exact, finite descriptions of time scales (closed subsets of ℝ) and the
//! point-set machinery of delta-calculus: forward/backward jump operators,
//! graininess, point classification, gap sets, and the jump envelope.
//!
//! All queries are computed per piece with closed-form index arithmetic; no
//! sampling or root-finding is involved, so answers are exact up to the f64
//! representation and the membership tolerance of [`crate::num::REL_TOL`].

mod canon;
mod piece;

pub use piece::{Piece, StepWithin};

use crate::error::{Error, Result};
use crate::num::{strictly_less, tol_at};
use serde::Serialize;

/// Cluster gap enumeration stops once the untracked gap length drops below
/// this bound (geometric clusters reach it quickly) ...
pub const EPS_TAIL: f64 = 1e-10;
/// ... or once this many gaps were produced (harmonic clusters shrink too
/// slowly to ever meet `EPS_TAIL`). The remainder is reported as a residual
/// region so integrators can bound the tail error.
pub const MAX_CLUSTER_GAPS: usize = 200_000;

/// Dense/scattered classification on one side of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Dense,
    Scattered,
}

/// Two-sided classification of a scale point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointClass {
    pub right: Side,
    pub left: Side,
}

/// One right-scattered point with its forward jump: the half-open real
/// interval `[tau, sigma_tau)` missing from the scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapInterval {
    pub tau: f64,
    pub sigma_tau: f64,
}

impl GapInterval {
    pub fn length(&self) -> f64 {
        self.sigma_tau - self.tau
    }
}

/// Enumerated gaps of a window, plus the exact total length of cluster gaps
/// beyond the truncation point and the open regions they tile.
#[derive(Debug, Clone, Default)]
pub struct GapSet {
    pub gaps: Vec<GapInterval>,
    pub truncation_residual: f64,
    pub residual_regions: Vec<(f64, f64)>,
}

impl GapSet {
    pub fn total_length(&self) -> f64 {
        let mut sum = crate::num::KahanSum::new();
        for g in &self.gaps {
            sum.add(g.length());
        }
        sum.add(self.truncation_residual);
        sum.value()
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().map(GapInterval::length).fold(0.0, f64::max)
    }
}

/// Outcome of a subset check between two scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsetEvidence {
    Subset,
    NotSubset { witness: f64 },
}

impl SubsetEvidence {
    pub fn is_subset(&self) -> bool {
        matches!(self, SubsetEvidence::Subset)
    }
}

/// A time scale: a canonical, sorted, span-disjoint union of [`Piece`]s with
/// at least three elements. Immutable after construction; all queries are
/// pure.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    pieces: Vec<Piece>,
}

impl TimeScale {
    /// Canonicalize and validate a list of pieces.
    pub fn new(pieces: Vec<Piece>) -> Result<TimeScale> {
        let pieces = canon::canonicalize(pieces)?;
        let count: usize = pieces.iter().map(|p| p.cardinality(3)).sum();
        if count < 3 {
            return Err(Error::InvalidScale(
                "a time scale needs at least three distinct points".into(),
            ));
        }
        debug_assert!(
            pieces.windows(2).all(|w| w[0].span().1 <= w[1].span().0 + tol_at(w[1].span().0)),
            "canonical pieces must be sorted with disjoint spans: {pieces:?}"
        );
        Ok(TimeScale { pieces })
    }

    /// Parse the scale-spec text format, e.g.
    /// `union(interval(0,1), points(2, 3.5), geometric(q=0.5, c=1))`.
    pub fn parse(text: &str) -> Result<TimeScale> {
        crate::expr::scale_text::parse_scale(text)
    }

    /// Canonical scale-spec string; `parse` round-trips it.
    pub fn to_spec_string(&self) -> String {
        crate::expr::scale_text::print_scale(self)
    }

    /// The window `[a, b]` of the real line as a scale.
    pub fn real_window(a: f64, b: f64) -> Result<TimeScale> {
        TimeScale::new(vec![Piece::interval(a, b)])
    }

    /// The integers `{a, a+1, …, b}` as a scale.
    pub fn integer_window(a: i64, b: i64) -> Result<TimeScale> {
        TimeScale::new(vec![Piece::points((a..=b).map(|k| k as f64).collect())])
    }

    pub fn from_points(points: &[f64]) -> Result<TimeScale> {
        TimeScale::new(vec![Piece::points(points.to_vec())])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn min(&self) -> f64 {
        self.pieces[0].span().0
    }

    pub fn max(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].span().1
    }

    pub fn is_member(&self, t: f64) -> bool {
        self.member(t).is_some()
    }

    /// Snap `t` to the exact member it denotes, if any.
    pub fn member(&self, t: f64) -> Option<f64> {
        self.locate_member(t).map(|(_, m)| m)
    }

    pub(crate) fn locate_member(&self, t: f64) -> Option<(usize, f64)> {
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = p.span();
            if t < lo - tol_at(t) {
                return None;
            }
            if t <= hi + tol_at(t) {
                if let Some(m) = p.member_near(t) {
                    return Some((i, m));
                }
                // inside a cluster span but between members: later pieces
                // cannot contain t either (spans are disjoint)
                return None;
            }
        }
        None
    }

    /// Forward jump operator: `min{s ∈ T : s > t}` for right-scattered `t`,
    /// `t` itself when right-dense.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let (i, m) = self
            .locate_member(t)
            .ok_or(Error::QueryOutsideScale { t })?;
        if m >= self.max() - tol_at(m) {
            return Err(Error::UnboundedQuery { t });
        }
        Ok(match self.pieces[i].step_up(m) {
            StepWithin::Dense => m,
            StepWithin::Next(v) => v,
            StepWithin::Edge => self.pieces[i + 1]
                .ceil_element_above(m)
                .unwrap_or_else(|| self.pieces[i + 1].span().0),
        })
    }

    /// Backward jump operator: `max{s ∈ T : s < t}` for left-scattered `t`,
    /// clamped to `t` when left-dense (and at the scale minimum).
    pub fn rho(&self, t: f64) -> Result<f64> {
        let (i, m) = self
            .locate_member(t)
            .ok_or(Error::QueryOutsideScale { t })?;
        Ok(match self.pieces[i].step_down(m) {
            StepWithin::Dense => m,
            StepWithin::Next(v) => v,
            StepWithin::Edge => {
                if i == 0 {
                    m
                } else {
                    self.pieces[i - 1].floor_element(m).unwrap_or(m)
                }
            }
        })
    }

    /// Graininess `σ(t) − t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        let m = self.member(t).ok_or(Error::QueryOutsideScale { t })?;
        Ok(self.sigma(m)? - m)
    }

    /// Dense/scattered classification on both sides.
    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let m = self.member(t).ok_or(Error::QueryOutsideScale { t })?;
        let right = if self.sigma(m)? > m + tol_at(m) {
            Side::Scattered
        } else {
            Side::Dense
        };
        let left = if self.rho(m)? < m - tol_at(m) {
            Side::Scattered
        } else {
            Side::Dense
        };
        Ok(PointClass { right, left })
    }

    /// `inf{s ∈ T : s > t}` for an arbitrary real `t < max(T)`; equals `t`
    /// itself exactly when the scale is dense immediately to the right.
    pub fn successor_infimum(&self, t: f64) -> Option<f64> {
        if let Some((i, m)) = self.locate_member(t) {
            return match self.pieces[i].step_up(m) {
                StepWithin::Dense => Some(m),
                StepWithin::Next(v) => Some(v),
                StepWithin::Edge => self
                    .pieces
                    .get(i + 1)
                    .and_then(|p| p.ceil_element_above(m).or(Some(p.span().0))),
            };
        }
        for p in &self.pieces {
            if let Some(v) = p.ceil_element_above(t) {
                return Some(v);
            }
        }
        None
    }

    /// `sup{s ∈ T : s ≤ x}`.
    pub fn floor_element(&self, x: f64) -> Option<f64> {
        for p in self.pieces.iter().rev() {
            if let Some(v) = p.floor_element(x) {
                return Some(v);
            }
        }
        None
    }

    fn require_member(&self, t: f64) -> Result<f64> {
        self.member(t).ok_or(Error::QueryOutsideScale { t })
    }

    /// The gap set of the window: ordered disjoint intervals `[τ, σ(τ))`
    /// over right-scattered `τ ∈ [a, ρ(b))`, truncated near cluster
    /// accumulation points with the residual reported exactly.
    pub fn gap_set(&self, a: f64, b: f64) -> Result<GapSet> {
        let a = self.require_member(a)?;
        let b = self.require_member(b)?;
        let rb = self.rho(b)?;
        if !strictly_less(a, rb) {
            return Err(Error::DegenerateWindow { a, b });
        }
        Ok(self.enumerate_jumps(a, rb))
    }

    /// Jump terms for integral conversion: right-scattered `τ ∈ [a, b)`.
    /// Differs from [`gap_set`](Self::gap_set) only in the upper bound,
    /// which here includes `ρ(b)` itself when `b` is left-scattered.
    pub fn jump_terms(&self, a: f64, b: f64) -> Result<GapSet> {
        let a = self.require_member(a)?;
        let b = self.require_member(b)?;
        if !strictly_less(a, b) {
            return Err(Error::DegenerateWindow { a, b });
        }
        Ok(self.enumerate_jumps(a, b))
    }

    fn enumerate_jumps(&self, a: f64, upper: f64) -> GapSet {
        let mut out = GapSet::default();
        for (i, p) in self.pieces.iter().enumerate() {
            let (plo, phi) = p.span();
            if !strictly_less(plo, upper) {
                break;
            }
            if phi >= a - tol_at(a) {
                match p {
                    Piece::Interval { .. } => {}
                    Piece::Points(v) => {
                        for w in v.windows(2) {
                            if w[0] >= a - tol_at(w[0]) && strictly_less(w[0], upper) {
                                out.gaps.push(GapInterval { tau: w[0], sigma_tau: w[1] });
                            }
                        }
                    }
                    _ => self.cluster_jumps(p, a, upper, &mut out),
                }
            }
            // gap between this piece and the next
            if let Some(next) = self.pieces.get(i + 1) {
                let nlo = next.span().0;
                if phi >= a - tol_at(phi)
                    && strictly_less(phi, upper)
                    && strictly_less(phi, nlo)
                {
                    out.gaps.push(GapInterval { tau: phi, sigma_tau: nlo });
                }
            }
        }
        out
    }

    fn cluster_jumps(&self, piece: &Piece, a: f64, upper: f64, out: &mut GapSet) {
        let (acc, top) = piece.span();
        let Some(mut m) = piece.floor_element(upper.min(top)) else {
            return;
        };
        // τ must lie strictly below the bound and below the top member
        // (the top member's gap leads out of the piece)
        while m >= upper - tol_at(upper) || m >= top - tol_at(top) {
            match piece.step_down(m) {
                StepWithin::Next(v) => m = v,
                _ => return,
            }
        }
        let lo_end = a.max(acc);
        let mut collected: Vec<GapInterval> = Vec::new();
        loop {
            if m < a - tol_at(a) || m <= acc + tol_at(acc) {
                break;
            }
            let sigma_tau = match piece.step_up(m) {
                StepWithin::Next(v) => v,
                _ => break,
            };
            collected.push(GapInterval { tau: m, sigma_tau });
            // gaps not yet enumerated tile (lo_end, m)
            let remaining = m - lo_end;
            if remaining <= EPS_TAIL || collected.len() >= MAX_CLUSTER_GAPS {
                if remaining > tol_at(lo_end) {
                    out.residual_regions.push((lo_end, m));
                    out.truncation_residual += remaining;
                }
                break;
            }
            m = match piece.step_down(m) {
                StepWithin::Next(v) => v,
                _ => break,
            };
        }
        out.gaps.extend(collected.into_iter().rev());
    }

    /// The jump envelope of the window: `inf{s ∈ [a,b]_T : s > t}` on
    /// `[a, ρ(b))` and `b` on `[ρ(b), b]`. Defined for every real `t` in
    /// `[a, b]`, member or not; extends `σ` off the scale.
    pub fn jump_envelope(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        let a = self.require_member(a)?;
        let b = self.require_member(b)?;
        let rb = self.rho(b)?;
        if !strictly_less(a, rb) {
            return Err(Error::DegenerateWindow { a, b });
        }
        if t < a - tol_at(t) || t > b + tol_at(t) {
            return Err(Error::QueryOutsideWindow { t, a, b });
        }
        if !strictly_less(t, rb) {
            return Ok(b);
        }
        // t < ρ(b) ≤ max(T), so a successor exists
        Ok(self.successor_infimum(t).unwrap_or(b).min(b))
    }

    /// Scattered members, interval endpoints, and leading cluster members
    /// inside `[a, b]`, for diagnostics and sampling-based checks.
    pub fn sample_members(&self, a: f64, b: f64, cap: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let (lo, hi) = p.span();
            if hi < a - tol_at(a) || lo > b + tol_at(b) {
                continue;
            }
            match p {
                Piece::Interval { lo, hi } => {
                    out.push(lo.max(a));
                    out.push(hi.min(b));
                }
                Piece::Points(v) => out.extend(
                    v.iter()
                        .copied()
                        .filter(|&x| x >= a - tol_at(x) && x <= b + tol_at(x)),
                ),
                _ => {
                    if lo >= a - tol_at(lo) {
                        out.push(lo);
                    }
                    let mut m = match p.floor_element(b) {
                        Some(m) => m,
                        None => continue,
                    };
                    let mut taken = 0usize;
                    while m > lo + tol_at(lo) && m >= a - tol_at(a) && taken < cap / 4 + 2 {
                        out.push(m);
                        taken += 1;
                        match p.step_down(m) {
                            StepWithin::Next(v) => m = v,
                            _ => break,
                        }
                    }
                }
            }
            if out.len() >= cap {
                break;
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out.truncate(cap);
        out
    }
}

/// Verify `sub ⊆ sup`, returning either confirmation or a witness point of
/// `sub` that is missing from `sup`.
pub fn restrict(sup: &TimeScale, sub: &TimeScale) -> SubsetEvidence {
    for piece in sub.pieces() {
        let ev = match piece {
            Piece::Interval { lo, hi } => interval_contained(sup, *lo, *hi),
            Piece::Points(v) => points_contained(sup, v),
            _ => cluster_contained(sup, piece),
        };
        if !ev.is_subset() {
            return ev;
        }
    }
    SubsetEvidence::Subset
}

fn points_contained(sup: &TimeScale, v: &[f64]) -> SubsetEvidence {
    for &x in v {
        if !sup.is_member(x) {
            return SubsetEvidence::NotSubset { witness: x };
        }
    }
    SubsetEvidence::Subset
}

fn interval_contained(sup: &TimeScale, lo: f64, hi: f64) -> SubsetEvidence {
    let mut cover = lo;
    loop {
        if cover >= hi - tol_at(cover) {
            return SubsetEvidence::Subset;
        }
        let mut advanced = false;
        for p in sup.pieces() {
            if let Piece::Interval { lo: plo, hi: phi } = p {
                if *plo <= cover + tol_at(cover) && *phi > cover + tol_at(cover) {
                    cover = *phi;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            return SubsetEvidence::NotSubset { witness: uncovered_witness(sup, cover, hi) };
        }
    }
}

/// A point of `(cover, hi]` that is not in `sup`, given that no interval of
/// `sup` covers the right neighbourhood of `cover`.
fn uncovered_witness(sup: &TimeScale, cover: f64, hi: f64) -> f64 {
    // first sup structure strictly above cover
    let next = sup
        .pieces()
        .iter()
        .filter_map(|p| p.ceil_element_above(cover))
        .fold(f64::INFINITY, f64::min);
    if next > cover + tol_at(cover) {
        return cover + (next.min(hi) - cover) / 2.0;
    }
    // sup accumulates at cover: pick a point between two adjacent cluster
    // members just above it
    for p in sup.pieces() {
        if p.is_cluster() && p.accumulation().map(|o| (o - cover).abs() <= tol_at(cover)) == Some(true)
        {
            if let Some(m1) = p.ceil_element_above(cover + tol_at(cover) * 2.0) {
                if let StepWithin::Next(m0) = p.step_down(m1) {
                    return (m1 + m0) / 2.0;
                }
                return (cover + m1) / 2.0;
            }
        }
    }
    cover + (hi - cover) / 2.0
}

fn cluster_contained(sup: &TimeScale, piece: &Piece) -> SubsetEvidence {
    let (acc, top) = piece.span();
    if !sup.is_member(acc) {
        return SubsetEvidence::NotSubset { witness: acc };
    }
    // an interval of sup covering the accumulation point absorbs the tail
    let covering = sup.pieces().iter().find_map(|p| match p {
        Piece::Interval { lo, hi } if *lo <= acc + tol_at(acc) && *hi > acc + tol_at(acc) => {
            Some(*hi)
        }
        _ => None,
    });
    if let Some(cover_hi) = covering {
        let mut m = top;
        let mut checked = 0usize;
        while m > cover_hi + tol_at(m) && checked < MAX_CLUSTER_GAPS {
            if !sup.is_member(m) {
                return SubsetEvidence::NotSubset { witness: m };
            }
            checked += 1;
            match piece.step_down(m) {
                StepWithin::Next(v) => m = v,
                _ => break,
            }
        }
        return SubsetEvidence::Subset;
    }
    // a sup cluster sharing the accumulation point: compare member prefixes
    let shared_cluster = sup
        .pieces()
        .iter()
        .any(|p| p.is_cluster() && p.accumulation().map(|o| (o - acc).abs() <= tol_at(acc)) == Some(true));
    if shared_cluster {
        let mut m = top;
        for _ in 0..64 {
            if !sup.is_member(m) {
                return SubsetEvidence::NotSubset { witness: m };
            }
            match piece.step_down(m) {
                StepWithin::Next(v) if v > acc + tol_at(acc) => m = v,
                _ => return SubsetEvidence::Subset,
            }
        }
        return SubsetEvidence::Subset;
    }
    // sup has no structure accumulating at acc: some deep member is missing
    let next = sup
        .pieces()
        .iter()
        .filter_map(|p| p.ceil_element_above(acc + tol_at(acc) * 2.0))
        .fold(f64::INFINITY, f64::min);
    let mut m = top;
    loop {
        if m < next - tol_at(m) {
            return SubsetEvidence::NotSubset { witness: m };
        }
        match piece.step_down(m) {
            StepWithin::Next(v) if v > acc + tol_at(acc) => m = v,
            _ => break,
        }
    }
    // every member above acc sits at or above `next`; fall back to a direct
    // membership sweep
    let mut m = top;
    for _ in 0..MAX_CLUSTER_GAPS {
        if !sup.is_member(m) {
            return SubsetEvidence::NotSubset { witness: m };
        }
        match piece.step_down(m) {
            StepWithin::Next(v) if v > acc + tol_at(acc) => m = v,
            _ => break,
        }
    }
    SubsetEvidence::Subset
}
