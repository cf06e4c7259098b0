//! Delta-partitions of a scale window `[a, b]_T`.
//!
//! A delta-partition splits the window into cells that are either fine
//! (shorter than the gauge `delta`) or forced jumps across scale gaps wider
//! than the gauge. Construction is a deterministic greedy walk: from `t`,
//! the next point is `σ(t)` when `μ(t) > delta`, otherwise the largest scale
//! element in `(t, t + delta]`.

use crate::error::{Error, Result};
use crate::num::{strictly_less, tol_at};
use crate::scale::{Piece, TimeScale};

/// How a partition cell was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// Cell no longer than the gauge.
    Fine,
    /// Forced jump: the cell is exactly a scale gap wider than the gauge.
    Jump,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Fine => "fine",
            CellKind::Jump => "jump",
        }
    }
}

/// A materialized delta-partition `a = t₁ < t₂ < … < tₙ = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPartition {
    delta: f64,
    points: Vec<f64>,
    kinds: Vec<CellKind>,
}

impl DeltaPartition {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kinds(&self) -> &[CellKind] {
        &self.kinds
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Largest cell length over cells lying inside dense (interval) pieces.
    pub fn dense_mesh(&self, scale: &TimeScale) -> f64 {
        let mut mesh: f64 = 0.0;
        for w in self.points.windows(2) {
            let inside_interval = scale.pieces().iter().any(|p| {
                matches!(p, Piece::Interval { lo, hi } if *lo <= w[0] && w[1] <= *hi)
            });
            if inside_interval {
                mesh = mesh.max(w[1] - w[0]);
            }
        }
        mesh
    }

    /// The partition function: the first partition point strictly after `t`,
    /// with the last cell `[t_{n-1}, b]` mapping to `b`.
    pub fn partition_function(&self, t: f64) -> Result<f64> {
        let (a, b) = (self.a(), self.b());
        if t < a - tol_at(t) || t > b + tol_at(t) {
            return Err(Error::QueryOutsideWindow { t, a, b });
        }
        let n = self.points.len();
        if t >= self.points[n - 2] - tol_at(t) {
            return Ok(b);
        }
        let i = self.points.partition_point(|&p| p <= t + tol_at(t));
        Ok(self.points[i])
    }

    /// Re-run the greedy construction at half the gauge.
    pub fn refine(&self, scale: &TimeScale) -> Result<DeltaPartition> {
        build_partition(scale, self.a(), self.b(), self.delta / 2.0)
    }

    /// Independent invariant check: endpoints, membership, ordering, and the
    /// fine-or-jump condition on every cell.
    pub fn validate(&self, scale: &TimeScale) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.points.len() < 2 {
            return bad("partition needs at least two points".into());
        }
        if self.kinds.len() + 1 != self.points.len() {
            return bad("cell kind count mismatch".into());
        }
        for w in self.points.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                return bad(format!("points not strictly increasing at {lo}"));
            }
            if !scale.is_member(lo) || !scale.is_member(hi) {
                return bad(format!("partition point outside the scale near {lo}"));
            }
            let fine = hi - lo <= self.delta * (1.0 + 1e-9);
            let jump = (scale.sigma(lo)? - hi).abs() <= tol_at(hi);
            if !fine && !jump {
                return bad(format!("cell [{lo}, {hi}] is neither fine nor a forced jump"));
            }
        }
        Ok(())
    }

    /// Debug dump: CSV rows `(index, t_i, cell_kind)`; the first row carries
    /// the window start.
    pub fn to_debug_csv(&self) -> String {
        let mut out = String::from("index,t,cell_kind\n");
        for (i, &t) in self.points.iter().enumerate() {
            let kind = if i == 0 { "start" } else { self.kinds[i - 1].name() };
            out.push_str(&format!("{i},{},{kind}\n", crate::expr::fmt_float(t)));
        }
        out
    }
}

/// The gauge threshold below which Prop-style envelope approximation holds:
/// half the final gap when `b` is left-scattered, 1 otherwise.
pub fn safe_delta0(scale: &TimeScale, a: f64, b: f64) -> Result<f64> {
    let _ = scale.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = scale.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    let rb = scale.rho(b)?;
    if b - rb > tol_at(b) {
        Ok((0.5 * (b - rb)).min(1.0))
    } else {
        Ok(1.0)
    }
}

/// Greedy construction of a delta-partition of `[a, b]_T`.
pub fn build_partition(scale: &TimeScale, a: f64, b: f64, delta: f64) -> Result<DeltaPartition> {
    let mut points = Vec::new();
    let mut kinds = Vec::new();
    walk_cells(scale, a, b, delta, |lo, hi, kind| {
        if points.is_empty() {
            points.push(lo);
        }
        points.push(hi);
        kinds.push(kind);
        Ok(())
    })?;
    Ok(DeltaPartition { delta, points, kinds })
}

/// Stream the greedy delta-partition cells of `[a, b]_T` without
/// materializing them. Interval interiors advance on a uniform grid; all
/// other steps consult the scale directly.
pub fn walk_cells(
    scale: &TimeScale,
    a: f64,
    b: f64,
    delta: f64,
    mut visit: impl FnMut(f64, f64, CellKind) -> Result<()>,
) -> Result<()> {
    let a = scale.member(a).ok_or(Error::QueryOutsideScale { t: a })?;
    let b = scale.member(b).ok_or(Error::QueryOutsideScale { t: b })?;
    if !strictly_less(a, b) {
        return Err(Error::DegenerateWindow { a, b });
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("gauge delta must be positive, got {delta}")));
    }

    let mut t = a;
    while strictly_less(t, b) {
        let (idx, m) = scale
            .locate_member(t)
            .expect("walk stays on scale members");
        t = m;
        if let Piece::Interval { hi, .. } = scale.pieces()[idx] {
            let run = hi.min(b);
            let mut steps = ((run - t) / delta).floor() as u64;
            while steps > 0 && t + steps as f64 * delta > run {
                steps -= 1;
            }
            if steps > 0 {
                let base = t;
                let mut prev = base;
                for j in 1..=steps {
                    let next = base + j as f64 * delta;
                    visit(prev, next, CellKind::Fine)?;
                    prev = next;
                }
                t = prev;
                continue;
            }
        }
        // generic greedy step
        let sig = scale.sigma(t)?;
        if sig - t > delta {
            visit(t, sig, CellKind::Jump)?;
            t = sig;
        } else {
            let next = scale
                .floor_element(t + delta)
                .expect("t is a member, so the floor exists")
                .min(b);
            debug_assert!(next > t);
            visit(t, next, CellKind::Fine)?;
            t = next;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::approx_eq;

    #[test]
    fn uniform_partition_of_unit_interval() {
        let t = TimeScale::real_window(0.0, 1.0).unwrap();
        let p = build_partition(&t, 0.0, 1.0, 0.25).unwrap();
        assert_eq!(p.points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        p.validate(&t).unwrap();
    }

    #[test]
    fn jumps_forced_on_discrete_scale() {
        let t = TimeScale::integer_window(0, 2).unwrap();
        let p = build_partition(&t, 0.0, 2.0, 0.1).unwrap();
        assert_eq!(p.points(), &[0.0, 1.0, 2.0]);
        assert_eq!(p.kinds(), &[CellKind::Jump, CellKind::Jump]);
        // refinement cannot split forced jumps
        let r = p.refine(&t).unwrap();
        assert_eq!(r.points(), p.points());
    }

    #[test]
    fn mixed_scale_partition() {
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![2.0])]).unwrap();
        let p = build_partition(&t, 0.0, 2.0, 0.5).unwrap();
        assert_eq!(p.points(), &[0.0, 0.5, 1.0, 2.0]);
        assert_eq!(p.kinds(), &[CellKind::Fine, CellKind::Fine, CellKind::Jump]);
        p.validate(&t).unwrap();
    }

    #[test]
    fn partition_function_cells() {
        let t = TimeScale::real_window(0.0, 1.0).unwrap();
        let p = build_partition(&t, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(p.partition_function(0.2).unwrap(), 0.5);
        // last-cell rule
        assert_eq!(p.partition_function(0.7).unwrap(), 1.0);
        assert_eq!(p.partition_function(1.0).unwrap(), 1.0);
        assert!(p.partition_function(1.5).is_err());
    }

    #[test]
    fn refining_halves_the_dense_mesh() {
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![1.5, 2.0])]).unwrap();
        let p = build_partition(&t, 0.0, 2.0, 0.4).unwrap();
        let r = p.refine(&t).unwrap();
        assert!(r.dense_mesh(&t) <= p.dense_mesh(&t) / 2.0 + 1e-12);
        r.validate(&t).unwrap();
    }

    #[test]
    fn cluster_tail_covered_by_one_cell() {
        let t = TimeScale::new(vec![Piece::geometric(0.5, 1.0)]).unwrap();
        let p = build_partition(&t, 0.0, 1.0, 0.1).unwrap();
        p.validate(&t).unwrap();
        // first cell spans the accumulation tail: from 0 to the largest
        // member at most delta away
        assert_eq!(p.points()[0], 0.0);
        assert!(approx_eq(p.points()[1], 0.0625));
        // every gap wider than delta appears as its own jump cell
        for w in [0.5, 0.25, 0.125] {
            assert!(p.points().contains(&w), "missing member {w}");
        }
    }

    #[test]
    fn safe_delta0_cases() {
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![2.0])]).unwrap();
        // b = 2 is left-scattered with gap 1
        assert_eq!(safe_delta0(&t, 0.0, 2.0).unwrap(), 0.5);
        // b = 1 is left-dense
        assert_eq!(safe_delta0(&t, 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn csv_dump_shape() {
        let t = TimeScale::integer_window(0, 2).unwrap();
        let p = build_partition(&t, 0.0, 2.0, 0.1).unwrap();
        let csv = p.to_debug_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,t,cell_kind");
        assert_eq!(lines[1], "0,0,start");
        assert_eq!(lines[2], "1,1,jump");
    }

    #[test]
    fn envelope_approximation_below_delta0() {
        // Prop-style bound: below delta0 the partition function tracks the
        // jump envelope within delta
        let t = TimeScale::new(vec![Piece::interval(0.0, 1.0), Piece::points(vec![1.4, 2.0])]).unwrap();
        let d0 = safe_delta0(&t, 0.0, 2.0).unwrap();
        let delta = 0.8 * d0;
        let p = build_partition(&t, 0.0, 2.0, delta).unwrap();
        for i in 0..=1000 {
            let x = 2.0 * (i as f64) / 1000.0 + 1e-9;
            let x = x.min(2.0);
            let s_p = p.partition_function(x).unwrap();
            let s = t.jump_envelope(0.0, 2.0, x).unwrap();
            assert!(
                (s_p - s).abs() < delta,
                "at {x}: partition {s_p} vs envelope {s}, delta {delta}"
            );
        }
    }
}
