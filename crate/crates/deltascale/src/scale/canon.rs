//! Canonicalization of piece lists.
//!
//! Construction accepts pieces in any order with arbitrary overlaps and
//! reduces them to the unique sorted, span-disjoint form. Overlaps with a
//! cluster are resolved exactly: the finitely many members above the
//! obstruction become isolated points and the infinite tail survives as a
//! truncated cluster.

use super::piece::Piece;
use crate::error::{Error, Result};
use crate::num::{approx_eq, tol_at};

/// Upper bound on isolated points produced when a cluster is split.
const MAX_SPLIT_POINTS: usize = 4096;

const MAX_PASSES: usize = 10_000;

pub fn canonicalize(raw: Vec<Piece>) -> Result<Vec<Piece>> {
    let mut pieces = Vec::with_capacity(raw.len());
    for p in raw {
        pieces.extend(normalize(p)?);
    }
    if pieces.is_empty() {
        return Err(Error::InvalidScale("scale has no pieces".into()));
    }

    for _ in 0..MAX_PASSES {
        sort_by_span(&mut pieces);
        if !reduce_once(&mut pieces)? {
            merge_adjacent_point_runs(&mut pieces);
            return Ok(pieces);
        }
    }
    Err(Error::InvalidScale("piece reduction did not terminate".into()))
}

fn normalize(p: Piece) -> Result<Vec<Piece>> {
    match p {
        Piece::Interval { lo, hi } => {
            if !lo.is_finite() || !hi.is_finite() || lo > hi + tol_at(lo) {
                return Err(Error::InvalidScale(format!("bad interval [{lo}, {hi}]")));
            }
            if approx_eq(lo, hi) {
                Ok(vec![Piece::Points(vec![lo])])
            } else {
                Ok(vec![Piece::Interval { lo, hi }])
            }
        }
        Piece::Points(mut v) => {
            if v.is_empty() {
                return Err(Error::InvalidScale("empty point list".into()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidScale("non-finite point".into()));
            }
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| approx_eq(*a, *b));
            Ok(vec![Piece::Points(v)])
        }
        Piece::Geometric { q, c, offset } => {
            if !(q > 0.0 && q < 1.0) || !(c > 0.0) || !offset.is_finite() {
                return Err(Error::InvalidScale(format!(
                    "geometric cluster needs q in (0,1) and c > 0; got q={q}, c={c}"
                )));
            }
            Ok(vec![Piece::Geometric { q, c, offset }])
        }
        Piece::Harmonic { c, offset, first } => {
            if !(c > 0.0) || first == 0 || !offset.is_finite() {
                return Err(Error::InvalidScale(format!(
                    "harmonic cluster needs c > 0 and first >= 1; got c={c}, first={first}"
                )));
            }
            Ok(vec![Piece::Harmonic { c, offset, first }])
        }
    }
}

fn sort_by_span(pieces: &mut [Piece]) {
    pieces.sort_by(|a, b| {
        let (al, ah) = a.span();
        let (bl, bh) = b.span();
        al.total_cmp(&bl).then(ah.total_cmp(&bh))
    });
}

fn spans_touch(a: &Piece, b: &Piece) -> bool {
    let (al, ah) = a.span();
    let (bl, bh) = b.span();
    let tol = tol_at(ah.abs().max(bl.abs()));
    bl <= ah + tol && al <= bh + tol
}

/// One reduction step over the sorted list. Returns true if anything changed.
fn reduce_once(pieces: &mut Vec<Piece>) -> Result<bool> {
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if !spans_touch(&pieces[i], &pieces[j]) {
                // sorted by span start: later pieces start even further right
                break;
            }
            if let Some(replacement) = reduce_pair(&pieces[i], &pieces[j])? {
                let b = pieces.remove(j);
                let a = pieces.remove(i);
                drop((a, b));
                pieces.extend(replacement);
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Resolve one overlapping pair into replacement pieces, or `None` if the
/// pair is already disjoint as sets and needs no rewrite.
fn reduce_pair(a: &Piece, b: &Piece) -> Result<Option<Vec<Piece>>> {
    use Piece::*;
    match (a, b) {
        (Interval { lo: al, hi: ah }, Interval { lo: bl, hi: bh }) => Ok(Some(vec![Interval {
            lo: al.min(*bl),
            hi: ah.max(*bh),
        }])),
        (Interval { lo, hi }, Points(v)) | (Points(v), Interval { lo, hi }) => {
            Ok(split_points_around_interval(v, *lo, *hi))
        }
        (Points(x), Points(y)) => {
            let mut v = x.clone();
            v.extend_from_slice(y);
            v.sort_by(f64::total_cmp);
            v.dedup_by(|p, q| approx_eq(*p, *q));
            Ok(Some(vec![Points(v)]))
        }
        (Interval { lo, hi }, cluster) if cluster.is_cluster() => {
            cluster_vs_interval(cluster, *lo, *hi)
        }
        (cluster, Interval { lo, hi }) if cluster.is_cluster() => {
            cluster_vs_interval(cluster, *lo, *hi)
        }
        (Points(v), cluster) if cluster.is_cluster() => cluster_vs_points(cluster, v),
        (cluster, Points(v)) if cluster.is_cluster() => cluster_vs_points(cluster, v),
        (x, y) if x.is_cluster() && y.is_cluster() => cluster_vs_cluster(x, y),
        _ => unreachable!("non-cluster pairs are covered above"),
    }
}

fn split_points_around_interval(v: &[f64], lo: f64, hi: f64) -> Option<Vec<Piece>> {
    let below: Vec<f64> = v.iter().copied().filter(|&x| x < lo - tol_at(x)).collect();
    let above: Vec<f64> = v.iter().copied().filter(|&x| x > hi + tol_at(x)).collect();
    if below.len() + above.len() == v.len() && (below.is_empty() || above.is_empty()) {
        // already disjoint and on one side; keep as-is
        return None;
    }
    let mut out = Vec::new();
    if !below.is_empty() {
        out.push(Piece::Points(below));
    }
    out.push(Piece::Interval { lo, hi });
    if !above.is_empty() {
        out.push(Piece::Points(above));
    }
    Some(out)
}

/// Members of `cluster` strictly above `x`, largest first.
fn head_members_above(cluster: &Piece, x: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = cluster.span().1;
    while cur > x + tol_at(x) {
        out.push(cur);
        if out.len() > MAX_SPLIT_POINTS {
            return Err(Error::InvalidScale(
                "cluster overlap would split into too many isolated points".into(),
            ));
        }
        match cluster.step_down(cur) {
            super::piece::StepWithin::Next(v) => cur = v,
            _ => break,
        }
    }
    Ok(out)
}

/// Truncated copy of `cluster` keeping only members `< x`, if any side of the
/// accumulation point survives.
fn cluster_tail_below(cluster: &Piece, x: f64) -> Option<Piece> {
    let acc = cluster.accumulation().expect("cluster piece");
    if x <= acc + tol_at(acc) {
        return None;
    }
    match cluster {
        Piece::Geometric { q, c, offset } => {
            // smallest n with member < x folds into the coefficient
            let mut n = (((x - offset) / c).ln() / q.ln()).floor().max(0.0) as i64;
            while offset + c * q.powi(n as i32) >= x - tol_at(x) {
                n += 1;
            }
            Some(Piece::Geometric { q: *q, c: c * q.powi(n as i32), offset: *offset })
        }
        Piece::Harmonic { c, offset, first } => {
            let mut n = ((c / (x - offset)).ceil().max(1.0) as u64).max(*first);
            while offset + c / n as f64 >= x - tol_at(x) {
                n += 1;
            }
            Some(Piece::Harmonic { c: *c, offset: *offset, first: n })
        }
        _ => None,
    }
}

fn cluster_vs_interval(cluster: &Piece, lo: f64, hi: f64) -> Result<Option<Vec<Piece>>> {
    let acc = cluster.accumulation().expect("cluster piece");
    if hi <= acc + tol_at(acc) {
        // interval ends at the accumulation point; the sets share at most
        // that one coordinate and both pieces stand
        return Ok(None);
    }
    let head = head_members_above(cluster, hi)?;
    let mut out = Vec::new();
    if lo <= acc + tol_at(acc) {
        // interval covers the accumulation point; only the head survives
        out.push(Piece::Interval { lo: lo.min(acc), hi });
    } else {
        if let Some(tail) = cluster_tail_below(cluster, lo) {
            out.push(tail);
        } else {
            out.push(Piece::Points(vec![acc]));
        }
        out.push(Piece::Interval { lo, hi });
    }
    if !head.is_empty() {
        let mut pts = head;
        pts.reverse();
        out.push(Piece::Points(pts));
    }
    Ok(Some(out))
}

fn cluster_vs_points(cluster: &Piece, v: &[f64]) -> Result<Option<Vec<Piece>>> {
    let (acc, top) = cluster.span();
    let mut below = Vec::new();
    let mut inside = Vec::new();
    let mut above = Vec::new();
    let mut dropped_any = false;
    for &x in v {
        if cluster.member_near(x).is_some() {
            dropped_any = true; // duplicate of a member or the accumulation point
        } else if x < acc - tol_at(x) {
            below.push(x);
        } else if x > top + tol_at(x) {
            above.push(x);
        } else {
            inside.push(x);
        }
    }
    if inside.is_empty() && !dropped_any && (below.is_empty() || above.is_empty()) {
        return Ok(None);
    }
    let mut out = Vec::new();
    if !below.is_empty() {
        out.push(Piece::Points(below));
    }
    if inside.is_empty() {
        out.push(cluster.clone());
    } else {
        // split at the lowest interfering point; the finite head becomes
        // isolated points, the tail survives as a truncated cluster
        let cut = inside.iter().copied().fold(f64::INFINITY, f64::min);
        let mut head = head_members_above(cluster, cut)?;
        if let Some(tail) = cluster_tail_below(cluster, cut) {
            out.push(tail);
        } else {
            out.push(Piece::Points(vec![acc]));
        }
        head.reverse();
        head.extend(inside);
        above.extend(head);
    }
    if !above.is_empty() {
        above.sort_by(f64::total_cmp);
        above.dedup_by(|a, b| approx_eq(*a, *b));
        out.push(Piece::Points(above));
    }
    Ok(Some(out))
}

fn cluster_vs_cluster(a: &Piece, b: &Piece) -> Result<Option<Vec<Piece>>> {
    if a.same_set(b) {
        return Ok(Some(vec![a.clone()]));
    }
    let (acc_a, _) = a.span();
    let (acc_b, _) = b.span();
    if approx_eq(acc_a, acc_b) {
        if cluster_members_contained(a, b) {
            return Ok(Some(vec![b.clone()]));
        }
        if cluster_members_contained(b, a) {
            return Ok(Some(vec![a.clone()]));
        }
        return Err(Error::InvalidScale(
            "two clusters interleave at a shared accumulation point; \
             the union is not representable"
                .into(),
        ));
    }
    // distinct accumulation points: split the lower cluster at the upper
    // accumulation point, then let later passes resolve the finite head
    let (lower, upper_acc) = if acc_a < acc_b { (a, acc_b) } else { (b, acc_a) };
    let other = if acc_a < acc_b { b } else { a };
    let head = head_members_above(lower, upper_acc)?;
    let mut out = Vec::new();
    if let Some(tail) = cluster_tail_below(lower, upper_acc) {
        out.push(tail);
    } else {
        out.push(Piece::Points(vec![lower.accumulation().expect("cluster")]));
    }
    out.push(other.clone());
    if !head.is_empty() {
        let mut pts = head;
        pts.reverse();
        out.push(Piece::Points(pts));
    }
    Ok(Some(out))
}

/// Do the first members of `inner` all belong to `outer`? Checked to the
/// membership tolerance on a fixed prefix; past that depth the generators
/// are indistinguishable at f64 precision.
fn cluster_members_contained(inner: &Piece, outer: &Piece) -> bool {
    let mut cur = inner.span().1;
    for _ in 0..64 {
        if outer.member_near(cur).is_none() {
            return false;
        }
        match inner.step_down(cur) {
            super::piece::StepWithin::Next(v) if v > inner.span().0 + tol_at(v) => cur = v,
            _ => return true,
        }
    }
    true
}

/// Merge point pieces that ended up adjacent in the sorted list.
fn merge_adjacent_point_runs(pieces: &mut Vec<Piece>) {
    let mut i = 0;
    while i + 1 < pieces.len() {
        if let (Piece::Points(_), Piece::Points(_)) = (&pieces[i], &pieces[i + 1]) {
            let Piece::Points(next) = pieces.remove(i + 1) else { unreachable!() };
            let Piece::Points(cur) = &mut pieces[i] else { unreachable!() };
            cur.extend(next);
            cur.sort_by(f64::total_cmp);
            cur.dedup_by(|a, b| approx_eq(*a, *b));
        } else {
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_overlapping_intervals() {
        let out = canonicalize(vec![Piece::interval(0.0, 1.0), Piece::interval(0.5, 2.0)]).unwrap();
        assert_eq!(out, vec![Piece::Interval { lo: 0.0, hi: 2.0 }]);
    }

    #[test]
    fn absorbs_points_into_interval() {
        let out = canonicalize(vec![
            Piece::points(vec![0.5, 3.0, -1.0]),
            Piece::interval(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(
            out,
            vec![
                Piece::Points(vec![-1.0]),
                Piece::Interval { lo: 0.0, hi: 1.0 },
                Piece::Points(vec![3.0]),
            ]
        );
    }

    #[test]
    fn cluster_inside_interval_disappears() {
        let out = canonicalize(vec![Piece::geometric(0.5, 1.0), Piece::interval(-0.5, 2.0)]).unwrap();
        assert_eq!(out, vec![Piece::Interval { lo: -0.5, hi: 2.0 }]);
    }

    #[test]
    fn interval_truncates_cluster_tail_and_head() {
        // interval [0.2, 0.3] cuts {1, 1/2, 1/4, ...}: head {1, 1/2} stays as
        // points, 1/4 is absorbed, tail {1/8, ...} survives as a cluster
        let out = canonicalize(vec![Piece::geometric(0.5, 1.0), Piece::interval(0.2, 0.3)]).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], Piece::Geometric { q: 0.5, c: 0.125, offset: 0.0 });
        assert_eq!(out[1], Piece::Interval { lo: 0.2, hi: 0.3 });
        assert_eq!(out[2], Piece::Points(vec![0.5, 1.0]));
    }

    #[test]
    fn point_between_members_splits_cluster() {
        let out = canonicalize(vec![Piece::geometric(0.5, 1.0), Piece::points(vec![0.3])]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], Piece::Geometric { q: 0.5, c: 0.25, offset: 0.0 });
        assert_eq!(out[1], Piece::Points(vec![0.3, 0.5, 1.0]));
    }

    #[test]
    fn duplicate_member_point_is_dropped() {
        let out = canonicalize(vec![Piece::geometric(0.5, 1.0), Piece::points(vec![0.25])]).unwrap();
        assert_eq!(out, vec![Piece::Geometric { q: 0.5, c: 1.0, offset: 0.0 }]);
    }

    #[test]
    fn interleaved_clusters_rejected() {
        let err = canonicalize(vec![Piece::geometric(0.5, 1.0), Piece::geometric(0.3, 0.9)]);
        assert!(matches!(err, Err(Error::InvalidScale(_))));
    }

    #[test]
    fn nested_geometric_clusters_keep_the_denser() {
        // {4⁻ⁿ} ⊂ {2⁻ⁿ}
        let out = canonicalize(vec![Piece::geometric(0.25, 1.0), Piece::geometric(0.5, 1.0)]).unwrap();
        assert_eq!(out, vec![Piece::Geometric { q: 0.5, c: 1.0, offset: 0.0 }]);
    }

    #[test]
    fn clusters_with_separated_accumulation_points() {
        // harmonic at 2 spans [2,3]; geometric at 0 spans [0,1]; disjoint
        let out = canonicalize(vec![Piece::harmonic_at(1.0, 2.0), Piece::geometric(0.5, 1.0)]).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn degenerate_interval_becomes_point() {
        let out = canonicalize(vec![Piece::interval(2.0, 2.0), Piece::interval(0.0, 1.0)]).unwrap();
        assert_eq!(
            out,
            vec![Piece::Interval { lo: 0.0, hi: 1.0 }, Piece::Points(vec![2.0])]
        );
    }

    #[test]
    fn idempotent_on_canonical_input() {
        let canon = canonicalize(vec![
            Piece::geometric(0.5, 1.0),
            Piece::points(vec![2.0, 3.5]),
            Piece::interval(-2.0, -1.0),
        ])
        .unwrap();
        let again = canonicalize(canon.clone()).unwrap();
        assert_eq!(canon, again);
    }
}
