//! Property tests for the structural invariants: canonical forms, jump
//! operator consistency, gap measure accounting, envelope ordering, greedy
//! partitions, and the expression round-trip.

use deltascale::*;
use proptest::prelude::*;

fn piece_strategy() -> impl Strategy<Value = Piece> {
    prop_oneof![
        (-4.0..3.5f64, 0.02..1.2f64).prop_map(|(lo, len)| Piece::interval(lo, lo + len)),
        proptest::collection::vec(-4.0..4.0f64, 1..8).prop_map(Piece::points),
        (0.3..0.7f64, 0.2..1.0f64, -4.0..3.0f64)
            .prop_map(|(q, c, offset)| Piece::geometric_at(q, c, offset)),
        (0.2..1.0f64, -4.0..3.0f64).prop_map(|(c, offset)| Piece::harmonic_at(c, offset)),
    ]
}

fn scale_strategy() -> impl Strategy<Value = TimeScale> {
    proptest::collection::vec(piece_strategy(), 1..6)
        .prop_filter_map("canonicalizable", |pieces| TimeScale::new(pieces).ok())
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (-8.0..8.0f64).prop_map(Expr::Lit),
    ];
    leaf.prop_recursive(4, 24, 6, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), 0u32..4)
                .prop_map(|(a, n)| Expr::Pow(Box::new(a), Box::new(Expr::Lit(f64::from(n))))),
            // the parser folds negated literals, so canonical trees never
            // contain Neg(Lit(..))
            inner.clone().prop_map(|a| match a {
                Expr::Lit(x) => Expr::Lit(-x),
                e => Expr::Neg(Box::new(e)),
            }),
            inner.clone().prop_map(|a| Expr::Call(expr::Func::Sin, Box::new(a))),
            inner.clone().prop_map(|a| Expr::Call(expr::Func::Cos, Box::new(a))),
            inner.clone().prop_map(|a| Expr::Call(expr::Func::Floor, Box::new(a))),
            inner.prop_map(|a| Expr::Call(expr::Func::Abs, Box::new(a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Canonicalization is idempotent and produces sorted, span-disjoint
    /// pieces.
    #[test]
    fn canonicalization_idempotent(scale in scale_strategy()) {
        let again = TimeScale::new(scale.pieces().to_vec()).expect("canonical input stays valid");
        prop_assert_eq!(scale.pieces(), again.pieces());
        for w in scale.pieces().windows(2) {
            prop_assert!(w[0].span().1 <= w[1].span().0 + 1e-9);
        }
    }

    /// σ lands on a member with nothing in between; ρ inverts it across
    /// scattered gaps.
    #[test]
    fn sigma_rho_consistency(scale in scale_strategy()) {
        let (a, b) = (scale.min(), scale.max());
        for m in scale.sample_members(a, b, 40) {
            if m >= b - 1e-12 {
                continue;
            }
            let s = scale.sigma(m).unwrap();
            prop_assert!(s >= m);
            prop_assert!(scale.is_member(s));
            if s - m > 1e-9 {
                // the gap interior misses the scale, and ρ steps back
                let mid = 0.5 * (m + s);
                prop_assert!(!scale.is_member(mid), "member {mid} inside gap ({m}, {s})");
                let back = scale.rho(s).unwrap();
                prop_assert!((back - m).abs() <= 1e-12 * m.abs().max(1.0));
            }
        }
    }

    /// Gap lengths plus the dense measure tile the window [a, ρ(b)) exactly.
    #[test]
    fn gap_measure_identity(scale in scale_strategy()) {
        let (a, b) = (scale.min(), scale.max());
        let rb = scale.rho(b).unwrap();
        prop_assume!(rb > a + 1e-9);
        let gaps = scale.gap_set(a, b).unwrap();
        let mut dense = 0.0;
        for p in scale.pieces() {
            if let Piece::Interval { lo, hi } = p {
                let len = hi.min(rb) - lo.max(a);
                if len > 0.0 {
                    dense += len;
                }
            }
        }
        let total = gaps.total_length() + dense;
        prop_assert!(
            (total - (rb - a)).abs() <= 1e-12 * (rb - a).max(1.0),
            "gaps {} + dense {} != {}", gaps.total_length(), dense, rb - a
        );
    }

    /// The jump envelope of a superscale never exceeds the subscale's.
    #[test]
    fn subset_reverses_envelopes(seed in 0u64..500) {
        let case = &corpus::generate(seed, 1)[0];
        let (a, b) = (case.a, case.b);
        prop_assume!(case.superscale.is_member(a) && case.superscale.is_member(b));
        let rb_sup = case.superscale.rho(b).unwrap();
        prop_assume!(rb_sup > a + 1e-9);
        for i in 0..=200 {
            let t = a + (b - a) * f64::from(i) / 200.0;
            let s_sub = case.scale.jump_envelope(a, b, t).unwrap();
            let s_sup = case.superscale.jump_envelope(a, b, t).unwrap();
            prop_assert!(
                s_sup <= s_sub + 1e-12,
                "envelope order violated at {t}: superscale {s_sup} > subscale {s_sub}"
            );
        }
    }

    /// Greedy partitions satisfy the delta-partition invariants, and every
    /// gap at least as wide as the gauge forces its left end into the
    /// partition.
    #[test]
    fn greedy_partition_invariants(scale in scale_strategy(), delta in 0.05..1.0f64) {
        let (a, b) = (scale.min(), scale.max());
        let p = build_partition(&scale, a, b, delta).unwrap();
        p.validate(&scale).unwrap();
        prop_assert_eq!(p.points()[0], a);
        prop_assert_eq!(*p.points().last().unwrap(), b);
        let jumps = scale.jump_terms(a, b).unwrap();
        for gap in jumps.gaps.iter().filter(|g| g.length() >= delta * (1.0 + 1e-9)) {
            let hit = p
                .points()
                .iter()
                .any(|&t| (t - gap.tau).abs() <= 1e-12 * gap.tau.abs().max(1.0));
            prop_assert!(hit, "gap start {} (length {}) missing", gap.tau, gap.length());
        }
    }

    /// Printing then parsing reproduces the tree.
    #[test]
    fn expr_print_parse_roundtrip(e in expr_strategy()) {
        let printed = e.to_string();
        let reparsed = parse_expr(&printed);
        prop_assert!(reparsed.is_ok(), "print produced unparsable `{}`", printed);
        prop_assert_eq!(e, reparsed.unwrap(), "`{}` does not round-trip", printed);
    }

    /// The scale-spec printer round-trips through the reader.
    #[test]
    fn scale_spec_roundtrip(scale in scale_strategy()) {
        let printed = scale.to_spec_string();
        let reparsed = TimeScale::parse(&printed).expect("canonical spec parses");
        prop_assert_eq!(scale.pieces(), reparsed.pieces(), "`{}`", printed);
    }
}
