//! Property tests for sequences, spaces and the embedding.

use linfty_core::spaces::Element;
use linfty_core::{
    apply_functional, cluster_estimates, combine, embed_t1, isometry_defect, net_distance, net_point, norm,
    norming_functional, oscillation_witness, BoundedSeq, SeparableSpace,
};
use proptest::prelude::*;

const PS: [f64; 4] = [1.0, 1.5, 2.0, f64::INFINITY];

fn fdlp() -> impl Strategy<Value = SeparableSpace> {
    (1usize..=3, 0usize..4).prop_map(|(dim, p)| SeparableSpace::finite_dim_lp(dim, PS[p]).unwrap())
}

fn any_space() -> impl Strategy<Value = SeparableSpace> {
    prop_oneof![
        4 => fdlp(),
        1 => (0usize..3, 1usize..=4).prop_map(|(p, s)| SeparableSpace::seq_lp([1.0, 1.5, 2.0][p], s).unwrap()),
        1 => Just(SeparableSpace::continuous_pl()),
    ]
}

fn element_in(space: &SeparableSpace) -> BoxedStrategy<Element> {
    let coord = -5.0..5.0_f64;
    match space {
        SeparableSpace::FiniteDimLp { dim, .. } => prop::collection::vec(coord, *dim).prop_map(Element::vector).boxed(),
        SeparableSpace::SeqLp { .. } => prop::collection::btree_map(1usize..8, coord, 1..5)
            .prop_map(|m| Element::sparse(m).unwrap())
            .boxed(),
        SeparableSpace::ContinuousPl => prop::collection::vec(coord, 2..6)
            .prop_map(|values| {
                let n = values.len();
                let breaks = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
                Element::pl(breaks, values).unwrap()
            })
            .boxed(),
        SeparableSpace::CustomNet(_) => unreachable!("not generated"),
    }
}

fn space_and_element() -> impl Strategy<Value = (SeparableSpace, Element)> {
    any_space().prop_flat_map(|s| {
        let e = element_in(&s);
        (Just(s), e)
    })
}

fn nonzero() -> impl Strategy<Value = (SeparableSpace, Element)> {
    space_and_element().prop_filter("nonzero", |(s, x)| s.norm(x).unwrap() > 1e-3)
}

fn seq() -> impl Strategy<Value = BoundedSeq> {
    prop_oneof![
        prop::collection::vec(-3.0..3.0_f64, 1..6).prop_map(|p| BoundedSeq::periodic(p).unwrap()),
        (-3.0..3.0_f64, 1usize..20).prop_map(|(v, n)| BoundedSeq::eventually_constant(v, n).unwrap()),
        (-3.0..3.0_f64, -0.95..0.95_f64).prop_map(|(l, r)| BoundedSeq::explicit_limit(l, r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn probing_is_pure(s in seq(), probes in prop::collection::vec(1usize..500, 1..40)) {
        for &n in &probes {
            prop_assert_eq!(s.coordinate(n).unwrap().to_bits(), s.coordinate(n).unwrap().to_bits());
        }
        let t = embed_t1(&SeparableSpace::finite_dim_lp(2, 1.5).unwrap(), &Element::vector(vec![0.3, -2.0])).unwrap();
        for &n in &probes {
            prop_assert_eq!(t.coordinate(n).unwrap().to_bits(), t.coordinate(n).unwrap().to_bits());
        }
    }

    #[test]
    fn prefix_sup_is_monotone(s in seq(), a in 1usize..300, b in 1usize..300) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(s.prefix_sup(lo).unwrap() <= s.prefix_sup(hi).unwrap());
    }

    #[test]
    fn combine_is_linear(s in seq(), t in seq(), a in -4.0..4.0_f64, b in -4.0..4.0_f64, n in 1usize..1000) {
        let c = combine(&[a, b], &[s.clone(), t.clone()]).unwrap();
        let direct = a * s.coordinate(n).unwrap() + b * t.coordinate(n).unwrap();
        let scale = (a * s.coordinate(n).unwrap()).abs() + (b * t.coordinate(n).unwrap()).abs();
        prop_assert!((c.coordinate(n).unwrap() - direct).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn clusters_cover_the_window(s in seq(), start in 1usize..50, len in 1usize..200, w in 0.05..2.0_f64) {
        let clusters = cluster_estimates(&s, start..=start + len - 1, w).unwrap();
        let mut all: Vec<usize> = clusters.iter().flat_map(|c| c.indices.iter().copied()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (start..start + len).collect::<Vec<_>>());
        for c in &clusters {
            for &n in &c.indices {
                prop_assert!((s.coordinate(n).unwrap() - c.value).abs() <= c.spread);
            }
        }
    }

    #[test]
    fn norm_is_homogeneous((space, x) in space_and_element(), c in -10.0..10.0_f64) {
        let lhs = norm(&space, &x.scaled(c)).unwrap();
        let rhs = c.abs() * norm(&space, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn functionals_are_dual_bounded((space, x) in space_and_element(), k in 1usize..=1000) {
        let phi = norming_functional(&space, k).unwrap();
        let v = apply_functional(&phi, &x).unwrap();
        prop_assert!(v.abs() <= norm(&space, &x).unwrap() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn net_points_are_normed(space in any_space(), k in 1usize..=10_000) {
        let u = net_point(&space, k).unwrap();
        prop_assert!((norm(&space, &u).unwrap() - 1.0).abs() <= 1e-9);
        let phi = norming_functional(&space, k).unwrap();
        prop_assert!((apply_functional(&phi, &u).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn net_distance_decays(space in fdlp(), raw in prop::collection::vec(-1.0..1.0_f64, 3), k in 1usize..2000) {
        let dim = match space { SeparableSpace::FiniteDimLp { dim, .. } => dim, _ => unreachable!() };
        let x = Element::vector(raw[..dim].to_vec());
        let n = norm(&space, &x).unwrap();
        prop_assume!(n > 1e-3);
        let v = x.scaled(1.0 / n);
        prop_assert!(net_distance(&space, &v, 2 * k).unwrap() <= net_distance(&space, &v, k).unwrap());
        let through5 = space.net_count_through(5) as usize;
        prop_assert!(net_distance(&space, &v, through5).unwrap() < 0.2);
    }

    #[test]
    fn embedding_upper_bound_is_exact((space, x) in space_and_element(), len in 1usize..3000) {
        let t = embed_t1(&space, &x).unwrap();
        prop_assert!(t.prefix_sup(len).unwrap() <= norm(&space, &x).unwrap() + 1e-9);
    }

    #[test]
    fn defect_interval_holds((space, x) in nonzero(), k in 1usize..600) {
        let d = isometry_defect(&space, &x, k).unwrap();
        prop_assert!(d.lower - 1e-9 <= d.achieved && d.achieved <= d.upper + 1e-9);
    }

    #[test]
    fn embedding_is_linear(
        (space, x, y) in fdlp().prop_flat_map(|s| { let a = element_in(&s); let b = element_in(&s); (Just(s), a, b) }),
        a in -3.0..3.0_f64,
        b in -3.0..3.0_f64,
        probes in prop::collection::vec(1usize..2000, 1..30),
    ) {
        let z = Element::lin_comb(a, &x, b, &y).unwrap();
        let (tz, tx, ty) = (embed_t1(&space, &z).unwrap(), embed_t1(&space, &x).unwrap(), embed_t1(&space, &y).unwrap());
        for n in probes {
            let lhs = tz.coordinate(n).unwrap();
            let rhs = a * tx.coordinate(n).unwrap() + b * ty.coordinate(n).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn signs_pair_up((space, x) in space_and_element(), k in 1usize..5000) {
        let t = embed_t1(&space, &x).unwrap();
        prop_assert_eq!(t.coordinate(2 * k).unwrap(), -t.coordinate(2 * k - 1).unwrap());
    }

    #[test]
    fn witnesses_reverify((space, x) in nonzero().prop_filter("finite dim", |(s, _)| matches!(s, SeparableSpace::FiniteDimLp { .. }))) {
        let w = oscillation_witness(&space, &x, 0.2, 5, 100_000).unwrap();
        prop_assert!(w.verify(&embed_t1(&space, &x).unwrap()).is_ok());
        prop_assert!(w.gap >= 2.0 * norm(&space, &x).unwrap() * 0.8 - 1e-9);
    }
}
