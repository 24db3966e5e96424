use num::{One, Zero};
use proptest::prelude::*;
use ymesh::arith::{fmt_q, parse_q, q};
use ymesh::fractal::{make_fractal, max_size};
use ymesh::ij::{inverse_check, Polygon};
use ymesh::mesh::Sampler;
use ymesh::pin::random_pin;
use ymesh::projective::cross_ratio;
use ymesh::quiver::{mutate_y, Quiver};
use ymesh::{lat, ExtRational, Q};

fn skew(n: usize, entries: &[i64]) -> Quiver {
    let mut b = vec![vec![0; n]; n];
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            b[u][v] = entries[k];
            b[v][u] = -entries[k];
            k += 1;
        }
    }
    Quiver::from_matrix(b).unwrap()
}

fn quiver_and_vertex() -> impl Strategy<Value = (Quiver, usize)> {
    (2usize..7)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(-3i64..=3, n * (n - 1) / 2), 0..n))
        .prop_map(|(n, e, k)| (skew(n, &e), k))
}

fn positive() -> impl Strategy<Value = Q> {
    (1i64..50, 1i64..50).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quiver_mutation_is_an_involution((qv, k) in quiver_and_vertex()) {
        prop_assert_eq!(qv.mutate(k).mutate(k), qv);
    }

    #[test]
    fn y_mutation_is_an_involution((qv, k) in quiver_and_vertex(), ys in prop::collection::vec(positive(), 6)) {
        let y = ys[..qv.len()].to_vec();
        let once = mutate_y(&qv, &y, k).unwrap();
        prop_assert_eq!(mutate_y(&qv.mutate(k), &once, k).unwrap(), y);
    }

    #[test]
    fn unlinked_mutations_commute((qv, k) in quiver_and_vertex(), other in 0usize..6, ys in prop::collection::vec(positive(), 6)) {
        let j = other % qv.len();
        prop_assume!(j != k && qv.b(j, k) == 0);
        prop_assert_eq!(qv.mutate(k).mutate(j), qv.mutate(j).mutate(k));
        let y = ys[..qv.len()].to_vec();
        let kj = mutate_y(&qv.mutate(k), &mutate_y(&qv, &y, k).unwrap(), j).unwrap();
        let jk = mutate_y(&qv.mutate(j), &mutate_y(&qv, &y, j).unwrap(), k).unwrap();
        prop_assert_eq!(kj, jk);
    }

    #[test]
    fn random_pins_have_one_d(seed in any::<u64>(), radius in 1i64..9) {
        let s = random_pin(seed, radius);
        prop_assert!(s.d_report().agree(), "{}", s);
        prop_assert!(s.d() >= 1);
        prop_assert_eq!(s.time_reverse().time_reverse().canonical(), s.canonical());
    }

    #[test]
    fn fractal_sizes_are_bounded(seed in any::<u64>(), k in 0usize..6) {
        let s = random_pin(seed, 5);
        let f = make_fractal(&s, lat(0, 0), k);
        prop_assert!(!f.is_empty() && f.len() <= max_size(k));
    }

    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = q(n, d);
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn cross_ratio_swap_symmetry(v in prop::collection::btree_set(-40i64..40, 4)) {
        let x: Vec<ExtRational> = v.into_iter().map(ExtRational::int).collect();
        let r = cross_ratio([&x[0], &x[1], &x[2], &x[3]]).unwrap();
        prop_assert_eq!(&r, &cross_ratio([&x[1], &x[0], &x[3], &x[2]]).unwrap());
        prop_assert_eq!(&r, &cross_ratio([&x[2], &x[3], &x[0], &x[1]]).unwrap());
        let f = r.finite().unwrap();
        prop_assert!(!f.is_zero() && !f.is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ij_maps_invert(seed in any::<u64>(), i in prop::collection::vec(1i64..3, 2), j in prop::collection::vec(1i64..3, 2)) {
        prop_assume!(i[0] + i[1] != 0 && j[0] + j[1] != 0);
        let mut rng = Sampler::new(seed, 0);
        let a = Polygon { lo: 0, points: (0..18).map(|_| rng.point(3).unwrap()).collect() };
        match inverse_check(&a, &i, &j) {
            Ok((n, fails)) => prop_assert!(n > 0 && fails.is_empty()),
            Err(ymesh::Error::Degenerate(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
