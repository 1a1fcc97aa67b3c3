mod common;

use proptest::prelude::*;
use rigidmetric::metric::metric_from_upper;
use rigidmetric::numbers::{int, rat};
use rigidmetric::verify::{
    avoids_all_lnm, distance_embedding_check, is_metric, is_rigid, is_strict_triangle,
    is_strongly_rigid, isometry_group, lnm_search, sup_distance, Membership, Verdict,
    MAX_ISOMETRY_POINTS,
};
use rigidmetric::{Error, FiniteMetric, Rational};

const P: u64 = 64;

fn tri(a: Rational, b: Rational, c: Rational) -> FiniteMetric {
    metric_from_upper(&[a, b, c]).unwrap()
}

#[test]
fn triangle_examples() {
    let eq = tri(int(1), int(1), int(1));
    assert!(is_metric(&eq, P).passed() && is_strict_triangle(&eq, P).passed());
    let colinear = tri(int(1), int(2), int(3));
    assert!(is_metric(&colinear, P).passed());
    let strict = is_strict_triangle(&colinear, P);
    assert_eq!(strict.verdict, Verdict::Fail);
    assert_eq!(strict.witness.len(), 3);
    let broken = is_metric(&tri(int(1), int(2), int(4)), P);
    assert_eq!(broken.verdict, Verdict::Fail);
    assert!(!broken.witness.is_empty());
}

#[test]
fn sup_distance_examples() {
    let d = tri(int(1), int(2), int(3));
    let z = sup_distance(&d, &d).unwrap();
    assert_eq!((z.lo, z.hi), (int(0), int(0)));
    let a = metric_from_upper(&[int(1)]).unwrap();
    let b = metric_from_upper(&[rat(5, 4)]).unwrap();
    let e = sup_distance(&a, &b).unwrap();
    assert_eq!((e.lo, e.hi), (rat(1, 4), rat(1, 4)));
    assert!(matches!(sup_distance(&a, &d), Err(Error::Domain(_))));
}

#[test]
fn rigidity_examples() {
    let eq = tri(int(1), int(1), int(1));
    let sr = is_strongly_rigid(&eq, P);
    assert_eq!(sr.verdict, Verdict::Fail);
    assert_eq!(sr.witness.len(), 4);
    assert!(is_strongly_rigid(&tri(int(1), rat(11, 10), rat(6, 5)), P).passed());
    assert_eq!(isometry_group(&eq, P).unwrap().len(), 6);
    assert!(!is_rigid(&eq, P).passed());
    let scalene = tri(int(2), int(3), int(4));
    assert_eq!(isometry_group(&scalene, P).unwrap(), vec![vec![0, 1, 2]]);
    assert!(is_rigid(&scalene, P).passed());
    let n = MAX_ISOMETRY_POINTS + 1;
    let big = common::random_metric(&mut common::rng(3), n);
    assert!(matches!(isometry_group(&big, P), Err(Error::Resource(_))));
}

#[test]
fn lnm_examples() {
    let eq = tri(int(1), int(1), int(1));
    match lnm_search(&eq, 0, P) {
        Membership::Member([x, y, u, v]) => {
            assert_eq!(eq.get(x, y), eq.get(u, v));
            assert!((x, y) != (u, v));
        }
        other => panic!("expected membership, got {other:?}"),
    }
    let rigid = tri(int(1), rat(11, 10), rat(6, 5));
    for m in 0..6 {
        assert_eq!(lnm_search(&rigid, m, P), Membership::NonMember);
    }
    // d(0,1) = d(2,3) = 1/8, all other distances distinct.
    let d = metric_from_upper(&[rat(1, 8), int(1), rat(11, 10), rat(6, 5), rat(13, 10), rat(1, 8)]).unwrap();
    assert_eq!(lnm_search(&d, 2, P), Membership::NonMember);
    assert!(matches!(lnm_search(&d, 3, P), Membership::Member(_)));
}

#[test]
fn embedding_examples() {
    let eq = tri(int(1), int(1), int(1));
    let rep = distance_embedding_check(&eq, 0, P);
    assert_eq!(rep.verdict, Verdict::Fail);
    assert_eq!(rep.witness.len(), 2);
    let two = metric_from_upper(&[rat(2, 3)]).unwrap();
    assert!(distance_embedding_check(&two, 0, P).passed());
    assert!(distance_embedding_check(&two, 1, P).passed());
    let rigid = tri(int(1), rat(11, 10), rat(6, 5));
    assert!((0..3).all(|xi| distance_embedding_check(&rigid, xi, P).passed()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracles_agree(seed in any::<u64>(), n in 2usize..=8) {
        let d = common::random_pool_matrix(&mut common::rng(seed), n);
        let sr = is_strongly_rigid(&d, P);
        prop_assert!(sr.verdict != Verdict::Unresolved);
        prop_assert_eq!(avoids_all_lnm(&d, P), Some(sr.passed()));
        if sr.passed() {
            if n >= 3 {
                prop_assert!(is_rigid(&d, P).passed());
            }
            for xi in 0..n {
                prop_assert!(distance_embedding_check(&d, xi, P).passed());
            }
        } else {
            prop_assert_eq!(sr.witness.len(), 4);
        }
    }

    #[test]
    fn strictness_implies_triangle(seed in any::<u64>(), n in 3usize..=7) {
        let d = common::random_pool_matrix(&mut common::rng(seed), n);
        if is_strict_triangle(&d, P).passed() {
            prop_assert!(is_metric(&d, P).passed());
        }
    }
}
