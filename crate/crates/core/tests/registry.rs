use std::collections::HashSet;

use proptest::prelude::*;
use rigidmetric::numbers::{compare, int, rat, CodedReal, Comparison};
use rigidmetric::registry::{ValueRegistry, HUB_BOUND_DEPTH, HUB_GAUGE};
use rigidmetric::rigidify::in_family;
use rigidmetric::Rational;

#[test]
fn fresh_gauges() {
    let mut r = ValueRegistry::new();
    let a = r.fresh_gauge();
    let b = r.fresh_gauge();
    assert_ne!(a.id, b.id);
    assert!(a.id != HUB_GAUGE && b.id != HUB_GAUGE);
    for level in 0..5usize {
        let v = r.semi_metric(a.id, level, 2, 9).unwrap();
        assert!(v > int(level as i64) && v < int(level as i64 + 1));
    }
    let va: HashSet<Rational> =
        r.gauge(a.id).map(|_| r.drawn_values().filter(|(g, _)| *g == a.id).map(|(_, v)| v.clone()).collect()).unwrap();
    r.semi_metric(b.id, 0, 2, 9).unwrap();
    assert!(r.drawn_values().filter(|(g, _)| *g == b.id).all(|(_, v)| !va.contains(v)));
    assert!(r.semi_metric(77, 0, 0, 1).is_err());
}

#[test]
fn ten_gauges_thousand_distinct_draws() {
    let mut r = ValueRegistry::new();
    let mut all = HashSet::new();
    for _ in 0..10 {
        let g = r.fresh_gauge();
        for j in 0..100u64 {
            let v = r.semi_metric(g.id, (j % 3) as usize, j, j + 1).unwrap();
            assert!(in_family(g.prime, &v));
            all.insert(v);
        }
    }
    assert_eq!(all.len(), 1000);
}

#[test]
fn hub_value_examples() {
    let mut r = ValueRegistry::new();
    let v = r.hub_value(2, 4, &int(1)).unwrap();
    let slack = CodedReal::rational(rat(3, 32));
    let one = CodedReal::rational(int(1));
    assert_ne!(compare(&(&v - &one), &slack, 64), Comparison::Greater);
    assert_ne!(compare(&(&one - &v), &slack, 64), Comparison::Greater);

    let w = r.hub_value(2, 5, &int(1)).unwrap();
    assert_ne!(v, w);
    assert!(r.hub_value(2, 4, &int(3)).is_err());
    assert!(r.hub_value(2, 6, &int(0)).is_err());

    for h in r.hubs() {
        assert_eq!(h.value.offset(), &h.rational_part);
        let coded = &h.value - &CodedReal::rational(h.rational_part.clone());
        let cap = CodedReal::rational(rat(1, 1 << h.index));
        assert_eq!(compare(&coded, &cap, 64), Comparison::Less);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hub_values_track_targets(num in 1i64..400, den in 1i64..40, i in 0u64..12, k in 0u32..5) {
        let target = rat(num, den);
        let mut r = ValueRegistry::new();
        let v = r.hub_value(k, i, &target).unwrap();
        let h = &r.hubs()[0];
        // Rational part on the 2^-(i+1) grid, within half a step.
        let step = rat(1, 1 << (i + 1));
        prop_assert!((&h.rational_part / &step).is_integer());
        let off = &h.rational_part - &target;
        prop_assert!(off <= &step / int(2) && -off <= &step / int(2));
        prop_assert!(&h.coeff * h.basis.eval(HUB_BOUND_DEPTH).hi <= rat(1, 1 << i));
        let enc = v.eval(6);
        let tol = rat(3, 1 << (i + 1));
        prop_assert!(&enc.hi - &target <= tol && &target - &enc.lo <= tol);
    }
}
