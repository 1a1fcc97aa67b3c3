mod common;

use rigidmetric::glue::{
    amalgamate, partition_by_diameter, rigidify_full, schedule_for, sup_bound_check, BoundVerdict,
    Partition,
};
use rigidmetric::metric::metric_from_upper;
use rigidmetric::numbers::{compare, int, rat, Comparison};
use rigidmetric::registry::HUB_GAUGE;
use rigidmetric::verify::{is_metric, is_strongly_rigid, sup_distance, sup_distance_within};
use rigidmetric::{Error, FiniteMetric, Rational};

const P: u64 = 64;

fn labeled(labels: &[&str], upper: &[Rational]) -> FiniteMetric {
    let d = metric_from_upper(upper).unwrap();
    let m = d.rational_matrix().unwrap();
    FiniteMetric::from_rationals(labels.iter().map(|s| s.to_string()).collect(), m).unwrap()
}

fn diameter_ok(d: &FiniteMetric, block: &[usize], bound: &Rational) -> bool {
    block.iter().all(|&x| block.iter().all(|&y| d.rational(x, y).unwrap() <= bound))
}

#[test]
fn partition_examples() {
    let far = metric_from_upper(&[int(4), int(5), int(6)]).unwrap();
    let p = partition_by_diameter(&far, &int(3)).unwrap();
    assert!(p.blocks.iter().all(|b| b.len() == 1));

    let near = metric_from_upper(&[int(1), int(1), int(1)]).unwrap();
    assert_eq!(partition_by_diameter(&near, &int(2)).unwrap().blocks, vec![vec![0, 1, 2]]);

    let mixed = metric_from_upper(&[int(1), int(1), int(10), int(1), int(1), int(1)]).unwrap();
    let p = partition_by_diameter(&mixed, &int(3)).unwrap();
    assert_eq!(p.blocks.len(), 2);
    assert!(p.blocks.iter().all(|b| diameter_ok(&mixed, b, &int(3))));
    assert!(p.blocks.iter().zip(&p.hubs).all(|(b, h)| b.contains(h)));
}

#[test]
fn partition_blocks_respect_the_bound() {
    let mut rng = common::rng(21);
    for n in 2..10 {
        let d = common::clustered_metric(&mut rng, n);
        let bound = rat(1, 20);
        let p = partition_by_diameter(&d, &bound).unwrap();
        assert!(p.blocks.iter().all(|b| diameter_ok(&d, b, &bound)));
        assert_eq!(p.blocks.iter().map(Vec::len).sum::<usize>(), n);
    }
}

#[test]
fn amalgamation_examples() {
    let e1 = labeled(&["a", "b"], &[rat(1, 2)]);
    let e2 = labeled(&["c"], &[]);
    let h = labeled(&["a", "c"], &[int(2)]);
    let p = Partition { blocks: vec![vec![0, 1], vec![2]], hubs: vec![0, 2] };
    let d = amalgamate(&p, &[e1.clone(), e2], &h).unwrap();
    assert_eq!(d.rational(1, 2), Some(&rat(5, 2)));
    assert_eq!(d.restrict(&[0, 1]), e1);

    let single = labeled(&["a", "b", "c"], &[int(1), int(2), rat(3, 2)]);
    let p = Partition { blocks: vec![vec![0, 1, 2]], hubs: vec![1] };
    let one_hub = labeled(&["b"], &[]);
    assert_eq!(amalgamate(&p, &[single.clone()], &one_hub).unwrap(), single);

    let p = Partition { blocks: vec![vec![0, 1]], hubs: vec![0, 1] };
    assert!(matches!(amalgamate(&p, &[e1], &h), Err(Error::Domain(_))));
}

#[test]
fn sup_bound_examples() {
    // Singleton blocks with h = d on the hubs reproduce d exactly.
    let d = metric_from_upper(&[int(1), int(2), rat(3, 2)]).unwrap();
    let p = Partition { blocks: vec![vec![0], vec![1], vec![2]], hubs: vec![0, 1, 2] };
    let singles: Vec<FiniteMetric> = (0..3).map(|i| d.restrict(&[i])).collect();
    let same = amalgamate(&p, &singles, &d).unwrap();
    let rep = sup_bound_check(&d, &same, &p, &rat(1, 10)).unwrap();
    assert_eq!(rep.verdict, BoundVerdict::Pass);
    assert_eq!((rep.achieved_lo.clone(), rep.achieved_hi.clone()), (int(0), int(0)));

    // Inflate the hub metric so D_P(d|P, h) = 1.
    let d = metric_from_upper(&[rat(1, 10), int(3), int(3)]).unwrap();
    let p = Partition { blocks: vec![vec![0, 1], vec![2]], hubs: vec![0, 2] };
    let h = labeled(&["0", "2"], &[int(4)]);
    let blocks = [d.restrict(&[0, 1]), d.restrict(&[2])];
    let big = amalgamate(&p, &blocks, &h).unwrap();
    let gap = sup_distance(&d.restrict(&p.hubs), &h).unwrap();
    assert_eq!((gap.lo, gap.hi), (int(1), int(1)));
    let eps = rat(1, 10);
    let rep = sup_bound_check(&d, &big, &p, &eps).unwrap();
    assert_eq!(rep.verdict, BoundVerdict::Pass);
    assert_eq!(rep.bound_hi, int(4) * &eps + int(1));
    assert!(rep.achieved_hi <= rep.bound_lo);

    // A block wider than epsilon is a precondition failure.
    let rep = sup_bound_check(&d, &big, &p, &rat(1, 20)).unwrap();
    assert_eq!(rep.verdict, BoundVerdict::PreconditionFailure);
}

#[test]
fn pipeline_outputs_pass_the_bound_check() {
    let mut rng = common::rng(22);
    for trial in 0..8 {
        let n = 3 + trial % 5;
        let d = common::clustered_metric(&mut rng, n);
        let eps = rat(1, 2);
        let (out, cert) = rigidify_full(&d, &eps).unwrap();
        let eta = &eps / int(5);
        let rep = sup_bound_check(&d, &out, &cert.partition, &eta).unwrap();
        assert_eq!(rep.verdict, BoundVerdict::Pass, "trial {trial}: {}", rep.message);
        // Restriction exactness: every block distance is a block tau value.
        for block in &cert.partition.blocks {
            let sub = out.restrict(block);
            for (i, j) in sub.pairs() {
                assert!(sub.get(i, j).offset() == &int(0) && sub.get(i, j).terms().len() == 1);
            }
        }
    }
}

#[test]
fn two_point_pipeline() {
    let d = metric_from_upper(&[int(1)]).unwrap();
    let eps = rat(1, 2);
    let (out, cert) = rigidify_full(&d, &eps).unwrap();
    assert!(sup_distance_within(&d, &out, &eps, P).unwrap().passed());
    assert!(cert.independence.is_empty());
    // The single distance and 1 are independent: one set in the witness.
    assert_eq!(cert.basis.sets.len(), 1);
    assert!(cert.verify(P).is_ok());
    assert!(cert.sup_bound.achieved_hi <= eps);
}

#[test]
fn six_point_pipeline() {
    let mut rng = common::rng(23);
    let d = common::random_metric(&mut rng, 6);
    let eps = rat(1, 2);
    let (out, cert) = rigidify_full(&d, &eps).unwrap();
    assert!(is_strongly_rigid(&out, P).passed());
    assert!(is_metric(&out, P).passed());
    assert_eq!(cert.independence.len(), 105);
    assert!(cert.verify(P).is_ok());
}

#[test]
fn already_rigid_input_is_still_replaced() {
    let d = metric_from_upper(&[int(1), rat(11, 10), rat(6, 5)]).unwrap();
    assert!(is_strongly_rigid(&d, P).passed());
    let eps = rat(1, 4);
    let (out, _) = rigidify_full(&d, &eps).unwrap();
    assert_ne!(out, d);
    assert!(sup_distance_within(&d, &out, &eps, P).unwrap().passed());
}

#[test]
fn pipeline_rejects_degenerate_inputs() {
    let d = metric_from_upper(&[int(1)]).unwrap();
    assert!(matches!(rigidify_full(&d.restrict(&[0]), &int(1)), Err(Error::Degenerate(_))));
    assert!(matches!(rigidify_full(&d, &int(0)), Err(Error::Domain(_))));
}

#[test]
fn hub_and_block_values_never_coincide() {
    let mut rng = common::rng(24);
    let d = common::clustered_metric(&mut rng, 8);
    let (out, cert) = rigidify_full(&d, &rat(1, 2)).unwrap();
    let hub_values: Vec<_> = cert.registry.hubs().iter().map(|h| h.value.clone()).collect();
    for (i, j) in out.pairs() {
        let same_block = cert.partition.block_of(i) == cert.partition.block_of(j);
        if same_block {
            for h in &hub_values {
                assert_ne!(compare(out.get(i, j), h, P), Comparison::Equal);
            }
        }
    }
    assert!(cert.registry.gauges().iter().any(|g| g.id == HUB_GAUGE));
}

#[test]
fn schedule_is_minimal() {
    for (num, den) in [(1, 1), (1, 5), (1, 10), (1, 20), (3, 40), (2, 1)] {
        let eta = rat(num, den);
        let k = schedule_for(&eta);
        let two_k = Rational::from_integer(num_bigint::BigInt::from(1u64 << k));
        assert!(int(1) / &two_k <= eta);
        assert!(k == 0 || int(2) / &two_k > eta);
    }
}

#[test]
fn certificates_survive_json_and_catch_tampering() {
    let mut rng = common::rng(25);
    let d = common::clustered_metric(&mut rng, 5);
    let (_, cert) = rigidify_full(&d, &rat(1, 2)).unwrap();
    let back = rigidmetric::Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(back, cert);
    assert!(back.verify(P).is_ok());

    let mut bad = cert.clone();
    bad.sup_bound.epsilon = int(0);
    assert!(bad.verify(P).is_err());

    let mut bad = cert.clone();
    if let Some(entry) = bad.independence.first_mut() {
        entry.distinguishing_gauge = 999;
        assert!(bad.verify(P).is_err());
    }

    let mut bad = cert.clone();
    bad.independence.pop();
    assert!(bad.verify(P).is_err());

    let mut bad = cert;
    bad.k += 1;
    assert!(bad.verify(P).is_err());
}
