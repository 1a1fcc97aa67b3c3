use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rigidmetric::glue::rigidify_full;
use rigidmetric::numbers::{compare, int, rat, CodedReal, ExponentSchedule, IntervalSet};
use rigidmetric::product::{tau_metric, SemiMetricGauge, Word};
use rigidmetric::rigidify::perturb_strongly_rigid;
use rigidmetric::verify::is_strongly_rigid;
use rigidmetric_bench::line_metric;

fn set_sum(a: rigidmetric::Rational, b: rigidmetric::Rational) -> CodedReal {
    CodedReal::set_sum(ExponentSchedule::new(0), IntervalSet::interval(a, b).unwrap())
}

fn comparisons(c: &mut Criterion) {
    let shallow = (set_sum(int(0), int(1)), set_sum(int(0), int(2)));
    // The difference [5/7, 3/4) is first hit far beyond the exact prefix.
    let deep = (set_sum(int(0), rat(3, 4)), set_sum(int(0), rat(5, 7)));
    c.bench_function("compare/shallow", |b| b.iter(|| compare(black_box(&shallow.0), &shallow.1, 64)));
    c.bench_function("compare/deep", |b| b.iter(|| compare(black_box(&deep.0), &deep.1, 64)));
}

fn tau(c: &mut Criterion) {
    let words = Word::all(3, 3);
    let gauge = SemiMetricGauge::new(1);
    c.bench_function("tau_metric/27_words", |b| b.iter(|| tau_metric(&gauge, 3, black_box(&words)).unwrap()));
    let d = tau_metric(&gauge, 3, &words).unwrap();
    c.bench_function("is_strongly_rigid/27_words", |b| b.iter(|| is_strongly_rigid(black_box(&d), 64)));
}

fn pipelines(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for n in [4, 8] {
        let d = line_metric(n);
        group.bench_with_input(BenchmarkId::new("perturb", n), &d, |b, d| {
            b.iter(|| perturb_strongly_rigid(d, &rat(1, 4), 0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rigidify_full", n), &d, |b, d| {
            b.iter(|| rigidify_full(d, &rat(1, 2)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, comparisons, tau, pipelines);
criterion_main!(benches);
