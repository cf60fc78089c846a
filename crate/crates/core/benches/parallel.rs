use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mcgcalc_core::budget::Budget;
use mcgcalc_core::chord::{gram_matrix, verify_sum_relation};
use mcgcalc_core::derivation::certify_h_dimension;
use mcgcalc_core::exec;
use mcgcalc_core::symplectic::Genus;

fn modes(c: &mut Criterion, name: &str, mut job: impl FnMut()) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for (label, sequential) in [("sequential", true), ("parallel", false)] {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            exec::set_sequential(sequential);
            b.iter(&mut job);
        });
    }
    exec::set_sequential(false);
    group.finish();
}

fn benches(c: &mut Criterion) {
    let budget = Budget::unlimited();
    let g3 = Genus::new(3).unwrap();
    modes(c, "gram_matrix_k4_g3", || {
        gram_matrix(4, g3, &budget).unwrap();
    });
    modes(c, "sum_relation_k4_g3", || {
        verify_sum_relation(4, g3, &budget).unwrap();
    });
    let g2 = Genus::new(2).unwrap();
    modes(c, "h_dimension_k4_g2", || {
        certify_h_dimension(4, g2, &budget).unwrap();
    });
}

criterion_group!(parallel, benches);
criterion_main!(parallel);
