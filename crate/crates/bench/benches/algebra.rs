use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sigrep_bench::dense_tensor;
use sigrep_core::representations::{delay_ell, DelayParams};
use sigrep_core::tensor_algebra::{resolvent, shuffle_exp};

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("concat");
    for &(d, m) in &[(2, 6), (2, 10), (3, 6)] {
        let (a, b) = (dense_tensor(d, m, 1), dense_tensor(d, m, 2));
        group.bench_with_input(BenchmarkId::from_parameter(format!("d{d}_M{m}")), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(a).concat(black_box(b)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("shuffle");
    for &(d, m) in &[(2, 6), (2, 8), (3, 6)] {
        let (a, b) = (dense_tensor(d, m, 3), dense_tensor(d, m, 4));
        group.bench_with_input(BenchmarkId::from_parameter(format!("d{d}_M{m}")), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(a).shuffle(black_box(b)))
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let mut q = dense_tensor(2, 8, 5);
    q.coeffs_mut()[0] = 0.5;
    c.bench_function("resolvent_d2_M8", |b| b.iter(|| resolvent(black_box(&q))));
    let mut a = dense_tensor(2, 6, 6);
    a.coeffs_mut()[0] = 0.0;
    c.bench_function("shuffle_exp_d2_M6", |b| b.iter(|| shuffle_exp(black_box(&a))));
    let params = DelayParams::scenario_b();
    c.bench_function("delay_ell_M12", |b| b.iter(|| delay_ell(black_box(&params), 12)));
}

criterion_group!(benches, products, series);
criterion_main!(benches);
