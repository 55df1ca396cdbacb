use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use expander_core::field::FieldSpec;
use expander_core::graph::{pv_expander, random_left_regular};
use expander_core::rng::Rng;
use expander_core::solve::{basis_pursuit, dantzig, lasso};
use expander_core::verify::{check_expansion_exhaustive, check_up2_sampled};
use expander_core::{Design, DesignMatrix};

fn matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for p in [256usize, 4096] {
        let x = DesignMatrix::from_graph(&random_left_regular(p, 8, p / 2, 0).unwrap());
        let v = Rng::new(1).normal_vec(p);
        let z = Rng::new(2).normal_vec(p / 2);
        group.bench_with_input(BenchmarkId::new("forward", p), &p, |b, _| {
            b.iter(|| x.matvec(black_box(&v)))
        });
        group.bench_with_input(BenchmarkId::new("adjoint", p), &p, |b, _| {
            b.iter(|| x.transpose_matvec(black_box(&z)))
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let g = pv_expander(&FieldSpec::from_order(8).unwrap(), 2, 2, 3).unwrap();
    let x = DesignMatrix::from_graph(&g);
    let mut beta = vec![0.0; g.p()];
    beta[3] = 1.5;
    beta[40] = -1.2;
    let clean = x.matvec(&beta).unwrap();
    let noise = Rng::new(3).normal_vec(g.n());
    let y: Vec<f64> = clean.iter().zip(&noise).map(|(a, b)| a + 0.01 * b).collect();

    let mut group = c.benchmark_group("solvers");
    group.sample_size(20);
    group.bench_function("lasso_p64_n512", |b| b.iter(|| lasso(&x, black_box(&y), 0.05)));
    group.bench_function("dantzig_p64_n512", |b| b.iter(|| dantzig(&x, black_box(&y), 0.01)));
    group.bench_function("basis_pursuit_p64_n512", |b| {
        b.iter(|| basis_pursuit(&x, black_box(&clean)))
    });
    group.finish();
}

fn verification(c: &mut Criterion) {
    let g = pv_expander(&FieldSpec::from_order(8).unwrap(), 2, 2, 3).unwrap();
    let x = DesignMatrix::from_graph(&g);
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("expansion_exhaustive_s4_p64", |b| {
        b.iter(|| check_expansion_exhaustive(black_box(&g), 4, 0.125))
    });
    group.bench_function("up2_sampled_1000", |b| {
        b.iter(|| check_up2_sampled(black_box(&x), 4, 1000, 0))
    });
    group.finish();
}

criterion_group!(benches, matvec, solvers, verification);
criterion_main!(benches);
