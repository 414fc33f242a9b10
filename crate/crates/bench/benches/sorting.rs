use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use priced_sort::driver::inversion_sort;
use priced_sort::gen::{generate, GenSpec, Pattern};
use priced_sort::search::certificate_cost;
use priced_sort::variants::{sort_both_then_merge, sort_middle_regime};
use priced_sort::Cost;

fn uniform_instance(n: usize, alpha: &str, beta: &str, seed: u64) -> priced_sort::PricedInstance {
    generate(&GenSpec {
        n_red: n / 2,
        n_blue: n - n / 2,
        alpha: alpha.parse().unwrap(),
        beta: beta.parse().unwrap(),
        pattern: Pattern::UniformShuffle,
        seed,
    })
    .unwrap()
}

fn bench_inversion_sort(c: &mut Criterion) {
    let mut group = c.benchmark_group("inversion_sort_uniform");
    for n in [64usize, 256, 1024] {
        let instance = uniform_instance(n, "10", "10", 42);
        group.bench_with_input(BenchmarkId::from_parameter(n), &instance, |b, inst| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                black_box(inversion_sort(inst, seed).unwrap().report.total_cost)
            });
        });
    }
    group.finish();
}

fn bench_adversarial(c: &mut Criterion) {
    let mut group = c.benchmark_group("inversion_sort_few_long");
    group.sample_size(20);
    for n in [64usize, 256] {
        let instance = generate(&GenSpec {
            n_red: n / 2,
            n_blue: n / 2,
            alpha: Cost::from_int(n as u64),
            beta: Cost::from_int(n as u64),
            pattern: Pattern::FewLongStripes { long_len: n / 4 },
            seed: 7,
        })
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &instance, |b, inst| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                black_box(inversion_sort(inst, seed).unwrap().report.rounds)
            });
        });
    }
    group.finish();
}

fn bench_variants(c: &mut Criterion) {
    let mut group = c.benchmark_group("variants_n1024");
    let cheap = uniform_instance(1024, "0.25", "0.25", 3);
    group.bench_function("sort_both_then_merge", |b| {
        b.iter(|| black_box(sort_both_then_merge(&cheap, 0).unwrap().report.total_cost))
    });
    let middle = uniform_instance(1024, "0.25", "8", 3);
    group.bench_function("sort_middle_regime", |b| {
        b.iter(|| black_box(sort_middle_regime(&middle, 0).unwrap().report.total_cost))
    });
    group.finish();
}

fn bench_certificate_cost(c: &mut Criterion) {
    c.bench_function("certificate_cost_grid", |b| {
        let alpha: Cost = "2.5".parse().unwrap();
        let beta: Cost = "1000".parse().unwrap();
        b.iter(|| {
            let mut acc = 0u64;
            for a in 0..32u64 {
                for bb in 0..32u64 {
                    if certificate_cost(a, bb, alpha, beta).cost > Cost::from_int(100) {
                        acc += 1;
                    }
                }
            }
            black_box(acc)
        });
    });
}

criterion_group!(
    benches,
    bench_inversion_sort,
    bench_adversarial,
    bench_variants,
    bench_certificate_cost
);
criterion_main!(benches);
