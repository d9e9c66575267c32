use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sqdb_bench::{random_state, rng};
use sqdb_core::quantum::{fourier_all, hadamard_all};

fn hadamard(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_all");
    for p in [8u32, 12, 16] {
        let state = random_state(&mut rng(p as u64), 1 << p, 2);
        group.bench_with_input(BenchmarkId::from_parameter(p), &state, |b, s| {
            b.iter(|| hadamard_all(black_box(s), "x").unwrap())
        });
    }
    group.finish();
}

fn fourier(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_all");
    for (a, m) in [(2u32, 12u32), (3, 8), (5, 5)] {
        let state = random_state(&mut rng(m as u64), a.pow(m) as usize, a as usize);
        group.bench_with_input(BenchmarkId::new(format!("A={a}"), m), &state, |b, s| {
            b.iter(|| fourier_all(black_box(s), "x", a).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hadamard, fourier);
criterion_main!(benches);
