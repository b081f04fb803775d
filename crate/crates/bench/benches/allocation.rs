use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linklab_core::power_allocation::{allocate, brute_force_split};
use linklab_core::{LinkCoefficients, RelayScheme};

fn coefficients() -> LinkCoefficients {
    LinkCoefficients {
        a_direct: 0.8,
        b_hd: 12.0,
        c_hd: 7.5,
        b_fd: 6.0,
        c_fd: 3.7,
        d_li: 0.4,
    }
}

fn closed_form(c: &mut Criterion) {
    let k = coefficients();
    let mut group = c.benchmark_group("allocate");
    for scheme in RelayScheme::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(scheme), &scheme, |b, &s| {
            b.iter(|| allocate(black_box(s), black_box(&k), black_box(2.0)))
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let k = coefficients();
    let mut group = c.benchmark_group("grid_oracle_10k");
    for scheme in RelayScheme::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(scheme), &scheme, |b, &s| {
            b.iter(|| brute_force_split(black_box(s), black_box(&k), black_box(2.0), 10_000))
        });
    }
    group.finish();
}

criterion_group!(benches, closed_form, oracle);
criterion_main!(benches);
