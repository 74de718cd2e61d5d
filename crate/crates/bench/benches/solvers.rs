use std::hint::black_box;

use bpf_helmholtz::{assemble, solve_scheme, solve_tridiagonal, Benchmark, SchemeKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const SIZES: [usize; 3] = [1 << 10, 1 << 14, 1 << 18];

fn thomas(c: &mut Criterion) {
    let (p, _) = Benchmark::SineSquared.build(64.0).unwrap();
    let mut group = c.benchmark_group("thomas");
    for n in SIZES {
        let sys = assemble(&p, n, SchemeKind::Bpf).unwrap();
        group.throughput(Throughput::Elements(n as u64 + 1));
        group.bench_with_input(BenchmarkId::from_parameter(n), &sys, |b, sys| {
            b.iter(|| solve_tridiagonal(black_box(sys)).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let (p, _) = Benchmark::SineSquared.build(64.0).unwrap();
    let mut group = c.benchmark_group("assemble");
    for kind in SchemeKind::ALL {
        for n in SIZES {
            group.throughput(Throughput::Elements(n as u64 + 1));
            group.bench_with_input(BenchmarkId::new(kind.name(), n), &n, |b, &n| {
                b.iter(|| assemble(black_box(&p), n, kind).unwrap())
            });
        }
    }
    group.finish();
}

// Assembly, Thomas and the refinement passes together.
fn full_solve(c: &mut Criterion) {
    let (p, _) = Benchmark::SineSquared.build(64.0).unwrap();
    let mut group = c.benchmark_group("solve_scheme");
    group.sample_size(20);
    for n in SIZES {
        group.throughput(Throughput::Elements(n as u64 + 1));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve_scheme(black_box(&p), n, SchemeKind::Bpf).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, thomas, assembly, full_solve);
criterion_main!(benches);
