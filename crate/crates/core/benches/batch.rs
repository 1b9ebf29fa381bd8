use std::hint::black_box;

use blde::batch::{run_batch, Execution};
use blde::benchmarks::{problem_by_name, LeadingOnes};
use blde::mkp::{mkp_bruteforce_with, MkpInstance};
use blde::{Blde, RngStream};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_batch");
    group.sample_size(10);
    let p1 = LeadingOnes::new(30);
    let p4 = problem_by_name("P4").unwrap();
    for (label, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("P1_16runs", label), &exec, |b, &exec| {
            b.iter(|| run_batch(&Blde::default(), &p1, 16, 1, 9000, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("P4_8runs_20k", label), &exec, |b, &exec| {
            b.iter(|| run_batch(&Blde::default(), p4.as_ref(), 8, 1, 20_000, exec).unwrap())
        });
    }
    group.finish();
}

fn bruteforce(c: &mut Criterion) {
    let mut group = c.benchmark_group("mkp_bruteforce");
    group.sample_size(10);
    let inst = MkpInstance::random(20, 5, &mut RngStream::new(3));
    for (label, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("n20_m5", label), &exec, |b, &exec| {
            b.iter(|| mkp_bruteforce_with(black_box(&inst), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batches, bruteforce);
criterion_main!(benches);
