use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stratlearn::constructions::{random_fixture, random_ug_fixture};
use stratlearn::exec::Exec;
use stratlearn::pac::{erm_strategic, ug_realizable};
use stratlearn::protocol::{best_in_hindsight, collect_pac_sample, Probe};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn erm(c: &mut Criterion) {
    let f = random_fixture(12, 3, 512, 7).unwrap();
    let dist = f.realizable_distribution(1).unwrap();
    let agents: Vec<_> = collect_pac_sample(&f.graph, &dist, 2000, Probe::AllButX, 3)
        .unwrap()
        .into_iter()
        .map(|o| stratlearn::graph::Agent { x: o.x, y: o.y })
        .collect();
    let mut group = c.benchmark_group("erm_strategic");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| erm_strategic(&f.graph, &f.class, black_box(&agents), exec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("best_in_hindsight");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| best_in_hindsight(&f.class, &f.graph, black_box(&agents), exec).unwrap())
        });
    }
    group.finish();
}

fn realizable(c: &mut Criterion) {
    let f = random_ug_fixture(10, 2, 64, 64, 5).unwrap();
    let graphs = f.graphs.as_ref().unwrap().as_family().materialize(1 << 16).unwrap();
    let dist = f.realizable_distribution(0).unwrap();
    let obs = collect_pac_sample(&f.graph, &dist, 1000, Probe::AllButX, 2).unwrap();
    let mut group = c.benchmark_group("ug_realizable");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| ug_realizable(&graphs, &f.class, black_box(&obs), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, erm, realizable);
criterion_main!(benches);
