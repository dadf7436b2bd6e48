use std::hint::black_box;

use arw_core::experiments::{estimate_zeta_fe, FeParams, Placement};
use arw_core::layerperc::{enumerate_infections, greedy_path, BoundaryData};
use arw_core::{stabilize, InstructionTape, Policy, SiteStack};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn tape(c: &mut Criterion) {
    let t = InstructionTape::new(1, 0.8).unwrap();
    c.bench_function("tape/instruction_at x1000", |b| {
        b.iter(|| (0..1000i64).filter(|&k| t.instruction_at(black_box(5), k) == arw_core::Instruction::Sleep).count())
    });
    c.bench_function("tape/prefix_counts k=10000", |b| b.iter(|| t.prefix_counts(black_box(3), 10_000)));
    c.bench_function("tape/left_position c=1000", |b| {
        b.iter(|| SiteStack::new(&t, black_box(2)).left_position(1000).unwrap())
    });
}

fn engine(c: &mut Criterion) {
    let mut g = c.benchmark_group("stabilize");
    g.sample_size(20);
    for n in [64usize, 256] {
        let t = InstructionTape::new(2, 0.8).unwrap();
        let cfg = Placement::new(3, n).configuration((0.8 * n as f64) as u64);
        for (name, policy) in [("sweep", Policy::Sweep), ("leftmost", Policy::Leftmost)] {
            g.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter(|| stabilize(cfg.clone(), &t, policy, None).unwrap())
            });
        }
    }
    g.finish();
    let mut g = c.benchmark_group("fixed_energy");
    g.sample_size(10);
    g.bench_function("n=64 trials=5", |b| b.iter(|| estimate_zeta_fe(&FeParams::new(0.8, 64, 1).trials(5)).unwrap()));
    g.finish();
}

fn layer(c: &mut Criterion) {
    let t = InstructionTape::new(4, 0.8).unwrap();
    let bd = BoundaryData::new(vec![1, 2, 0, 1, 1, 1], 0, -1);
    c.bench_function("layer/enumerate n=6 cap=40", |b| b.iter(|| enumerate_infections(&t, &bd, Some(40)).unwrap()));
    let zero = BoundaryData::zero(47);
    c.bench_function("layer/greedy k=4 horizon=48", |b| b.iter(|| greedy_path(&t, &zero, 4, 48).unwrap()));
}

criterion_group!(benches, tape, engine, layer);
criterion_main!(benches);
