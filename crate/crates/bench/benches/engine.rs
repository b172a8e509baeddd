use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use goldsand_bench::{panchromatic_ladder, property_b_ladder, small_discrete};
use goldsand_core::oracles::{DiscreteState, MinimaxSolver};
use goldsand_core::solver::{solve_value, DEFAULT_TOL};
use goldsand_core::strategy::{play, PusherPolicy, RemoverPolicy, StrategyConfig};
use std::hint::black_box;

fn values(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_value");
    for depth in [2, 4, 8, 16] {
        let x = property_b_ladder(depth);
        group.bench_with_input(BenchmarkId::new("property_b", depth), &x, |b, x| {
            b.iter(|| solve_value(black_box(x), DEFAULT_TOL).unwrap())
        });
    }
    for r in [3, 4] {
        let x = panchromatic_ladder(r, 4);
        group.bench_with_input(BenchmarkId::new("panchromatic", r), &x, |b, x| {
            b.iter(|| solve_value(black_box(x), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn duels(c: &mut Criterion) {
    let mut group = c.benchmark_group("duel");
    group.sample_size(10);
    for depth in [2, 3, 4] {
        let x = property_b_ladder(depth);
        let cfg = StrategyConfig::with_epsilon(0.01);
        group.bench_with_input(BenchmarkId::new("property_b", depth), &x, |b, x| {
            b.iter(|| {
                let mut pusher = PusherPolicy::OptimalAdaptive.agent(&cfg);
                let mut remover = RemoverPolicy::Optimal.agent(&cfg);
                play(black_box(x), &mut pusher, &mut remover, &cfg).unwrap()
            })
        });
    }
    group.finish();
}

fn minimax(c: &mut Criterion) {
    let x = small_discrete();
    let state = DiscreteState::from_arrangement(&x).unwrap();
    c.bench_function("minimax/small_discrete", |b| {
        b.iter(|| MinimaxSolver::new(x.shared_system(), usize::MAX).solve(black_box(&state)).unwrap())
    });
}

criterion_group!(benches, values, duels, minimax);
criterion_main!(benches);
