use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixest_core::chain::{dobrushin_coefficient, StateDistribution};
use mixest_core::estimator::{confidence_interval, estimate_kappa_gen, estimate_relative};
use mixest_core::harness::{generate_chain, ChainFamily, ChainSpec};
use mixest_core::oracle::exact_generalized_contraction;
use mixest_core::sampler::{sample_trajectory, RandomSeed, TrajectorySampler};

fn dirichlet(d: usize) -> ChainSpec {
    ChainSpec::new(ChainFamily::RandomDirichlet, d, vec![], 17)
}

fn bench_dobrushin(c: &mut Criterion) {
    let mut g = c.benchmark_group("dobrushin");
    for d in [4, 16, 64] {
        let k = generate_chain(&dirichlet(d)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(d), &k, |b, k| {
            b.iter(|| dobrushin_coefficient(black_box(k)))
        });
    }
    g.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let k = generate_chain(&dirichlet(8)).unwrap();
    let sampler = TrajectorySampler::new(&k);
    let mu = StateDistribution::uniform(8).unwrap();
    c.bench_function("sample/d8_m100k", |b| {
        b.iter(|| {
            sampler
                .sample(&mu, 100_000, &mut RandomSeed(3).rng())
                .unwrap()
        })
    });
}

fn bench_estimators(c: &mut Criterion) {
    let k = generate_chain(&ChainSpec::three_state_funnel()).unwrap();
    let mu = StateDistribution::uniform(3).unwrap();
    let traj = sample_trajectory(&k, &mu, 100_000, RandomSeed(5)).unwrap();
    let mut g = c.benchmark_group("estimate");
    for s in [4, 16, 64] {
        g.bench_with_input(BenchmarkId::new("fixed", s), &s, |b, &s| {
            b.iter(|| estimate_kappa_gen(black_box(&traj), s, 0.0).unwrap())
        });
    }
    g.bench_function("adaptive", |b| {
        b.iter(|| estimate_relative(black_box(&traj), 0.0).unwrap())
    });
    g.bench_function("interval_S16", |b| {
        b.iter(|| confidence_interval(black_box(&traj), 16, 0.1, 0.0).unwrap())
    });
    g.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_contraction");
    for d in [3, 8] {
        let k = generate_chain(&ChainSpec::new(ChainFamily::LazyCycle, d, vec![], 0)).unwrap();
        g.bench_with_input(BenchmarkId::new("lazy_cycle", d), &k, |b, k| {
            b.iter(|| exact_generalized_contraction(black_box(k)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_dobrushin,
    bench_sampling,
    bench_estimators,
    bench_oracle
);
criterion_main!(benches);
