use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use infcast_core::arima::{best_subset, fit_mle, loglik};
use infcast_core::breaks::optimal_partitions;
use infcast_core::InterceptPolicy;
use infcast_bench::{arma11, arma11_series, shifted};

fn likelihood(c: &mut Criterion) {
    let (spec, params) = arma11();
    let mut group = c.benchmark_group("kalman_loglik");
    for n in [56, 200, 1000] {
        let data = arma11_series(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| loglik(&spec, &params, d).unwrap())
        });
    }
    group.finish();
}

fn estimation(c: &mut Criterion) {
    let (spec, _) = arma11();
    let data = arma11_series(200, 2);
    c.bench_function("fit_mle_arma11_n200", |b| b.iter(|| fit_mle(&spec, &data).unwrap()));
}

fn subset_search(c: &mut Criterion) {
    let data = arma11_series(56, 3);
    let mut group = c.benchmark_group("best_subset");
    group.sample_size(10);
    group.bench_function("p2_q2_n56", |b| {
        b.iter(|| best_subset(&data, 2, 2, InterceptPolicy::Search).unwrap())
    });
    group.finish();
}

fn breaks(c: &mut Criterion) {
    let mut group = c.benchmark_group("break_dp");
    for n in [133, 400] {
        let x = shifted(n, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| optimal_partitions(x, 3, (n as f64 * 0.15).ceil() as usize))
        });
    }
    group.finish();
}

criterion_group!(benches, likelihood, estimation, subset_search, breaks);
criterion_main!(benches);
