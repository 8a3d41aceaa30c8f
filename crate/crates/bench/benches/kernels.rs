use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tracelab::analysis::LeaderField;
use tracelab::capacity::{default_q_grid, scaling_function};
use tracelab::synthesis::{CoefficientField, RandomMember};
use tracelab::trace::{saturating_trace, tensor_trace};
use tracelab::wavelet::{check_property_r, dwt_periodic, OffsetSchedule};
use tracelab::{CapacityModel, SaturatingField, WaveletSpec};

fn binomials() -> (CapacityModel, CapacityModel) {
    (CapacityModel::binomial(0.25).unwrap(), CapacityModel::binomial(0.3).unwrap())
}

fn scaling(c: &mut Criterion) {
    let (mu, nu) = binomials();
    let q = default_q_grid();
    c.bench_function("tau binomial j=16", |b| b.iter(|| scaling_function(black_box(&mu), &q, 16).unwrap()));
    let xi = CapacityModel::product(mu, nu);
    let coarse: Vec<f64> = (0..41).map(|i| -5.0 + 0.25 * i as f64).collect();
    c.bench_function("tau product j=10", |b| b.iter(|| scaling_function(black_box(&xi), &coarse, 10).unwrap()));
}

fn leaders(c: &mut Criterion) {
    let (mu, nu) = binomials();
    let member = RandomMember::new(CapacityModel::product(mu, nu), f64::INFINITY, 9, 1).unwrap();
    let f = CoefficientField::from_source(&member).unwrap();
    c.bench_function("leaders D=2 J=9", |b| b.iter(|| LeaderField::from_field(black_box(&f)).unwrap()));
}

fn traces(c: &mut Criterion) {
    let (mu, nu) = binomials();
    let spec = WaveletSpec::daubechies("db4", 16).unwrap();
    let sched = OffsetSchedule::constant(&spec, 1, 3, 14, 14);
    let g = SaturatingField::from_parts(mu.clone(), nu.clone(), f64::INFINITY, 14, sched.clone()).unwrap();
    c.bench_function("saturating trace J=14", |b| {
        b.iter(|| saturating_trace(&mu, &nu, &sched, &spec, f64::INFINITY, black_box(&[0.3711]), 14).unwrap())
    });
    c.bench_function("tensor trace J=14", |b| b.iter(|| tensor_trace(&g, black_box(&[0.3711]), &spec).unwrap()));
}

fn wavelets(c: &mut Criterion) {
    let spec = WaveletSpec::daubechies("db4", 16).unwrap();
    let x: Vec<f64> = (0..1 << 14).map(|i| ((i * 7919) % 1013) as f64 / 1013.0).collect();
    c.bench_function("periodic dwt n=2^14", |b| b.iter(|| dwt_periodic(black_box(&x), &spec, 10, false).unwrap()));
    let mut g = c.benchmark_group("property");
    g.sample_size(10);
    g.bench_function("property R db4 grid 2^-12", |b| b.iter(|| check_property_r(black_box(&spec), 12)));
    g.finish();
}

criterion_group!(benches, scaling, leaders, traces, wavelets);
criterion_main!(benches);
