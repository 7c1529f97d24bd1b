use criterion::{criterion_group, criterion_main, Criterion};
use oscillab_bench::systems;
use oscillab_core::criteria::{
    default_bundle, empirical_classify, oscillation_check, suboscillation_check,
};
use oscillab_core::reduction::{route_diagnostic, ReducedData};
use oscillab_core::integrate::uniform_grid;
use oscillab_core::{CriteriaOptions, OdeOptions};

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce and compare routes");
    let grid = uniform_grid(0.0, 5.0, 200);
    for (name, sys) in systems() {
        group.bench_function(name, |b| {
            b.iter(|| route_diagnostic(&ReducedData::new(&sys).unwrap(), &grid, 1e-9))
        });
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let opts = CriteriaOptions::default();
    let mut group = c.benchmark_group("checks");
    group.sample_size(10);
    for (name, sys) in systems() {
        group.bench_function(format!("oscillation {name}"), |b| {
            b.iter(|| oscillation_check(&sys, &opts).unwrap())
        });
        group.bench_function(format!("suboscillation {name}"), |b| {
            b.iter(|| suboscillation_check(&sys, (0.0, 20.0), None, &opts).unwrap())
        });
        let bundle = default_bundle(sys.n(), 0, 8);
        group.bench_function(format!("classify {name}"), |b| {
            b.iter(|| empirical_classify(&sys, &bundle, 60.0, 5, &OdeOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, reduction, checks);
criterion_main!(benches);
