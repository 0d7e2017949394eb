use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mwss_bench::instances;
use mwss_core::composition::compose;
use mwss_core::oracle::Model;
use mwss_core::pipeline::{solve, Options};

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for model in Model::ALL {
        for n in [100, 200, 400] {
            let gs = instances(model, n);
            group.bench_with_input(BenchmarkId::new(model.name(), n), &gs, |b, gs| {
                b.iter(|| {
                    for g in gs {
                        solve(g, &Options::default()).unwrap();
                    }
                })
            });
        }
    }
    group.finish();
}

fn composition(c: &mut Criterion) {
    let g = &instances(Model::Line, 200)[0];
    let basics = solve(g, &Options::default()).unwrap().basics;
    c.bench_function("compose/line/200", |b| {
        b.iter(|| {
            for basic in &basics {
                compose(&basic.graph, &basic.matching, false).unwrap();
            }
        })
    });
}

criterion_group!(benches, pipeline, composition);
criterion_main!(benches);
