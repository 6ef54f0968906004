use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mbsfn_core::area_form::{build_plan, Method, PlanOptions, ProfitKind};
use mbsfn_core::oracle::{exhaustive_optimum, OracleOptions};
use mbsfn_core::scenario_io::{
    generate_random, generate_reference, RandomSpec, ReferenceOverrides,
};
use mbsfn_core::Exec;

const EXECS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn holistic(c: &mut Criterion) {
    let inst = generate_reference(1, &ReferenceOverrides::default())
        .unwrap()
        .with_max_areas(10)
        .instance()
        .unwrap();
    let mut group = c.benchmark_group("holistic_reference");
    group.sample_size(10);
    for method in [Method::Merge, Method::Grow] {
        for (name, exec) in EXECS {
            let opts = PlanOptions {
                exec,
                ..PlanOptions::new(ProfitKind::Holistic)
            };
            group.bench_with_input(BenchmarkId::new(method.as_str(), name), &opts, |b, opts| {
                b.iter(|| build_plan(&inst, method, opts).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    // a dense six-cell instance near the default oracle limits
    let inst = (0..)
        .map(|seed| {
            generate_random(
                seed,
                RandomSpec {
                    max_cells: 6,
                    max_content: 3,
                    max_areas: 3,
                },
            )
        })
        .find(|s| {
            s.topology.cells.len() == 6 && s.catalog.items.len() == 3 && s.budget.max_areas == 3
        })
        .unwrap()
        .instance()
        .unwrap();
    let mut group = c.benchmark_group("oracle_six_cells");
    group.sample_size(10);
    for (name, exec) in EXECS {
        let opts = OracleOptions {
            exec,
            ..OracleOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| exhaustive_optimum(&inst, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, holistic, oracle);
criterion_main!(benches);
