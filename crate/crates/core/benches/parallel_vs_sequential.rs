use std::hint::black_box;

use biharm::generators::{p5_domain, random_instance, RandomGraphSpec};
use biharm::harness::{sweep, Problem};
use biharm::operators::assemble_form;
use biharm::spectrum::{compute_constants, embedding_constant, lambda1};
use biharm::{Execution, ProblemParams, SolverConfig, VertexFunction};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn embedding(c: &mut Criterion) {
    let mut group = c.benchmark_group("embedding_constant_q4");
    for interior in [10, 30] {
        let spec = RandomGraphSpec {
            vertices: interior + 10,
            interior,
            ..RandomGraphSpec::default()
        };
        let (g, d) = random_instance(spec, 1);
        let form = assemble_form(&g, &d).unwrap();
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, interior), &form, |b, form| {
                b.iter(|| embedding_constant(black_box(form), 4.0, 0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn eps_sweep(c: &mut Criterion) {
    let (g, d) = p5_domain();
    let problem = Problem::new(g, d).unwrap();
    let l1 = lambda1(&problem.form).unwrap();
    let f = VertexFunction::constant(3, 1.0);
    let consts =
        compute_constants(&problem.form, 0.5 * l1, 4.0, &f, 0, Execution::Sequential).unwrap();
    let e1 = consts.eps1_hat.unwrap();
    let grid: Vec<f64> = (0..20)
        .map(|k| e1 * 10f64.powf(-4.0 * k as f64 / 19.0))
        .collect();
    let base = ProblemParams::new(0.5 * l1, 4.0, e1, f, l1).unwrap();
    let cfg = SolverConfig::default();

    let mut group = c.benchmark_group("sweep_p5_20_rows");
    group.sample_size(20);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| sweep(&problem, &base, &consts, black_box(&grid), &cfg, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, embedding, eps_sweep);
criterion_main!(benches);
