//! Sequential vs rayon-parallel fitness evaluation on the real workload:
//! full EM-PSO iterations over the particle-in-a-box loss, plus a cheap
//! sphere objective where parallel dispatch overhead should show up.

use criterion::{Criterion, criterion_group, criterion_main};
use std::hint::black_box;

use empso::runner::config::parse_config;
use empso::runner::experiment::PiabEvaluator;
use empso::swarm::{EvalMode, HyperParams, init_swarm_with, step_with};

fn piab_iterations(c: &mut Criterion) {
    let cfg = parse_config("problem=piab\nn=1\n").unwrap();
    let eval = PiabEvaluator::new(&cfg).unwrap();
    let fitness = move |v: &[f64]| eval.fitness(v);
    let eval2 = PiabEvaluator::new(&cfg).unwrap();
    let mut bounds = vec![cfg.weight_init; eval2.weight_count()];
    bounds.push(cfg.energy_init);
    let hyper = HyperParams::new(
        cfg.beta, cfg.c1, cfg.c2, cfg.swarm_size, cfg.max_iters, cfg.seed, bounds,
    )
    .unwrap();
    let dim = eval2.dim();

    let mut group = c.benchmark_group("piab_step_50_particles");
    for (name, mode) in [
        ("sequential", EvalMode::Sequential),
        ("parallel", EvalMode::Parallel),
    ] {
        group.bench_function(name, |b| {
            let mut state = init_swarm_with(&hyper, dim, &fitness, mode).unwrap();
            b.iter(|| {
                step_with(&mut state, &hyper, &fitness, mode);
                black_box(state.gbest_fitness())
            });
        });
    }
    group.finish();
}

fn sphere_iterations(c: &mut Criterion) {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let hyper = HyperParams::new(
        0.9,
        0.8,
        0.9,
        50,
        1000,
        42,
        vec![(-5.0, 5.0); 10],
    )
    .unwrap();

    let mut group = c.benchmark_group("sphere_step_50_particles");
    for (name, mode) in [
        ("sequential", EvalMode::Sequential),
        ("parallel", EvalMode::Parallel),
    ] {
        group.bench_function(name, |b| {
            let mut state = init_swarm_with(&hyper, 10, &sphere, mode).unwrap();
            b.iter(|| {
                step_with(&mut state, &hyper, &sphere, mode);
                black_box(state.gbest_fitness())
            });
        });
    }
    group.finish();
}

criterion_group!(benches, piab_iterations, sphere_iterations);
criterion_main!(benches);
