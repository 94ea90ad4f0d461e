use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64;
use pilotbox::{
    eigenstate, evolve, quantum_potential, run_ensemble, sample_initial_positions, superpose,
    EvolutionPlan, Grid1D, Propagator, WellSpec,
};

fn bench_cn_step(c: &mut Criterion) {
    let grid = Grid1D::new(1.0, 8193).unwrap();
    let spec = WellSpec::unit();
    let one = Complex64::new(1.0, 0.0);
    let psi = superpose(&[(one, 1), (one, 2)], spec, &grid).unwrap();
    let prop = Propagator::new(spec, grid.n_points(), grid.dx(), 1e-4).unwrap();
    c.bench_function("cn_step_8192", |b| {
        b.iter_batched(
            || psi.clone(),
            |mut state| prop.step(&mut state).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_quantum_potential(c: &mut Criterion) {
    let grid = Grid1D::new(1.0, 8193).unwrap();
    let psi = eigenstate(WellSpec::unit(), 3, &grid).unwrap();
    c.bench_function("quantum_potential_8192", |b| {
        b.iter(|| quantum_potential(&psi).unwrap())
    });
}

fn bench_sampling(c: &mut Criterion) {
    let grid = Grid1D::new(1.0, 8193).unwrap();
    let psi = eigenstate(WellSpec::unit(), 1, &grid).unwrap();
    c.bench_function("sample_10k", |b| {
        b.iter(|| sample_initial_positions(&psi, 10_000, 7).unwrap())
    });
}

fn bench_ensemble(c: &mut Criterion) {
    let grid = Grid1D::new(1.0, 1025).unwrap();
    let spec = WellSpec::unit();
    let one = Complex64::new(1.0, 0.0);
    let psi = superpose(&[(one, 1), (one, 2)], spec, &grid).unwrap();
    let plan = EvolutionPlan::new(1e-4, 1000, 100).unwrap();
    let frames = evolve(&psi, &plan).unwrap();
    c.bench_function("ensemble_100_particles", |b| {
        b.iter(|| run_ensemble(&psi, &frames, 100, 42, 1e-3).unwrap())
    });
}

criterion_group!(benches, bench_cn_step, bench_quantum_potential, bench_sampling, bench_ensemble);
criterion_main!(benches);
