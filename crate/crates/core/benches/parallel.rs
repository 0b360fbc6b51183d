use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rankone::jacobi::{truncate_with, JacobiParams};
use rankone::perturbation::{perturbed_spectrum_with, zeros_of_weyl};
use rankone::sampling::{reconstruct_grid, sample};
use rankone::verify::gen;
use rankone::{Coupling, Exec, SpectralModel};

const STRATEGIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn wide_model(n: usize) -> SpectralModel {
    let ev = (0..n)
        .map(|j| j as f64 + 0.3 * ((j * 7) % 5) as f64 / 5.0)
        .collect();
    let w = (0..n)
        .map(|j| 0.2 + ((j * 13) % 11) as f64 / 11.0)
        .collect();
    SpectralModel::new(ev, w).unwrap().normalize()
}

fn bench_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct_grid");
    let m = wide_model(200);
    let mut rng = gen::rng(1);
    let phi = gen::state(&mut rng, m.dim());
    let samples = sample(&m, &phi, Coupling::Finite(0.8)).unwrap();
    let mut avoid = samples.nodes().to_vec();
    avoid.extend(zeros_of_weyl(&m).unwrap());
    let points = gen::test_points(&mut rng, &avoid, 20_000, 0.01);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, points.len()), |b| {
            b.iter(|| reconstruct_grid(&samples, &points, exec))
        });
    }
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("perturbed_spectrum");
    for n in [100, 1000] {
        let m = wide_model(n);
        for (name, exec) in STRATEGIES {
            group.bench_function(BenchmarkId::new(name, n), |b| {
                b.iter(|| perturbed_spectrum_with(&m, Coupling::Finite(-2.5), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_truncate(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_truncate");
    let n = 400;
    let q = (0..n).map(|k| 0.5 * ((k % 3) as f64 - 1.0)).collect();
    let params = JacobiParams::new(q, vec![1.0; n]).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| truncate_with(&params, n, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_grid, bench_spectrum, bench_truncate);
criterion_main!(benches);
