use std::f64::consts::PI;
use std::hint::black_box;

use cfsgauge_core::cfs::{spin_space, CorrelationOperator, SpinSpaceData};
use cfsgauge_core::dirac_box::{build_correlation_map, SpacetimePoint};
use cfsgauge_core::gauge_fix::symmetric_wave_chart;
use cfsgauge_core::linalg::identity;
use cfsgauge_core::{random, DiracBox, DiracBoxConfig, KreinSpace, Tolerances};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spin(y: cfsgauge_core::CMat, n: usize, tol: &Tolerances) -> SpinSpaceData {
    spin_space(&CorrelationOperator::new(y, n, tol).unwrap(), tol).unwrap()
}

fn sqrt_near_identity(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("sqrt_near_identity");
    for n in [2usize, 4, 8] {
        let gram = random::fixed_signature(&mut rng, n, n / 2, n - n / 2, 0.5, 2.0);
        let space = KreinSpace::new(gram, tol).unwrap();
        let b = identity(n) + space.symmetric_from_hermitian(&random::with_norm(random::hermitian(&mut rng, n), 0.2));
        group.bench_with_input(BenchmarkId::from_parameter(n), &b, |bench, b| {
            bench.iter(|| space.sqrt_near_identity(black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn symmetric_chart(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("symmetric_wave_chart");
    for f in [8usize, 32, 114] {
        let sx = spin(random::fixed_signature(&mut rng, f, 2, 2, 1.0, 2.0), 2, &tol);
        let sy = spin(random::perturb_regular(&mut rng, sx.point(), 0.05), 2, &tol);
        group.bench_with_input(BenchmarkId::from_parameter(f), &(sx, sy), |bench, (sx, sy)| {
            bench.iter(|| symmetric_wave_chart(black_box(sx), black_box(sy)).unwrap())
        });
    }
    group.finish();
}

fn box_kernels(c: &mut Criterion) {
    let tol = Tolerances::default();
    let dbox = DiracBox::new(DiracBoxConfig::new(PI, 0.4, 1.0).unwrap()).unwrap();
    let x = SpacetimePoint::new(0.3, [0.5, -1.0, 2.0], PI);
    let y = SpacetimePoint::new(-0.2, [1.5, 0.4, -2.5], PI);
    c.bench_function("kernel_mode_sum/f114", |bench| bench.iter(|| dbox.kernel_mode_sum(black_box(&x), black_box(&y))));
    let points: Vec<SpacetimePoint> = (0..16).map(|k| SpacetimePoint::new(0.1 * k as f64, [0.2 * k as f64, 0.0, -0.3], PI)).collect();
    c.bench_function("build_correlation_map/f114x16", |bench| {
        bench.iter(|| build_correlation_map(&dbox, black_box(&points), &tol).unwrap())
    });
}

criterion_group!(benches, sqrt_near_identity, symmetric_chart, box_kernels);
criterion_main!(benches);
