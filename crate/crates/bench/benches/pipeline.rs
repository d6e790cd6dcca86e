use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use netstab::linalg::{gen_eigenvalues, sym_eigen, DenseMatrix};
use netstab::sim::{integrate, Method};
use netstab::stability::{analyze, coupling_threshold};
use netstab_bench::{five_patch_system, ring_laplacian};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_sym_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("sym_eigen");
    for m in [8usize, 16, 32, 64] {
        let l = ring_laplacian(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &l, |b, l| {
            b.iter(|| sym_eigen(black_box(l)).unwrap())
        });
    }
    group.finish();
}

fn bench_gen_eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("gen_eigenvalues");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [8usize, 16, 32, 64] {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.gen_range(-2.0..2.0);
            }
        }
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| gen_eigenvalues(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_full_analysis(c: &mut Criterion) {
    let system = five_patch_system();
    let eq = system
        .make_homogeneous_equilibrium(&[3.0 / 7.0, 55.0 / 49.0])
        .unwrap();
    c.bench_function("analyze_five_patch", |b| {
        b.iter(|| analyze(black_box(&system), black_box(&eq), 0.0, 1e-6).unwrap())
    });
    c.bench_function("threshold_five_patch", |b| {
        b.iter(|| coupling_threshold(black_box(&system), black_box(&eq), 0.001, 1.0).unwrap())
    });
}

fn bench_integrators(c: &mut Criterion) {
    let system = five_patch_system();
    let eq = system
        .make_homogeneous_equilibrium(&[3.0 / 7.0, 55.0 / 49.0])
        .unwrap();
    let mut x0 = eq.stacked.clone();
    x0[0] += 1e-3;
    c.bench_function("rkf45_t50_five_patch", |b| {
        b.iter(|| integrate(black_box(&system), black_box(&x0), 50.0, &Method::rkf45_default()).unwrap())
    });
    c.bench_function("rk4_t10_dt1e-2_five_patch", |b| {
        b.iter(|| integrate(black_box(&system), black_box(&x0), 10.0, &Method::Rk4 { dt: 0.01 }).unwrap())
    });
}

criterion_group!(
    benches,
    bench_sym_eigen,
    bench_gen_eigenvalues,
    bench_full_analysis,
    bench_integrators
);
criterion_main!(benches);
