use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resum_bench::heat_solution;
use resum_core::kernels::{gevrey_kernel, moment_sequence};
use resum_core::mpde::{growth_classify, summability_2var_check};
use resum_core::sequences::generate;
use resum_core::summation::{euler_series, m_sum};
use resum_core::transforms::{borel_path, laplace_ray};
use resum_core::{
    Complex64, ContinuationMethod, GrowthMaps, PathSpec, SequenceFamily, SurfacePoint,
};
use std::hint::black_box;

fn sequences(c: &mut Criterion) {
    let mut group = c.benchmark_group("sequences");
    for depth in [100, 400, 1600] {
        group.bench_with_input(
            BenchmarkId::new("generate_gevrey", depth),
            &depth,
            |b, &n| b.iter(|| generate(&SequenceFamily::gevrey(1.0), black_box(n)).unwrap()),
        );
    }
    let maps = GrowthMaps::new(generate(&SequenceFamily::gevrey(1.0), 400).unwrap());
    group.bench_function("h_eval", |b| b.iter(|| maps.h(black_box(0.013)).unwrap()));
    group.bench_function("omega", |b| b.iter(|| maps.order_and_omega().unwrap()));
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let k = gevrey_kernel(0.5).unwrap();
    let mut group = c.benchmark_group("kernels");
    group.bench_function("entire_e", |b| {
        b.iter(|| {
            k.entire_e_best(black_box(Complex64::new(3.0, 1.0)))
                .unwrap()
        })
    });
    group.bench_function("moment_quadrature", |b| {
        b.iter(|| {
            k.moment_by_quadrature(black_box(Complex64::new(7.5, 0.0)), 1e-10)
                .unwrap()
        })
    });
    group.bench_function("moment_sequence_law", |b| {
        b.iter(|| moment_sequence(&k, 400, 1e-10).unwrap())
    });
    group.finish();
}

fn transforms(c: &mut Criterion) {
    let k = gevrey_kernel(1.0).unwrap();
    let path = PathSpec::for_kernel(&k, 0.0, 0.5).unwrap();
    let mut group = c.benchmark_group("transforms");
    group.bench_function("laplace_ray_monomial", |b| {
        b.iter(|| {
            laplace_ray(
                |u: SurfacePoint| u.to_complex().powi(4),
                &k,
                0.0,
                black_box(Complex64::new(0.3, 0.0)),
                1e-10,
            )
            .unwrap()
        })
    });
    group.bench_function("borel_path_rational", |b| {
        b.iter(|| {
            borel_path(
                |z: SurfacePoint| 1.0 / (1.0 - z.to_complex()),
                &k,
                &path,
                black_box(Complex64::new(2.0, 0.0)),
                1e-10,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn summation(c: &mut Criterion) {
    let k = gevrey_kernel(1.0).unwrap();
    let series = euler_series(20);
    let method = ContinuationMethod::near_diagonal(&series);
    let points: Vec<Complex64> = (1..=8)
        .map(|i| Complex64::new(0.025 * i as f64, 0.0))
        .collect();
    let mut group = c.benchmark_group("summation");
    group.sample_size(20);
    group.bench_function("euler_8_points", |b| {
        b.iter(|| m_sum(&series, &k, 0.0, &method, black_box(&points), 1e-12).unwrap())
    });
    group.finish();
}

fn mpde(c: &mut Criterion) {
    let mut group = c.benchmark_group("mpde");
    for j in [20, 40] {
        group.bench_with_input(BenchmarkId::new("heat_solution", j), &j, |b, &j| {
            b.iter(|| heat_solution(black_box(j)).unwrap())
        });
    }
    let (sol, m) = heat_solution(40).unwrap();
    group.bench_function("classify", |b| {
        b.iter(|| growth_classify(&sol, &m, &m, 2.0, Some(&m)).unwrap())
    });
    group.bench_function("two_variable", |b| {
        b.iter(|| summability_2var_check(&sol, &m, black_box(1.5)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sequences, kernels, transforms, summation, mpde);
criterion_main!(benches);
