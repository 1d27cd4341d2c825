use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mtc_core::density::{cp_count, euler_product, DensitySetup};
use mtc_core::descent::{pell_solve, solve_conic_fixed_coord, Axis, PellProblem};
use mtc_core::picard::{h1, picard_x_module};
use mtc_core::surface::{coefficients_from_k, ParamVector, SurfaceSpec};

fn surface(c: &mut Criterion) {
    let k = ParamVector([127, 5, 725, 1445]);
    c.bench_function("coefficients_from_k", |b| b.iter(|| coefficients_from_k(black_box(&k))));
    c.bench_function("h1_pic_x", |b| b.iter(|| h1(&picard_x_module(), black_box(&[1, 2, 3, 4])).unwrap()));
}

fn descent(c: &mut Criterion) {
    c.bench_function("pell_solve_d199_n_minus_457", |b| {
        b.iter(|| pell_solve(black_box(&PellProblem::new(199, -457))).unwrap())
    });
    let spec = SurfaceSpec::from_k([3019, 5, 5, 5]).unwrap();
    c.bench_function("conic_slice_x_24", |b| {
        b.iter(|| solve_conic_fixed_coord(&spec, Axis::X, black_box(&24.into())).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let setup = DensitySetup::standard();
    c.bench_function("cp_count_9973", |b| b.iter(|| cp_count(&setup, black_box(9973)).unwrap()));
    let mut g = c.benchmark_group("euler");
    g.sample_size(10);
    g.bench_function("euler_product_cutoff_10000", |b| b.iter(|| euler_product(&setup, black_box(10_000)).unwrap()));
    g.finish();
}

criterion_group!(benches, surface, descent, density);
criterion_main!(benches);
