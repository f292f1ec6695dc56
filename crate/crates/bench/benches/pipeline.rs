//! Pipeline hot spots: preparation, the split-form solve, coboundary SVD,
//! and one nonlinear glue evaluation (the Newton inner loop).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use curvedef_bench::{loose_opts, quadratic_poly, shear_cylinder, unit_times_quadratic};
use curvedef_core::{
    assemble_coboundary, build_chart, glue_map, paired_annulus_config, projective_line,
    solve_dwp_with, weierstrass_prep, SmoothnessClass, Truncation,
};

fn bench_prep(c: &mut Criterion) {
    let mut group = c.benchmark_group("weierstrass_prep");
    for z_half in [16, 32] {
        let f = unit_times_quadratic(z_half, 8);
        group.bench_function(format!("window_{z_half}"), |b| {
            b.iter(|| weierstrass_prep(black_box(&f), 1.0).unwrap())
        });
    }
    group.finish();
}

fn bench_dwp_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("dwp_solve");
    for z_half in [8, 16] {
        let poly = quadratic_poly(z_half);
        let cyl = shear_cylinder(0.05);
        group.bench_function(format!("window_{z_half}"), |b| {
            b.iter(|| solve_dwp_with(black_box(&poly), &cyl, loose_opts()).unwrap())
        });
    }
    group.finish();
}

fn bench_coboundary(c: &mut Criterion) {
    let mut group = c.benchmark_group("coboundary_svd");
    for half in [16, 32] {
        let covering = projective_line(-2, SmoothnessClass::sobolev(1.0).unwrap()).unwrap();
        let trunc = Truncation::projective(-2, half);
        group.bench_function(format!("window_{half}"), |b| {
            b.iter(|| {
                let op = assemble_coboundary(black_box(&covering), &trunc).unwrap();
                black_box(op.singular_values())
            })
        });
    }
    group.finish();
}

fn bench_glue(c: &mut Criterion) {
    let cfg = paired_annulus_config(0.05, 5, SmoothnessClass::sobolev(1.0).unwrap()).unwrap();
    let chart = build_chart(cfg).unwrap();
    let mut point = chart.base_point();
    point[0] += curvedef_core::Complex64::new(0.01, 0.0);
    c.bench_function("glue_map", |b| {
        b.iter(|| glue_map(chart.config(), black_box(&point)).unwrap())
    });
}

criterion_group!(benches, bench_prep, bench_dwp_solve, bench_coboundary, bench_glue);
criterion_main!(benches);
