use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lgb_core::algebra::verify_axioms;
use lgb_core::isomorphism::{solve_scaling_iso, verify_frobenius_iso};
use lgb_core::kernel::{parse_polynomial, rat};
use lgb_core::milnor::MilnorRing;
use lgb_core::orbifold::{build_bmodel_with, BModelOptions};
use lgb_core::symmetry::subgroup_generated;
use lgb_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn milnor(c: &mut Criterion) {
    let mut group = c.benchmark_group("milnor_ring");
    for w in ["x^2 + y^3 + z^4 + w^5", "x^3*y + y^3*z + z^3*w + w^3*x"] {
        let p = parse_polynomial(w, None).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, w), &p, |b, p| {
                b.iter(|| MilnorRing::with_exec(black_box(p), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("bmodel_axioms");
    let w = parse_polynomial("x^2 + x*y^5 + y^10 + z^2 + w^2", None).unwrap();
    let h = rat(1, 2);
    let z = rat(0, 1);
    let g =
        subgroup_generated(&w, &[vec![h.clone(), h.clone(), z.clone(), z.clone()], vec![z.clone(), z, h.clone(), h]])
            .unwrap();
    for (name, exec) in MODES {
        let model = build_bmodel_with(&w, &g, BModelOptions { exec, ..Default::default() }).unwrap();
        group.bench_function(BenchmarkId::new("build", name), |b| {
            b.iter(|| build_bmodel_with(black_box(&w), &g, BModelOptions { exec, ..Default::default() }).unwrap())
        });
        group.bench_function(BenchmarkId::new("verify", name), |b| b.iter(|| verify_axioms(black_box(&model), exec)));
    }
    group.finish();
}

fn isomorphism(c: &mut Criterion) {
    let mut group = c.benchmark_group("frobenius_iso");
    let vars = ["x", "y"];
    let a = Arc::new(MilnorRing::new(&parse_polynomial("x^2 + y^20", Some(&vars)).unwrap()).unwrap());
    let t = Arc::new(MilnorRing::new(&parse_polynomial("x^2 + x*y^10 + y^20", Some(&vars)).unwrap()).unwrap());
    let sol = solve_scaling_iso(&a, &t, Exec::Sequential).unwrap();
    let map = sol.found().expect("scaling map exists").map.clone();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("verify", name), |b| {
            b.iter(|| verify_frobenius_iso(black_box(&map), None, exec))
        });
        group.bench_function(BenchmarkId::new("solve", name), |b| b.iter(|| solve_scaling_iso(&a, &t, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, milnor, axioms, isomorphism);
criterion_main!(benches);
