use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rcg::batch::multi_start_seq;
use rcg::linalg::random_symmetric;
use rcg::problems::{brockett_problem, rayleigh_problem};
use rcg::{Method, SolveOptions, SymmetricMatrix};

fn seeds() -> Vec<u64> {
    (0..16).collect()
}

fn rayleigh(c: &mut Criterion) {
    let a = SymmetricMatrix::new(random_symmetric(100, 7)).unwrap();
    let problem = rayleigh_problem(&a).unwrap();
    let opts = SolveOptions::new(Method::ScaledDY);
    let seeds = seeds();
    let mut g = c.benchmark_group("multistart_rayleigh_100");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(multi_start_seq(&problem, &seeds, &opts)))
    });
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(rcg::batch::multi_start_par(&problem, &seeds, &opts)))
    });
    g.finish();
}

fn brockett(c: &mut Criterion) {
    let a = SymmetricMatrix::new(random_symmetric(50, 11)).unwrap();
    let problem = brockett_problem(&a, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let opts = SolveOptions::new(Method::ScaledDY);
    let seeds = seeds();
    let mut g = c.benchmark_group("multistart_brockett_50_5");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(multi_start_seq(&problem, &seeds, &opts)))
    });
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(rcg::batch::multi_start_par(&problem, &seeds, &opts)))
    });
    g.finish();
}

criterion_group!(benches, rayleigh, brockett);
criterion_main!(benches);
