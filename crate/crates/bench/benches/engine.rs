use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use ahss_core::abgroup::{smith_normal_form, CoefficientTag, IntMatrix};
use ahss_core::cochains::cohomology;
use ahss_core::simpcomplex::{builtin_space, SimplicialComplex};
use ahss_core::sseq::{run, theory};
use ahss_core::steenrod::{adem_reduce, derive_theta, SteenrodElement};

fn space(id: &str) -> Arc<SimplicialComplex> {
    Arc::new(builtin_space(id).unwrap())
}

fn snf(c: &mut Criterion) {
    let mut g = c.benchmark_group("smith");
    for id in ["torus2", "rp3", "moore(3,2)"] {
        let x = space(id);
        let m = x.boundary_matrix(2).unwrap();
        g.bench_function(BenchmarkId::from_parameter(id), |b| b.iter(|| smith_normal_form(black_box(&m))));
    }
    // dense pseudo-random block
    let n = 24;
    let data: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| BigInt::from(((i * 31 + j * 17) % 13) as i64 - 6)).collect()).collect();
    let m = IntMatrix::from_dense(n, n, &data);
    g.bench_function("dense24", |b| b.iter(|| smith_normal_form(black_box(&m))));
    g.finish();
}

fn cohomology_groups(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohomology");
    for id in ["torus2", "rp3", "sphere(4)"] {
        let x = space(id);
        g.bench_function(BenchmarkId::from_parameter(id), |b| {
            b.iter(|| {
                for k in 0..=x.dim() {
                    black_box(cohomology(&x, k, CoefficientTag::IntZ));
                }
            })
        });
    }
    g.finish();
}

fn spectral_sequences(c: &mut Criterion) {
    let mut g = c.benchmark_group("run");
    g.sample_size(10);
    for (id, t) in [("torus2", "Deligne:2"), ("rp3", "K0"), ("sphere(4)", "diffK0"), ("moore(3,2)", "diffMoravaInt:2")] {
        let x = space(id);
        let t = theory(t).unwrap();
        g.bench_function(BenchmarkId::new(t.id.clone(), id), |b| b.iter(|| run(&x, &t, None).unwrap()));
    }
    g.finish();
}

fn steenrod(c: &mut Criterion) {
    let e = SteenrodElement::monomial(vec![3, 5, 7, 2]);
    c.bench_function("adem_reduce", |b| b.iter(|| adem_reduce(black_box(&e))));
    c.bench_function("derive_theta/3", |b| b.iter(|| derive_theta(black_box(3)).unwrap()));
}

criterion_group!(benches, snf, cohomology_groups, spectral_sequences, steenrod);
criterion_main!(benches);
