use criterion::{criterion_group, criterion_main, Criterion};

use cpog_bench::fixtures;
use cpog_core::generator::GenOptions;
use cpog_core::{check_proof, CheckOptions};

fn bench_pipeline(c: &mut Criterion) {
    let opts = GenOptions::default();
    for f in fixtures() {
        c.bench_function(&format!("generate/{}", f.name), |b| b.iter(|| f.proof(&opts)));
        let steps = f.proof(&opts).steps;
        c.bench_function(&format!("check/{}", f.name), |b| {
            b.iter(|| check_proof(&f.cnf, steps.iter(), CheckOptions::default()))
        });
    }
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
