//! Oracle sweep over a batch of divisors on the blown-up plane, on the full
//! rayon pool and on a single worker thread.

use blowup_coh::blowup::Catalog;
use blowup_coh::divisor::{build_divisor, DivisorSpec};
use blowup_coh::{oracle, par, Field};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn batch() -> Vec<DivisorSpec> {
    let mut out = Vec::new();
    for a1 in -2..=1 {
        for a2 in -2..=1 {
            for n1 in -1..=0 {
                for m1 in -1..=0 {
                    out.push(DivisorSpec::new(vec![a1, a2], vec![n1, 0], vec![m1, 0]).unwrap());
                }
            }
        }
    }
    out
}

fn sweep(f: &Field, cat: &Catalog, specs: Vec<DivisorSpec>) -> i64 {
    par::map(specs, |spec| {
        let class = oracle::pic_class(&build_divisor(&spec, cat).unwrap(), f).unwrap();
        let (h0, h1, h2) = oracle::h_all(&class, f).unwrap();
        h0 + h1 + h2
    })
    .into_iter()
    .sum()
}

fn oracle_sweep(c: &mut Criterion) {
    let f = Field::new(3).unwrap();
    let cat = Catalog::new(&f, 2);
    let specs = batch();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", specs.len()), |b| b.iter(|| sweep(&f, &cat, specs.clone())));
    group.bench_function(BenchmarkId::new("sequential", specs.len()), |b| {
        b.iter(|| single.install(|| sweep(&f, &cat, specs.clone())))
    });
    group.finish();
}

criterion_group!(benches, oracle_sweep);
criterion_main!(benches);
