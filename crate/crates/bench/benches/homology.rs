use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use relknot::chain::{smith_normal_form, sparse_invariants, SparseMatrix};
use relknot::{enumerate_colorings, ChainComplex, ColoringType, LabeledDiagram, PartialAlgebra, Theory};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn homology(c: &mut Criterion) {
    let alg = PartialAlgebra::parse(&fixture("ex3_19.alg")).unwrap();
    let mut group = c.benchmark_group("homology");
    group.sample_size(10);
    for (theory, top) in [(Theory::PartialQuandle, 6), (Theory::Quandle, 5)] {
        group.bench_with_input(BenchmarkId::new(theory.name(), top), &top, |b, &top| {
            b.iter(|| {
                let complex = ChainComplex::of_algebra(theory, &alg, top + 1).unwrap();
                black_box(complex.homology_all())
            })
        });
    }
    group.finish();
}

fn smith(c: &mut Criterion) {
    // a fixed pseudo-random 40x40 matrix
    let mut state = 0x2545_f491_u64;
    let m: Vec<Vec<i64>> = (0..40)
        .map(|_| {
            (0..40)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state % 7) as i64 - 3
                })
                .collect()
        })
        .collect();
    let sparse = SparseMatrix::from_dense(&m);
    c.bench_function("snf dense 40x40", |b| b.iter(|| black_box(smith_normal_form(&m))));
    c.bench_function("snf sparse 40x40", |b| b.iter(|| black_box(sparse_invariants(&sparse))));
}

fn colorings(c: &mut Criterion) {
    let alg = PartialAlgebra::parse(&fixture("ex3_19.alg")).unwrap();
    let ld = LabeledDiagram::parse(&fixture("hopf.pd")).unwrap();
    c.bench_function("colorings hopf", |b| {
        b.iter(|| black_box(enumerate_colorings(&ld, &alg, ColoringType::II).unwrap()))
    });
}

criterion_group!(benches, homology, smith, colorings);
criterion_main!(benches);
