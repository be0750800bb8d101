use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tamex_core::similarity::encode_entries;
use tamex_core::*;

const ENDINGS: &[(&str, TamCategory)] = &[
    ("だ", TamCategory::Present),
    ("した", TamCategory::Past),
    ("している", TamCategory::PresentProgressive),
    ("したことがある", TamCategory::PresentPerfect),
    ("するだろう", TamCategory::Will),
    ("しなさい", TamCategory::Imperative),
    ("できる", TamCategory::Can),
    ("しなければならない", TamCategory::HaveTo),
];

fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let stems = [
        '彼', '私', '駅', '本', '雨', '山', '学', '校', '友', '達', 'を', 'に', 'は', 'が',
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(String, &str, TamCategory)> = (0..n)
        .map(|_| {
            let len = rng.random_range(3..12);
            let mut s: String = (0..len).map(|_| stems[rng.random_range(0..stems.len())]).collect();
            let (ending, label) = ENDINGS[rng.random_range(0..ENDINGS.len())];
            s.push_str(ending);
            (s, "", label)
        })
        .collect();
    Corpus::from_records(rows, "bench").unwrap()
}

fn loo(c: &mut Criterion) {
    let mut group = c.benchmark_group("loo");
    group.sample_size(10);
    for n in [500, 2000] {
        let corpus = synthetic_corpus(n, 1);
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &corpus, |b, corpus| {
                b.iter(|| evaluate_loo(corpus, &Encoder::Raw, KnnConfig::new(5), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn retrieve(c: &mut Criterion) {
    let mut group = c.benchmark_group("retrieve");
    for n in [500, 5000] {
        let corpus = synthetic_corpus(n, 2);
        let entries = encode_entries(&corpus, &Encoder::Raw, |_| true).unwrap();
        let index = build_index(&corpus, &Encoder::Raw).unwrap();
        let query = Encoder::Raw.encode("彼は駅に友達を学校したことがある").unwrap();
        group.bench_with_input(BenchmarkId::new("indexed", n), &query, |b, q| {
            b.iter(|| index.retrieve(black_box(q), MAX_NEIGHBORS, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("naive", n), &query, |b, q| {
            b.iter(|| naive_retrieve(Method::Raw, &entries, black_box(q), MAX_NEIGHBORS, None).unwrap())
        });
    }
    group.finish();
}

fn build(c: &mut Criterion) {
    let corpus = synthetic_corpus(5000, 3);
    c.bench_function("build_index/5000", |b| {
        b.iter(|| build_index(black_box(&corpus), &Encoder::Raw).unwrap())
    });
}

criterion_group!(benches, loo, retrieve, build);
criterion_main!(benches);
