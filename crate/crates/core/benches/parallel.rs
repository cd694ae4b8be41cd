use std::hint::black_box;

use bwmd_core::cluster::{kmeans, KMeansConfig};
use bwmd_core::experiments::{synthetic_family_corpus, SyntheticConfig};
use bwmd_core::metric::{distance_matrix, embed_all, MetricKind};
use bwmd_core::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("serial", Execution::Serial),
    ("parallel", Execution::Parallel),
];

fn corpus() -> bwmd_core::corpus::Corpus {
    synthetic_family_corpus(&SyntheticConfig {
        classes: 8,
        per_class: 25,
        min_len: 2_000,
        max_len: 6_000,
        seed: 1,
    })
    .unwrap()
}

fn bench_embed(c: &mut Criterion) {
    let corpus = corpus();
    let seqs = corpus.sequences();
    let mut group = c.benchmark_group("embed_corpus");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| embed_all(black_box(&seqs), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_matrix(c: &mut Criterion) {
    let corpus = corpus();
    let seqs = corpus.sequences();
    let ids = corpus.ids();
    let mut group = c.benchmark_group("distance_matrix");
    group.sample_size(10);
    for kind in [MetricKind::Bwmd, MetricKind::Lzjd { sketch: None }] {
        for (name, exec) in MODES {
            group.bench_function(BenchmarkId::new(kind.name(), name), |b| {
                b.iter(|| distance_matrix(ids.clone(), black_box(&seqs), kind, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_kmeans(c: &mut Criterion) {
    let corpus = corpus();
    let points = embed_all(&corpus.sequences(), Execution::Parallel).unwrap();
    let mut group = c.benchmark_group("kmeans");
    group.sample_size(10);
    for (name, exec) in MODES {
        let config = KMeansConfig::new(40, 7).exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| kmeans(black_box(&points), &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_embed, bench_matrix, bench_kmeans);
criterion_main!(benches);
