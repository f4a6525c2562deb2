use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use topicrec::{
    build_similarity, coherence, rank, synthetic, topic_map, train, LdaHyperparams, SamplerState, UserProfile,
};

fn gibbs(c: &mut Criterion) {
    let (corpus, _) = synthetic::disjoint_topics(10, 50, 200, 100, 1);
    let hyper = LdaHyperparams::new(10);
    let state = SamplerState::init(&corpus, &hyper).unwrap();
    c.bench_function("gibbs sweep 20k tokens K=10", |b| {
        b.iter_batched_ref(|| state.clone(), |s| s.sweep(&corpus, &hyper), BatchSize::SmallInput)
    });
}

fn downstream(c: &mut Criterion) {
    let (corpus, _) = synthetic::disjoint_topics(10, 50, 500, 100, 2);
    let model = train(
        &corpus,
        &LdaHyperparams {
            iterations: 50,
            ..LdaHyperparams::new(10)
        },
    )
    .unwrap();
    c.bench_function("similarity 500 items", |b| {
        b.iter(|| build_similarity(black_box(&model)))
    });

    let sim = build_similarity(&model);
    let ids = model.item_ids();
    let profile = UserProfile::with_ratings("u", ids.iter().step_by(25).map(|id| (id.as_str(), 4))).unwrap();
    c.bench_function("rank top-10 of 500, 20 ratings", |b| {
        b.iter(|| rank(black_box(&profile), &sim, 10).unwrap())
    });

    c.bench_function("umass coherence K=10", |b| {
        b.iter(|| coherence(&model, &corpus, 10).unwrap())
    });
    c.bench_function("topic map K=10", |b| b.iter(|| topic_map(black_box(&model)).unwrap()));
}

criterion_group!(benches, gibbs, downstream);
criterion_main!(benches);
