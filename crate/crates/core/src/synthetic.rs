//! Corpora drawn from known topics, for recovery checks and benchmarks.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;

/// Term `w` of generating topic `t`, e.g. `tpcb_w07`.
pub fn term(topic: usize, word: usize) -> String {
    let letter = |i: usize| char::from(b'a' + (i % 26) as u8);
    format!("tpc{}{}_w{word:02}", letter(topic / 26), letter(topic))
}

/// A corpus whose documents each draw every token from a single generating
/// topic. Within a topic, word `i` has probability proportional to
/// `1 / (i + 1)` (Zipf, exponent 1). Topics have disjoint
/// vocabularies of `words_per_topic` terms; document `d` belongs to topic
/// `d % topics`. Returns the corpus and each document's generating topic,
/// aligned with the corpus document order.
pub fn disjoint_topics(
    topics: usize,
    words_per_topic: usize,
    docs: usize,
    doc_len: usize,
    seed: u64,
) -> (Corpus, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf =
        WeightedIndex::new((0..words_per_topic).map(|i| 1.0 / (i + 1) as f64)).expect("at least one word per topic");
    let raw: Vec<(String, Vec<String>)> = (0..docs)
        .map(|d| {
            let t = d % topics;
            let tokens = (0..doc_len).map(|_| term(t, zipf.sample(&mut rng))).collect();
            (format!("doc{d:05}"), tokens)
        })
        .collect();
    let corpus = Corpus::from_token_documents(raw).expect("non-empty synthetic documents");
    let truth = corpus
        .documents()
        .iter()
        .map(|doc| doc.item_id[3..].parse::<usize>().unwrap() % topics)
        .collect();
    (corpus, truth)
}

/// Generating probability of each word index within a topic.
pub fn word_weights(words_per_topic: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..words_per_topic).map(|i| 1.0 / (i + 1) as f64).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
