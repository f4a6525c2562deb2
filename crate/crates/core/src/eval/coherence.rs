use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lda::{train, HyperTemplate, TopicModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoherenceVariant {
    Umass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub per_topic: Vec<f64>,
    pub mean: f64,
    pub top_n: usize,
    pub variant: CoherenceVariant,
}

/// Sorted ids of the documents containing each term.
fn document_sets(corpus: &Corpus) -> Vec<Vec<u32>> {
    let mut sets = vec![Vec::new(); corpus.vocabulary().len()];
    for (d, doc) in corpus.documents().iter().enumerate() {
        for &w in &doc.tokens {
            let set: &mut Vec<u32> = &mut sets[w as usize];
            if set.last() != Some(&(d as u32)) {
                set.push(d as u32);
            }
        }
    }
    sets
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// UMass coherence of each topic's `top_n` words:
/// `Σ_{i<j} ln((D(w_i, w_j) + 1) / D(w_j))`, words ordered by φ so that
/// `w_j` is the less probable word of each pair, with document frequencies
/// `D` taken from the training corpus.
pub fn coherence(model: &TopicModel, corpus: &Corpus, top_n: usize) -> Result<CoherenceReport> {
    if top_n < 2 {
        return Err(Error::Invalid("coherence needs at least two words per topic".into()));
    }
    if model.vocabulary() != corpus.vocabulary() {
        return Err(Error::Invalid("model and corpus vocabularies differ".into()));
    }
    let sets = document_sets(corpus);
    let per_topic = (0..model.topics())
        .map(|k| {
            let words = model.top_word_ids(k, top_n)?;
            let mut score = 0.0;
            for (i, &wi) in words.iter().enumerate() {
                for &wj in &words[i + 1..] {
                    let joint = intersection_len(&sets[wi], &sets[wj]);
                    score += ((joint as f64 + 1.0) / sets[wj].len() as f64).ln();
                }
            }
            Ok(score)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    Ok(CoherenceReport {
        per_topic,
        mean,
        top_n,
        variant: CoherenceVariant::Umass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub topics: usize,
    pub mean_coherence: f64,
    pub report: CoherenceReport,
}

/// Trains one model per topic count, the i-th with seed `template.seed + i`,
/// and scores each. Models are trained in parallel; the result is in
/// `k_values` order and independent of scheduling.
pub fn coherence_sweep(
    corpus: &Corpus,
    k_values: &[usize],
    template: &HyperTemplate,
    top_n: usize,
) -> Result<Vec<SweepRow>> {
    if k_values.is_empty() {
        return Err(Error::Invalid("no topic counts to sweep".into()));
    }
    if let Some(&k) = k_values.iter().find(|&&k| k < 2) {
        return Err(Error::InvalidHyperparams(format!(
            "sweep topic counts must be at least 2, got {k}"
        )));
    }
    k_values
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut hyper = template.for_topics(k);
            hyper.seed = template.seed.wrapping_add(i as u64);
            let model = train(corpus, &hyper)?;
            let report = coherence(&model, corpus, top_n)?;
            Ok(SweepRow {
                topics: k,
                mean_coherence: report.mean,
                report,
            })
        })
        .collect()
}

/// `K,mean_coherence` table with a header row.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("K,mean_coherence\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", r.topics, r.mean_coherence));
    }
    out
}
