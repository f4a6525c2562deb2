use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LdaHyperparams;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Per-document random stream: ChaCha8 keyed by the chain seed, with the
/// document's position in the corpus as the stream id. Each document draws
/// only from its own stream, both at initialization and in every sweep.
pub fn document_stream(seed: u64, doc: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(doc as u64);
    rng
}

/// Topic assignments and the count tables of a collapsed Gibbs chain.
#[derive(Debug, Clone)]
pub struct SamplerState {
    topics: usize,
    vocab_size: usize,
    assignments: Vec<Vec<u32>>,
    doc_topic: Vec<u32>,
    topic_word: Vec<u32>,
    topic_totals: Vec<u32>,
    streams: Vec<ChaCha8Rng>,
    weights: Vec<f64>,
}

impl SamplerState {
    /// Draws a uniform topic for every token position.
    pub fn init(corpus: &Corpus, hyper: &LdaHyperparams) -> Result<Self> {
        hyper.validate()?;
        if corpus.is_empty() {
            return Err(Error::Invalid("empty corpus".into()));
        }
        if hyper.topics > corpus.total_tokens() {
            log::warn!(
                "{} topics for only {} tokens; some topics will stay empty",
                hyper.topics,
                corpus.total_tokens()
            );
        }
        let k = hyper.topics;
        let v = corpus.vocabulary().len();
        let m = corpus.len();
        let mut state = SamplerState {
            topics: k,
            vocab_size: v,
            assignments: Vec::with_capacity(m),
            doc_topic: vec![0; m * k],
            topic_word: vec![0; k * v],
            topic_totals: vec![0; k],
            streams: (0..m).map(|d| document_stream(hyper.seed, d)).collect(),
            weights: vec![0.0; k],
        };
        for (d, doc) in corpus.documents().iter().enumerate() {
            let rng = &mut state.streams[d];
            let z: Vec<u32> = doc.tokens.iter().map(|_| rng.random_range(0..k as u32)).collect();
            for (&w, &t) in doc.tokens.iter().zip(&z) {
                state.doc_topic[d * k + t as usize] += 1;
                state.topic_word[t as usize * v + w as usize] += 1;
                state.topic_totals[t as usize] += 1;
            }
            state.assignments.push(z);
        }
        Ok(state)
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    /// Topic assignment of every token, per document.
    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.assignments
    }

    pub fn doc_topic(&self, d: usize, k: usize) -> u32 {
        self.doc_topic[d * self.topics + k]
    }

    pub fn topic_word(&self, k: usize, w: usize) -> u32 {
        self.topic_word[k * self.vocab_size + w]
    }

    pub fn topic_total(&self, k: usize) -> u32 {
        self.topic_totals[k]
    }

    /// One full pass over every token.
    pub fn sweep(&mut self, corpus: &Corpus, hyper: &LdaHyperparams) {
        self.sweep_observed(corpus, hyper, |_| {});
    }

    /// Like [`sweep`](Self::sweep), calling `after_token` once every token's
    /// counts have been restored.
    pub fn sweep_observed<F>(&mut self, corpus: &Corpus, hyper: &LdaHyperparams, mut after_token: F)
    where
        F: FnMut(&SamplerState),
    {
        let k = self.topics;
        let v = self.vocab_size;
        let alpha = hyper.alpha;
        let beta = hyper.beta;
        let v_beta = v as f64 * beta;

        for (d, doc) in corpus.documents().iter().enumerate() {
            for (n, &w) in doc.tokens.iter().enumerate() {
                let w = w as usize;
                let old = self.assignments[d][n] as usize;
                self.doc_topic[d * k + old] -= 1;
                self.topic_word[old * v + w] -= 1;
                self.topic_totals[old] -= 1;

                // p(z = t | rest) ∝ (n_dt + α)(n_tw + β) / (n_t + Vβ)
                let mut total = 0.0;
                for t in 0..k {
                    let p = (self.doc_topic[d * k + t] as f64 + alpha) * (self.topic_word[t * v + w] as f64 + beta)
                        / (self.topic_totals[t] as f64 + v_beta);
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.streams[d].random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][n] = new as u32;
                self.doc_topic[d * k + new] += 1;
                self.topic_word[new * v + w] += 1;
                self.topic_totals[new] += 1;
                after_token(self);
            }
        }
    }

    /// Recounts every table from the assignments and compares.
    pub fn check_invariants(&self, corpus: &Corpus) -> Result<()> {
        let k = self.topics;
        let v = self.vocab_size;
        let mut grand = 0u64;
        for (d, doc) in corpus.documents().iter().enumerate() {
            let row: u64 = (0..k).map(|t| self.doc_topic(d, t) as u64).sum();
            if row != doc.tokens.len() as u64 {
                return Err(Error::Invalid(format!(
                    "document {d}: topic counts sum to {row}, length {}",
                    doc.tokens.len()
                )));
            }
            if let Some(&z) = self.assignments[d].iter().find(|&&z| z as usize >= k) {
                return Err(Error::Invalid(format!("document {d}: assignment {z} out of range")));
            }
        }
        for t in 0..k {
            let row: u64 = (0..v).map(|w| self.topic_word(t, w) as u64).sum();
            if row != self.topic_totals[t] as u64 {
                return Err(Error::Invalid(format!(
                    "topic {t}: word counts sum to {row}, total {}",
                    self.topic_totals[t]
                )));
            }
            grand += row;
        }
        if grand != corpus.total_tokens() as u64 {
            return Err(Error::Invalid(format!(
                "topic totals sum to {grand}, corpus has {}",
                corpus.total_tokens()
            )));
        }
        Ok(())
    }

    /// Smoothed document–topic estimate, row-major M×K.
    pub(crate) fn theta(&self, corpus: &Corpus, alpha: f64) -> Vec<f64> {
        let k = self.topics;
        let mut out = Vec::with_capacity(corpus.len() * k);
        for (d, doc) in corpus.documents().iter().enumerate() {
            let denom = doc.tokens.len() as f64 + k as f64 * alpha;
            out.extend((0..k).map(|t| (self.doc_topic(d, t) as f64 + alpha) / denom));
        }
        out
    }

    /// Smoothed topic–word estimate, row-major K×V.
    pub(crate) fn phi(&self, beta: f64) -> Vec<f64> {
        let v = self.vocab_size;
        let mut out = Vec::with_capacity(self.topics * v);
        for t in 0..self.topics {
            let denom = self.topic_totals[t] as f64 + v as f64 * beta;
            out.extend((0..v).map(|w| (self.topic_word(t, w) as f64 + beta) / denom));
        }
        out
    }
}
