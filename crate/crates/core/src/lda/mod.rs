//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

mod sampler;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};

pub use sampler::{document_stream, SamplerState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaHyperparams {
    pub topics: usize,
    /// Symmetric document–topic prior.
    pub alpha: f64,
    /// Symmetric topic–word prior.
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Average the θ/φ estimates over the sweeps after burn-in instead of
    /// reading them off the final state.
    #[serde(default)]
    pub average: bool,
}

impl LdaHyperparams {
    /// Defaults: α = 50/K, β = 0.01, 1000 sweeps, no burn-in, seed 0.
    pub fn new(topics: usize) -> Self {
        LdaHyperparams {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 0,
            seed: 0,
            average: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperparams(m));
        if self.topics == 0 {
            return bad("topic count must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.iterations <= self.burn_in {
            return bad(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            ));
        }
        Ok(())
    }
}

/// Hyperparameters with the topic count left open, for sweeps over K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperTemplate {
    /// `None` means 50/K.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub average: bool,
}

impl Default for HyperTemplate {
    fn default() -> Self {
        let d = LdaHyperparams::new(1);
        HyperTemplate {
            alpha: None,
            beta: d.beta,
            iterations: d.iterations,
            burn_in: d.burn_in,
            seed: d.seed,
            average: d.average,
        }
    }
}

impl HyperTemplate {
    pub fn for_topics(&self, topics: usize) -> LdaHyperparams {
        let mut h = LdaHyperparams::new(topics);
        if let Some(a) = self.alpha {
            h.alpha = a;
        }
        h.beta = self.beta;
        h.iterations = self.iterations;
        h.burn_in = self.burn_in;
        h.seed = self.seed;
        h.average = self.average;
        h
    }
}

/// A fitted model: θ (documents × topics) and φ (topics × terms).
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub(crate) hyper: LdaHyperparams,
    pub(crate) vocabulary: Vocabulary,
    pub(crate) item_ids: Vec<String>,
    pub(crate) doc_lengths: Vec<u64>,
    pub(crate) theta: Array2<f64>,
    pub(crate) phi: Array2<f64>,
}

impl TopicModel {
    /// Assembles a model from its parts, checking shapes and row sums.
    pub fn from_parts(
        hyper: LdaHyperparams,
        vocabulary: Vocabulary,
        item_ids: Vec<String>,
        doc_lengths: Vec<u64>,
        theta: Array2<f64>,
        phi: Array2<f64>,
    ) -> Result<Self> {
        let (m, k, v) = (item_ids.len(), hyper.topics, vocabulary.len());
        if theta.dim() != (m, k) {
            return Err(Error::Format(format!(
                "theta is {:?}, expected ({m}, {k})",
                theta.dim()
            )));
        }
        if phi.dim() != (k, v) {
            return Err(Error::Format(format!("phi is {:?}, expected ({k}, {v})", phi.dim())));
        }
        if item_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("item ids must be strictly increasing".into()));
        }
        if doc_lengths.len() != m {
            return Err(Error::Format("document lengths do not match item ids".into()));
        }
        for (name, mat) in [("theta", &theta), ("phi", &phi)] {
            for (i, row) in mat.rows().into_iter().enumerate() {
                let s: f64 = row.sum();
                if (s - 1.0).abs() > 1e-9 || row.iter().any(|&x| x.is_nan() || x <= 0.0) {
                    return Err(Error::Format(format!("{name} row {i} is not a positive distribution")));
                }
            }
        }
        Ok(TopicModel {
            hyper,
            vocabulary,
            item_ids,
            doc_lengths,
            theta,
            phi,
        })
    }

    pub fn hyper(&self) -> &LdaHyperparams {
        &self.hyper
    }

    pub fn topics(&self) -> usize {
        self.hyper.topics
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn item_index(&self, item_id: &str) -> Option<usize> {
        self.item_ids.binary_search_by(|probe| probe.as_str().cmp(item_id)).ok()
    }

    /// Token count of every training document.
    pub fn doc_lengths(&self) -> &[u64] {
        &self.doc_lengths
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn phi(&self) -> &Array2<f64> {
        &self.phi
    }

    /// The `n` most probable terms of topic `k`, ties broken by term order.
    pub fn top_words(&self, k: usize, n: usize) -> Result<Vec<(String, f64)>> {
        Ok(self
            .top_word_ids(k, n)?
            .into_iter()
            .map(|w| (self.vocabulary.terms()[w].clone(), self.phi[[k, w]]))
            .collect())
    }

    pub(crate) fn top_word_ids(&self, k: usize, n: usize) -> Result<Vec<usize>> {
        if k >= self.topics() {
            return Err(Error::TopicOutOfRange {
                topic: k,
                topics: self.topics(),
            });
        }
        let row = self.phi.row(k);
        let mut ids: Vec<usize> = (0..self.vocabulary.len()).collect();
        // Vocabulary ids follow lexicographic term order.
        ids.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        ids.truncate(n);
        Ok(ids)
    }

    /// Fold-in: Gibbs sampling of a new document's topics with φ held fixed.
    /// Token ids outside the vocabulary are dropped. The returned estimate
    /// is the smoothed θ averaged over the second half of the sweeps.
    pub fn infer_theta(&self, tokens: &[u32], sweeps: usize, seed: u64) -> Result<Vec<f64>> {
        let v = self.vocabulary.len() as u32;
        let tokens: Vec<usize> = tokens.iter().filter(|&&t| t < v).map(|&t| t as usize).collect();
        if tokens.is_empty() {
            return Err(Error::NoKnownTokens);
        }
        let k = self.topics();
        let alpha = self.hyper.alpha;
        let sweeps = sweeps.max(1);
        let mut rng = document_stream(seed, 0);

        let mut z: Vec<usize> = tokens.iter().map(|_| rng.random_range(0..k)).collect();
        let mut counts = vec![0u64; k];
        for &t in &z {
            counts[t] += 1;
        }

        let denom = tokens.len() as f64 + k as f64 * alpha;
        let keep_from = sweeps / 2;
        let mut acc = vec![0.0; k];
        let mut kept = 0usize;
        let mut cumulative = vec![0.0; k];
        for s in 0..sweeps {
            for (n, &w) in tokens.iter().enumerate() {
                counts[z[n]] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    total += (counts[t] as f64 + alpha) * self.phi[[t, w]];
                    cumulative[t] = total;
                }
                let u = rng.random::<f64>() * total;
                let new = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
                z[n] = new;
                counts[new] += 1;
            }
            if s >= keep_from {
                for t in 0..k {
                    acc[t] += (counts[t] as f64 + alpha) / denom;
                }
                kept += 1;
            }
        }
        Ok(acc.into_iter().map(|x| x / kept as f64).collect())
    }
}

/// Runs `iterations` Gibbs sweeps from a uniform random start and estimates
/// θ[d,k] = (n_dk + α) / (len(d) + Kα) and φ[k,w] = (n_kw + β) / (n_k + Vβ).
pub fn train(corpus: &Corpus, hyper: &LdaHyperparams) -> Result<TopicModel> {
    let mut state = SamplerState::init(corpus, hyper)?;
    let (m, k, v) = (corpus.len(), hyper.topics, corpus.vocabulary().len());

    let (theta, phi) = if hyper.average {
        let mut theta_acc = vec![0.0; m * k];
        let mut phi_acc = vec![0.0; k * v];
        let mut kept = 0usize;
        for sweep in 1..=hyper.iterations {
            state.sweep(corpus, hyper);
            if sweep > hyper.burn_in {
                add_into(&mut theta_acc, &state.theta(corpus, hyper.alpha));
                add_into(&mut phi_acc, &state.phi(hyper.beta));
                kept += 1;
            }
        }
        let scale = |mut acc: Vec<f64>| {
            acc.iter_mut().for_each(|x| *x /= kept as f64);
            acc
        };
        (scale(theta_acc), scale(phi_acc))
    } else {
        for _ in 0..hyper.iterations {
            state.sweep(corpus, hyper);
        }
        (state.theta(corpus, hyper.alpha), state.phi(hyper.beta))
    };

    Ok(TopicModel {
        hyper: *hyper,
        vocabulary: corpus.vocabulary().clone(),
        item_ids: corpus.item_ids(),
        doc_lengths: corpus.documents().iter().map(|d| d.tokens.len() as u64).collect(),
        theta: Array2::from_shape_vec((m, k), theta).expect("theta shape"),
        phi: Array2::from_shape_vec((k, v), phi).expect("phi shape"),
    })
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
}
