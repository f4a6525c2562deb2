use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::UserProfile;
use crate::error::{Error, Result};
use crate::lda::TopicModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicWeight {
    pub topic: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemTopics {
    pub item_id: String,
    pub theta: Vec<f64>,
}

/// Why a list was recommended: the topics it shares with the user's liked
/// items and the terms those topics put weight on (a word-cloud payload).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    /// Every topic with its mean share, heaviest first.
    pub prominent_topics: Vec<TopicWeight>,
    /// Heaviest terms of the topic mixture, heaviest first.
    pub term_weights: Vec<TermWeight>,
    /// θ of each recommended item, in recommendation order.
    pub per_item_theta: Vec<ItemTopics>,
}

/// Topics are weighted by their mean θ over the recommended items together
/// with every rated item of positive weight. Term weights are the topic
/// mixture `Σ_k weight_k · φ[k, ·]`, truncated to `top_terms`.
pub fn explain(items: &[String], profile: &UserProfile, model: &TopicModel, top_terms: usize) -> Result<Explanation> {
    if items.is_empty() {
        return Err(Error::Invalid("nothing to explain".into()));
    }
    let lookup = |id: &str| model.item_index(id).ok_or_else(|| Error::UnknownItem(id.to_string()));

    let mut pool = BTreeSet::new();
    for id in items {
        pool.insert(lookup(id)?);
    }
    for (id, w) in profile.weights() {
        if w > 0.0 {
            pool.insert(lookup(&id)?);
        }
    }

    let k = model.topics();
    let theta = model.theta();
    let mut mean = vec![0.0; k];
    for &d in &pool {
        for (t, m) in mean.iter_mut().enumerate() {
            *m += theta[[d, t]];
        }
    }
    mean.iter_mut().for_each(|m| *m /= pool.len() as f64);

    let mut prominent_topics: Vec<TopicWeight> = mean
        .iter()
        .enumerate()
        .map(|(topic, &weight)| TopicWeight { topic, weight })
        .collect();
    prominent_topics.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.topic.cmp(&b.topic)));

    let phi = model.phi();
    let terms = model.vocabulary().terms();
    let mut mixture: Vec<(usize, f64)> = (0..terms.len())
        .map(|w| (w, (0..k).map(|t| mean[t] * phi[[t, w]]).sum()))
        .collect();
    mixture.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    mixture.truncate(top_terms);
    let term_weights = mixture
        .into_iter()
        .map(|(w, weight)| TermWeight {
            term: terms[w].clone(),
            weight,
        })
        .collect();

    let per_item_theta = items
        .iter()
        .map(|id| {
            let d = lookup(id)?;
            Ok(ItemTopics {
                item_id: id.clone(),
                theta: theta.row(d).to_vec(),
            })
        })
        .collect::<Result<_>>()?;

    Ok(Explanation {
        prominent_topics,
        term_weights,
        per_item_theta,
    })
}
