//! Preference expansion over an item similarity matrix.
//!
//! A user's ratings become weights `w_j ∈ [0, 1]`; every unrated item `p` is
//! scored as `S(p) = (1/N) Σ_j w_j · sim(p, p_j)` over the `N` rated items,
//! and the top `k` by descending score (ascending item id on ties) are
//! returned with an [`Explanation`].

mod explain;
mod profile;
mod similarity;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::TopicModel;

pub use explain::{explain, Explanation, ItemTopics, TermWeight, TopicWeight};
pub use profile::{likert_to_weight, UserProfile};
pub use similarity::{build_similarity, mean_pairwise_similarity, SimilarityBounds, SimilarityMatrix};

/// Number of terms carried in an explanation unless asked otherwise.
pub const DEFAULT_TOP_TERMS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub ranked: Vec<ScoredItem>,
    pub k: usize,
    pub explanation: Explanation,
}

fn resolve(weights: &[(String, f64)], sim: &SimilarityMatrix) -> Result<Vec<(usize, f64)>> {
    if weights.is_empty() {
        return Err(Error::EmptyProfile);
    }
    weights
        .iter()
        .map(|(id, w)| {
            sim.index_of(id)
                .map(|j| (j, *w))
                .ok_or_else(|| Error::UnknownItem(id.clone()))
        })
        .collect()
}

fn score_row(i: usize, weights: &[(usize, f64)], sim: &SimilarityMatrix) -> f64 {
    let total: f64 = weights.iter().map(|&(j, w)| w * sim.get(i, j)).sum();
    total / weights.len() as f64
}

/// Score of one item for explicit `(item_id, weight)` preferences.
pub fn score_weighted(item: &str, weights: &[(String, f64)], sim: &SimilarityMatrix) -> Result<f64> {
    let i = sim.index_of(item).ok_or_else(|| Error::UnknownItem(item.to_string()))?;
    Ok(score_row(i, &resolve(weights, sim)?, sim))
}

pub fn score(item: &str, profile: &UserProfile, sim: &SimilarityMatrix) -> Result<f64> {
    score_weighted(item, &profile.weights(), sim)
}

/// Scores every item not in `weights`, sorts by descending score with
/// ascending item id on ties, and keeps the first `k`.
pub fn rank_weighted(weights: &[(String, f64)], sim: &SimilarityMatrix, k: usize) -> Result<Vec<ScoredItem>> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let resolved = resolve(weights, sim)?;
    let rated: HashSet<usize> = resolved.iter().map(|&(j, _)| j).collect();
    if rated.len() == sim.len() {
        return Err(Error::NothingToRecommend);
    }
    let ids = sim.item_ids();
    let mut scored: Vec<ScoredItem> = (0..sim.len())
        .filter(|i| !rated.contains(i))
        .map(|i| ScoredItem {
            item_id: ids[i].clone(),
            score: score_row(i, &resolved, sim),
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.item_id.cmp(&b.item_id)));
    scored.truncate(k);
    Ok(scored)
}

pub fn rank(profile: &UserProfile, sim: &SimilarityMatrix, k: usize) -> Result<Vec<ScoredItem>> {
    rank_weighted(&profile.weights(), sim, k)
}

/// Ranks with `sim` and explains the result through `model`. Either arm's
/// matrix can be passed; the explanation always comes from the topic model.
pub fn recommend(
    profile: &UserProfile,
    sim: &SimilarityMatrix,
    model: &TopicModel,
    k: usize,
) -> Result<Recommendation> {
    recommend_with_terms(profile, sim, model, k, DEFAULT_TOP_TERMS)
}

pub fn recommend_with_terms(
    profile: &UserProfile,
    sim: &SimilarityMatrix,
    model: &TopicModel,
    k: usize,
    top_terms: usize,
) -> Result<Recommendation> {
    let ranked = rank(profile, sim, k)?;
    let items: Vec<String> = ranked.iter().map(|s| s.item_id.clone()).collect();
    let explanation = explain(&items, profile, model, top_terms)?;
    Ok(Recommendation { ranked, k, explanation })
}

#[cfg(test)]
mod tests {
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    use super::*;
    use crate::corpus::Vocabulary;
    use crate::lda::LdaHyperparams;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i:02}")).collect()
    }

    fn matrix(rows: &Array2<f64>) -> SimilarityMatrix {
        SimilarityMatrix::from_vectors(ids(rows.nrows()), rows.view(), SimilarityBounds::Unit).unwrap()
    }

    fn sample_rows() -> Array2<f64> {
        array![
            [0.70, 0.10, 0.10, 0.10],
            [0.60, 0.20, 0.10, 0.10],
            [0.10, 0.70, 0.10, 0.10],
            [0.10, 0.10, 0.70, 0.10],
            [0.25, 0.25, 0.25, 0.25],
            [0.10, 0.10, 0.10, 0.70],
        ]
    }

    fn model_from(theta: Array2<f64>, phi: Array2<f64>, terms: &[&str]) -> TopicModel {
        let (m, k) = theta.dim();
        TopicModel::from_parts(
            LdaHyperparams::new(k),
            Vocabulary::from_terms(terms.iter().copied()),
            ids(m),
            vec![10; m],
            theta,
            phi,
        )
        .unwrap()
    }

    #[test]
    fn single_full_rating_reduces_to_similarity() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", [("p00", 5)]).unwrap();
        for i in 0..6 {
            let id = format!("p{i:02}");
            assert_eq!(score(&id, &p, &sim).unwrap(), sim.get(i, 0));
        }
    }

    #[test]
    fn all_ones_score_zero() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", [("p00", 1), ("p03", 1)]).unwrap();
        for r in rank(&p, &sim, 10).unwrap() {
            assert_eq!(r.score, 0.0);
        }
    }

    #[test]
    fn mixed_ratings_match_hand_average() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", [("p00", 5), ("p02", 3), ("p05", 2)]).unwrap();
        let expected = (1.0 * sim.get(4, 0) + 0.5 * sim.get(4, 2) + 0.25 * sim.get(4, 5)) / 3.0;
        assert!((score("p04", &p, &sim).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn unknown_items_rejected() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", [("p00", 5)]).unwrap();
        assert!(matches!(score("nope", &p, &sim), Err(Error::UnknownItem(_))));
        let q = UserProfile::with_ratings("u", [("ghost", 5)]).unwrap();
        assert!(matches!(rank(&q, &sim, 3), Err(Error::UnknownItem(id)) if id == "ghost"));
        assert!(matches!(
            rank(&UserProfile::new("u"), &sim, 3),
            Err(Error::EmptyProfile)
        ));
    }

    #[test]
    fn large_k_returns_every_unrated_item() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", [("p00", 4), ("p03", 2)]).unwrap();
        let r = rank(&p, &sim, 100).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|s| s.item_id != "p00" && s.item_id != "p03"));
        assert!(r.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn ties_break_on_item_id() {
        let rows = array![[1.0, 0.0], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]];
        let sim = SimilarityMatrix::from_vectors(
            vec!["z".into(), "c".into(), "a".into(), "b".into()],
            rows.view(),
            SimilarityBounds::Unit,
        )
        .unwrap();
        let p = UserProfile::with_ratings("u", [("z", 5)]).unwrap();
        let order: Vec<_> = rank(&p, &sim, 3).unwrap().into_iter().map(|s| s.item_id).collect();
        assert_eq!(order, vec!["a", "b", "c"]);
    }

    #[test]
    fn everything_rated_is_an_error() {
        let sim = matrix(&sample_rows());
        let p = UserProfile::with_ratings("u", ids(6).into_iter().map(|id| (id, 3))).unwrap();
        assert!(matches!(rank(&p, &sim, 3), Err(Error::NothingToRecommend)));
        assert!(rank(&UserProfile::with_ratings("u", [("p00", 3)]).unwrap(), &sim, 0).is_err());
    }

    #[test]
    fn dominant_topic_leads_explanation() {
        let theta = array![[0.7, 0.1, 0.1, 0.1], [0.1, 0.1, 0.1, 0.7], [0.25, 0.25, 0.25, 0.25]];
        let phi = array![
            [0.4, 0.3, 0.1, 0.1, 0.1],
            [0.1, 0.1, 0.6, 0.1, 0.1],
            [0.1, 0.1, 0.1, 0.6, 0.1],
            [0.1, 0.1, 0.1, 0.1, 0.6],
        ];
        let m = model_from(theta, phi.clone(), &["altar", "christ", "river", "rose", "venus"]);
        let p = UserProfile::with_ratings("u", [("p01", 1)]).unwrap();
        let e = explain(&["p00".to_string()], &p, &m, 3).unwrap();
        assert_eq!(e.prominent_topics[0].topic, 0);
        assert!((e.prominent_topics[0].weight - 0.7).abs() < 1e-12);
        assert_eq!(e.per_item_theta.len(), 1);

        // Brute-force mixture argmax.
        let mix: Vec<f64> = (0..5)
            .map(|w| {
                [0.7, 0.1, 0.1, 0.1]
                    .iter()
                    .enumerate()
                    .map(|(t, a)| a * phi[[t, w]])
                    .sum()
            })
            .collect();
        let best = (0..5).max_by(|&a, &b| mix[a].total_cmp(&mix[b])).unwrap();
        assert_eq!(e.term_weights[0].term, m.vocabulary().terms()[best]);
        assert!((e.term_weights[0].weight - mix[best]).abs() < 1e-12);
        assert_eq!(e.term_weights.len(), 3);
    }

    #[test]
    fn positively_rated_items_join_explanation_pool() {
        let theta = array![[0.7, 0.3], [0.1, 0.9], [0.5, 0.5]];
        let phi = array![[0.9, 0.1], [0.1, 0.9]];
        let m = model_from(theta, phi, &["aaa", "bbb"]);
        let p = UserProfile::with_ratings("u", [("p01", 5)]).unwrap();
        let e = explain(&["p00".to_string()], &p, &m, 2).unwrap();
        assert_eq!(e.prominent_topics[0].topic, 1);
        assert!((e.prominent_topics[0].weight - 0.6).abs() < 1e-12);
    }

    #[test]
    fn single_topic_explanation() {
        let m = model_from(array![[1.0], [1.0]], array![[0.5, 0.5]], &["aaa", "bbb"]);
        let p = UserProfile::with_ratings("u", [("p01", 5)]).unwrap();
        let e = explain(&["p00".to_string()], &p, &m, 5).unwrap();
        assert_eq!(e.prominent_topics, vec![TopicWeight { topic: 0, weight: 1.0 }]);
    }

    fn arb_rows() -> impl Strategy<Value = Array2<f64>> {
        (2usize..4, 3usize..9).prop_flat_map(|(k, m)| {
            prop::collection::vec(0.01f64..1.0, m * k).prop_map(move |v| Array2::from_shape_vec((m, k), v).unwrap())
        })
    }

    fn arb_case() -> impl Strategy<Value = (Array2<f64>, Vec<Option<i64>>)> {
        arb_rows()
            .prop_flat_map(|rows| {
                let m = rows.nrows();
                (Just(rows), prop::collection::vec(prop::option::of(1i64..=5), m))
            })
            .prop_filter("needs a rating and an unrated item", |(_, r)| {
                r.iter().any(Option::is_some) && r.iter().any(Option::is_none)
            })
    }

    fn profile(ratings: &[Option<i64>]) -> UserProfile {
        let items = ratings
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (format!("p{i:02}"), r)));
        UserProfile::with_ratings("u", items).unwrap()
    }

    proptest! {
        #[test]
        fn scores_bounded_by_max_weight((rows, ratings) in arb_case()) {
            let sim = matrix(&rows);
            let p = profile(&ratings);
            let max_w = p.weights().iter().map(|(_, w)| *w).fold(0.0, f64::max);
            for id in sim.item_ids() {
                let s = score(id, &p, &sim).unwrap();
                prop_assert!((0.0..=max_w + 1e-15).contains(&s));
            }
        }

        #[test]
        fn raising_a_rating_never_lowers_scores((rows, ratings) in arb_case(), pick in any::<prop::sample::Index>()) {
            let sim = matrix(&rows);
            let rated: Vec<usize> = ratings.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| i).collect();
            let j = rated[pick.index(rated.len())];
            prop_assume!(ratings[j] != Some(5));
            let mut up = ratings.clone();
            up[j] = Some(ratings[j].unwrap() + 1);
            let (before, after) = (profile(&ratings), profile(&up));
            for (i, id) in sim.item_ids().iter().enumerate() {
                let (s0, s1) = (score(id, &before, &sim).unwrap(), score(id, &after, &sim).unwrap());
                prop_assert!(s1 >= s0);
                if sim.get(i, j) > 0.0 {
                    prop_assert!(s1 > s0);
                }
            }
        }

        #[test]
        fn scaling_weights_scales_scores((rows, ratings) in arb_case(), c in 0.1f64..10.0) {
            let sim = matrix(&rows);
            let w = profile(&ratings).weights();
            let scaled: Vec<(String, f64)> = w.iter().map(|(id, x)| (id.clone(), x * c)).collect();
            let a = rank_weighted(&w, &sim, 100).unwrap();
            let b = rank_weighted(&scaled, &sim, 100).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.score * c - y.score).abs() <= 1e-12 * c.max(1.0));
            }
            let all_distinct = a.windows(2).all(|p| (p[0].score - p[1].score).abs() > 1e-9);
            if all_distinct {
                let ia: Vec<_> = a.iter().map(|s| &s.item_id).collect();
                let ib: Vec<_> = b.iter().map(|s| &s.item_id).collect();
                prop_assert_eq!(ia, ib);
            }
        }

        #[test]
        fn rated_items_never_recommended((rows, ratings) in arb_case(), k in 1usize..10) {
            let sim = matrix(&rows);
            let p = profile(&ratings);
            let r = rank(&p, &sim, k).unwrap();
            prop_assert_eq!(r.len(), k.min(sim.len() - p.len()));
            for s in &r {
                prop_assert!(p.rating(&s.item_id).is_none());
            }
        }

        #[test]
        fn row_and_column_scores_agree((rows, ratings) in arb_case()) {
            let sim = matrix(&rows);
            let p = profile(&ratings);
            let n = p.len() as f64;
            for (i, id) in sim.item_ids().iter().enumerate() {
                let by_col: f64 = p.weights().iter().map(|(j, w)| w * sim.get(sim.index_of(j).unwrap(), i)).sum::<f64>() / n;
                prop_assert_eq!(score(id, &p, &sim).unwrap(), by_col);
            }
        }
    }
}
