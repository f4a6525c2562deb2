//! Topic-model driven content-based recommendation.
//!
//! Item descriptions are turned into a bag-of-words corpus ([`corpus`]), an LDA
//! model is fitted with collapsed Gibbs sampling ([`lda`]), items are compared
//! through their topic mixtures and ranked for a user from Likert ratings
//! ([`recsys`]), and every recommendation carries the topics and terms that
//! drove it. [`eval`] holds model-selection diagnostics and [`baseline`] a
//! dense-feature arm that reuses the same ranking path.

pub mod baseline;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lda;
pub mod persist;
pub mod recsys;
pub mod synthetic;

pub use baseline::{build_similarity_from_features, load_features, FeatureFormat, FeatureTable};
pub use corpus::{
    build_corpus, build_document, load_items, preprocess, BigramConfig, Corpus, ItemFormat, ItemRecord,
    PreprocessConfig, StopWords, Vocabulary,
};
pub use error::{Error, Result};
pub use eval::{coherence, coherence_sweep, topic_map, CoherenceReport, SweepRow, TopicMap};
pub use lda::{train, HyperTemplate, LdaHyperparams, SamplerState, TopicModel};
pub use persist::ModelFile;
pub use recsys::{
    build_similarity, explain, likert_to_weight, mean_pairwise_similarity, rank, recommend, recommend_with_terms,
    score, Explanation, Recommendation, ScoredItem, SimilarityBounds, SimilarityMatrix, UserProfile, DEFAULT_TOP_TERMS,
};
