//! Model-selection diagnostics: topic coherence and the inter-topic map.

mod coherence;
mod topic_map;

pub use coherence::{coherence, coherence_sweep, sweep_csv, CoherenceReport, CoherenceVariant, SweepRow};
pub use topic_map::{classical_mds, js_divergence, js_matrix, topic_map, TopicMap};
