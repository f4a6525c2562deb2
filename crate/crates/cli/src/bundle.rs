//! Everything the service needs, loaded once and shared read-only.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use topicrec::corpus::ItemFormat;
use topicrec::{
    build_similarity, build_similarity_from_features, load_features, load_items, topic_map, CoherenceReport,
    FeatureFormat, ItemRecord, ModelFile, SimilarityMatrix, TopicMap, TopicModel,
};

#[derive(Debug, Clone)]
pub struct BundlePaths {
    pub model: PathBuf,
    pub items: PathBuf,
    pub features: Option<PathBuf>,
    pub coherence: Option<PathBuf>,
}

#[derive(Debug)]
pub struct EngineBundle {
    /// Sorted by item id, matching the model's row order.
    items: Vec<ItemRecord>,
    model: TopicModel,
    lda_similarity: SimilarityMatrix,
    feature_similarity: Option<SimilarityMatrix>,
    topic_map: Option<TopicMap>,
    coherence: Option<CoherenceReport>,
}

impl EngineBundle {
    pub fn new(
        mut items: Vec<ItemRecord>,
        model_file: ModelFile,
        feature_similarity: Option<SimilarityMatrix>,
        coherence: Option<CoherenceReport>,
    ) -> Result<Self> {
        items.sort_by(|a, b| a.item_id.cmp(&b.item_id));
        let ModelFile { model, similarity } = model_file;
        if !items.iter().map(|i| &i.item_id).eq(model.item_ids()) {
            bail!("item file and model describe different collections");
        }
        let lda_similarity = similarity.unwrap_or_else(|| build_similarity(&model));
        if lda_similarity.item_ids() != model.item_ids() {
            bail!("stored similarity matrix does not match the model's items");
        }
        if let Some(f) = &feature_similarity {
            if f.item_ids() != model.item_ids() {
                bail!("feature similarity does not match the model's items");
            }
        }
        if let Some(c) = &coherence {
            if c.per_topic.len() != model.topics() {
                bail!(
                    "coherence report has {} topics, model has {}",
                    c.per_topic.len(),
                    model.topics()
                );
            }
        }
        let topic_map = (model.topics() >= 2).then(|| topic_map(&model)).transpose()?;
        Ok(EngineBundle {
            items,
            model,
            lda_similarity,
            feature_similarity,
            topic_map,
            coherence,
        })
    }

    pub fn load(paths: &BundlePaths) -> Result<Self> {
        let model_file = ModelFile::load(&paths.model)?;
        let items = load_items(&paths.items, ItemFormat::from_path(&paths.items))?;
        let features = match &paths.features {
            Some(p) => {
                let table = load_features(p, FeatureFormat::from_path(p), model_file.model.item_ids())?;
                Some(build_similarity_from_features(&table))
            }
            None => None,
        };
        let coherence = paths.coherence.as_deref().map(read_coherence).transpose()?;
        Self::new(items, model_file, features, coherence)
    }

    pub fn items(&self) -> &[ItemRecord] {
        &self.items
    }

    pub fn item(&self, item_id: &str) -> Option<&ItemRecord> {
        self.model.item_index(item_id).map(|i| &self.items[i])
    }

    pub fn model(&self) -> &TopicModel {
        &self.model
    }

    pub fn lda_similarity(&self) -> &SimilarityMatrix {
        &self.lda_similarity
    }

    pub fn feature_similarity(&self) -> Option<&SimilarityMatrix> {
        self.feature_similarity.as_ref()
    }

    pub fn topic_map(&self) -> Option<&TopicMap> {
        self.topic_map.as_ref()
    }

    pub fn coherence(&self) -> Option<&CoherenceReport> {
        self.coherence.as_ref()
    }
}

fn read_coherence(path: &Path) -> Result<CoherenceReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
