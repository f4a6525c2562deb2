use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::TopicModel;

/// Value range guaranteed for the entries of a [`SimilarityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityBounds {
    /// `[0, 1]`: cosines of non-negative vectors such as topic mixtures.
    Unit,
    /// `[-1, 1]`: cosines of arbitrary feature vectors.
    Signed,
}

impl SimilarityBounds {
    fn range(self) -> (f64, f64) {
        match self {
            SimilarityBounds::Unit => (0.0, 1.0),
            SimilarityBounds::Signed => (-1.0, 1.0),
        }
    }
}

/// Symmetric item × item cosine similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    item_ids: Vec<String>,
    index: HashMap<String, usize>,
    values: Array2<f64>,
    bounds: SimilarityBounds,
}

impl SimilarityMatrix {
    /// Cosine similarity between every pair of rows. Each upper-triangle
    /// entry is computed once and mirrored, so the matrix is exactly
    /// symmetric; entries are clamped to `bounds` to absorb rounding.
    pub fn from_vectors(item_ids: Vec<String>, rows: ArrayView2<'_, f64>, bounds: SimilarityBounds) -> Result<Self> {
        let m = rows.nrows();
        if item_ids.len() != m {
            return Err(Error::Invalid(format!("{} ids for {m} rows", item_ids.len())));
        }
        let norms: Vec<f64> = rows.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect();
        if let Some(i) = norms.iter().position(|&n| n.is_nan() || n <= 0.0 || !n.is_finite()) {
            return Err(Error::Invalid(format!(
                "item {:?} has a zero or non-finite vector",
                item_ids[i]
            )));
        }
        let (lo, hi) = bounds.range();
        let mut values = Array2::zeros((m, m));
        for i in 0..m {
            for j in i..m {
                let c = (rows.row(i).dot(&rows.row(j)) / (norms[i] * norms[j])).clamp(lo, hi);
                values[[i, j]] = c;
                values[[j, i]] = c;
            }
        }
        Self::from_values(item_ids, values, bounds)
    }

    /// Wraps a precomputed matrix after checking shape, symmetry and range.
    pub fn from_values(item_ids: Vec<String>, values: Array2<f64>, bounds: SimilarityBounds) -> Result<Self> {
        let m = item_ids.len();
        if values.dim() != (m, m) {
            return Err(Error::Invalid(format!(
                "similarity matrix is {:?} for {m} items",
                values.dim()
            )));
        }
        let (lo, hi) = bounds.range();
        for i in 0..m {
            for j in 0..m {
                let x = values[[i, j]];
                if x != values[[j, i]] || !(lo..=hi).contains(&x) {
                    return Err(Error::Invalid(format!("similarity entry ({i}, {j}) = {x} is invalid")));
                }
            }
        }
        let mut index = HashMap::with_capacity(m);
        for (i, id) in item_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(SimilarityMatrix {
            item_ids,
            index,
            values,
            bounds,
        })
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    pub fn index_of(&self, item_id: &str) -> Option<usize> {
        self.index.get(item_id).copied()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn bounds(&self) -> SimilarityBounds {
        self.bounds
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }
}

/// Cosine similarity over the rows of θ.
pub fn build_similarity(model: &TopicModel) -> SimilarityMatrix {
    SimilarityMatrix::from_vectors(model.item_ids().to_vec(), model.theta().view(), SimilarityBounds::Unit)
        .expect("smoothed theta rows are strictly positive")
}

/// Mean pairwise similarity among `items`; lower means a more diverse list.
/// Lists shorter than two items score 0.
pub fn mean_pairwise_similarity(sim: &SimilarityMatrix, items: &[String]) -> Result<f64> {
    let idx: Vec<usize> = items
        .iter()
        .map(|id| sim.index_of(id).ok_or_else(|| Error::UnknownItem(id.clone())))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            total += sim.get(i, j);
            pairs += 1;
        }
    }
    Ok(if pairs == 0 { 0.0 } else { total / pairs as f64 })
}
