//! Dense-feature comparison arm.
//!
//! Precomputed per-item embeddings (for example CNN activations) are loaded,
//! aligned to the collection and L2-normalized, then turned into a
//! [`SimilarityMatrix`] that the ranking code consumes exactly like the
//! topic-based one.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recsys::{SimilarityBounds, SimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFormat {
    /// `item_id,f0,f1,...` with a header row.
    Csv,
    /// Little-endian f32 rows with a `<path>.json` sidecar `{item_ids, F}`.
    Raw,
}

impl FeatureFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FeatureFormat::Csv,
            _ => FeatureFormat::Raw,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSidecar {
    pub item_ids: Vec<String>,
    #[serde(rename = "F")]
    pub dim: usize,
}

/// Unit-norm feature vectors in collection order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    item_ids: Vec<String>,
    vectors: Array2<f64>,
}

impl FeatureTable {
    /// Aligns `rows` to `collection` and normalizes each vector.
    pub fn new(rows: Vec<(String, Vec<f64>)>, collection: &[String]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.1.len());
        if dim == 0 {
            return Err(Error::Invalid("feature table is empty".into()));
        }
        let mut by_id: HashMap<String, (usize, Vec<f64>)> = HashMap::with_capacity(rows.len());
        for (row, (id, v)) in rows.into_iter().enumerate() {
            let row = row + 1;
            if v.len() != dim {
                return Err(Error::Parse {
                    row,
                    message: format!("expected {dim} features, found {}", v.len()),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse {
                    row,
                    message: format!("non-finite feature for {id:?}"),
                });
            }
            if by_id.insert(id.clone(), (row, v)).is_some() {
                return Err(Error::DuplicateId(id));
            }
        }

        let wanted: HashSet<&String> = collection.iter().collect();
        let missing: Vec<String> = collection
            .iter()
            .filter(|id| !by_id.contains_key(*id))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingFeatures(missing));
        }
        let mut extra: Vec<String> = by_id.keys().filter(|id| !wanted.contains(id)).cloned().collect();
        if !extra.is_empty() {
            extra.sort();
            return Err(Error::UnexpectedFeatures(extra));
        }

        let mut vectors = Array2::zeros((collection.len(), dim));
        for (i, id) in collection.iter().enumerate() {
            let (row, v) = &by_id[id];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Parse {
                    row: *row,
                    message: format!("zero feature vector for {id:?}"),
                });
            }
            for (j, x) in v.iter().enumerate() {
                vectors[[i, j]] = x / norm;
            }
        }
        Ok(FeatureTable {
            item_ids: collection.to_vec(),
            vectors,
        })
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn read_csv(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let id = rec.get(0).unwrap_or_default().to_string();
        let values = rec
            .iter()
            .skip(1)
            .map(|x| {
                x.trim().parse::<f64>().map_err(|e| Error::Parse {
                    row,
                    message: format!("{x:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((id, values));
    }
    Ok(rows)
}

fn read_raw(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: RawSidecar = serde_json::from_str(&text).map_err(|e| Error::Parse {
        row: 0,
        message: format!("{}: {e}", side.display()),
    })?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let expected = meta.item_ids.len() * meta.dim * 4;
    if bytes.len() != expected {
        return Err(Error::Invalid(format!(
            "{}: {} bytes, expected {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let floats: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok(meta
        .item_ids
        .into_iter()
        .zip(floats.chunks(meta.dim.max(1)))
        .map(|(id, v)| (id, v.to_vec()))
        .collect())
}

/// Loads a feature file and aligns it to `collection`. Every collection item
/// must appear exactly once and no others may.
pub fn load_features(path: impl AsRef<Path>, format: FeatureFormat, collection: &[String]) -> Result<FeatureTable> {
    let path = path.as_ref();
    let rows = match format {
        FeatureFormat::Csv => read_csv(path)?,
        FeatureFormat::Raw => read_raw(path)?,
    };
    FeatureTable::new(rows, collection)
}

/// Writes the raw layout and its sidecar.
pub fn write_raw(path: impl AsRef<Path>, item_ids: &[String], vectors: &[Vec<f32>]) -> Result<()> {
    let path = path.as_ref();
    let dim = vectors.first().map_or(0, Vec::len);
    let mut bytes = Vec::with_capacity(vectors.len() * dim * 4);
    for v in vectors {
        for x in v {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let meta = RawSidecar {
        item_ids: item_ids.to_vec(),
        dim,
    };
    fs::write(&side, serde_json::to_vec(&meta).expect("sidecar serializes")).map_err(|e| Error::io(&side, e))
}

/// Cosine similarities of the unit feature vectors, which may be negative.
pub fn build_similarity_from_features(table: &FeatureTable) -> SimilarityMatrix {
    SimilarityMatrix::from_vectors(table.item_ids.clone(), table.vectors.view(), SimilarityBounds::Signed)
        .expect("feature rows are unit norm")
}
