//! Versioned model container.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "TOPICREC"
//! version      u32      1
//! topics       u64
//! alpha, beta  f64, f64
//! iterations   u64
//! burn_in      u64
//! seed         u64
//! average      u8
//! V            u64, then V × (u64 byte length, UTF-8 term)
//! M            u64, then M × (u64 byte length, UTF-8 item id)
//! doc_lengths  M × u64
//! theta        M×K f64, row-major
//! phi          K×V f64, row-major
//! similarity   u8 flag; when 1: u8 bounds (0 unit, 1 signed), M×M f64
//! ```
//!
//! The JSON export carries the same fields and is meant for inspection.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::lda::{LdaHyperparams, TopicModel};
use crate::recsys::{SimilarityBounds, SimilarityMatrix};

pub const MAGIC: &[u8; 8] = b"TOPICREC";
pub const FORMAT_VERSION: u32 = 1;

/// A trained model with its optional precomputed similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: TopicModel,
    pub similarity: Option<SimilarityMatrix>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn floats<'a>(&mut self, xs: impl IntoIterator<Item = &'a f64>) {
        for &x in xs {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        usize::try_from(n)
            .ok()
            .filter(|&n| n <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("implausible length {n}")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| Error::Format(e.to_string()))
    }
    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Array2<f64>> {
        let n = rows
            .checked_mul(cols)
            .filter(|n| n.saturating_mul(8) <= self.buf.len() - self.pos)
            .ok_or_else(|| Error::Format("matrix larger than file".into()))?;
        let data = (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        Ok(Array2::from_shape_vec((rows, cols), data).expect("shape checked"))
    }
}

impl ModelFile {
    pub fn new(model: TopicModel, similarity: Option<SimilarityMatrix>) -> Result<Self> {
        if let Some(sim) = &similarity {
            if sim.item_ids() != model.item_ids() {
                return Err(Error::Invalid("similarity matrix items differ from model items".into()));
            }
        }
        Ok(ModelFile { model, similarity })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let m = &self.model;
        let h = m.hyper();
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(FORMAT_VERSION);
        w.u64(h.topics as u64);
        w.f64(h.alpha);
        w.f64(h.beta);
        w.u64(h.iterations as u64);
        w.u64(h.burn_in as u64);
        w.u64(h.seed);
        w.u8(h.average as u8);
        w.u64(m.vocabulary().len() as u64);
        for t in m.vocabulary().terms() {
            w.str(t);
        }
        w.u64(m.item_ids().len() as u64);
        for id in m.item_ids() {
            w.str(id);
        }
        for &l in m.doc_lengths() {
            w.u64(l);
        }
        w.floats(m.theta().iter());
        w.floats(m.phi().iter());
        match &self.similarity {
            None => w.u8(0),
            Some(sim) => {
                w.u8(1);
                w.u8(match sim.bounds() {
                    SimilarityBounds::Unit => 0,
                    SimilarityBounds::Signed => 1,
                });
                w.floats(sim.values().iter());
            }
        }
        w.0
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let hyper = LdaHyperparams {
            topics: r.len()?,
            alpha: r.f64()?,
            beta: r.f64()?,
            iterations: r.u64()? as usize,
            burn_in: r.u64()? as usize,
            seed: r.u64()?,
            average: r.u8()? != 0,
        };
        hyper.validate().map_err(|e| Error::Format(e.to_string()))?;
        let v = r.len()?;
        let terms = (0..v).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let m = r.len()?;
        let item_ids = (0..m).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let doc_lengths = (0..m).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let theta = r.matrix(m, hyper.topics)?;
        let phi = r.matrix(hyper.topics, v)?;
        let model = TopicModel::from_parts(hyper, Vocabulary::from(terms), item_ids, doc_lengths, theta, phi)?;

        let similarity = match r.u8()? {
            0 => None,
            1 => {
                let bounds = match r.u8()? {
                    0 => SimilarityBounds::Unit,
                    1 => SimilarityBounds::Signed,
                    b => return Err(Error::Format(format!("unknown similarity bounds {b}"))),
                };
                let values = r.matrix(m, m)?;
                Some(SimilarityMatrix::from_values(
                    model.item_ids().to_vec(),
                    values,
                    bounds,
                )?)
            }
            f => return Err(Error::Format(format!("unknown section flag {f}"))),
        };
        if r.pos != buf.len() {
            return Err(Error::Format(format!("{} trailing bytes", buf.len() - r.pos)));
        }
        Ok(ModelFile { model, similarity })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&JsonModel::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonModel = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        j.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct JsonSimilarity {
    bounds: SimilarityBounds,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonModel {
    magic: String,
    version: u32,
    hyperparams: LdaHyperparams,
    vocabulary: Vec<String>,
    item_ids: Vec<String>,
    doc_lengths: Vec<u64>,
    theta: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    similarity: Option<JsonSimilarity>,
}

fn rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: Vec<Vec<f64>>, cols: usize) -> Result<Array2<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("ragged matrix".into()));
    }
    Ok(Array2::from_shape_vec((n, cols), rows.into_iter().flatten().collect()).expect("shape checked"))
}

impl From<&ModelFile> for JsonModel {
    fn from(f: &ModelFile) -> Self {
        let m = &f.model;
        JsonModel {
            magic: String::from_utf8_lossy(MAGIC).into_owned(),
            version: FORMAT_VERSION,
            hyperparams: *m.hyper(),
            vocabulary: m.vocabulary().terms().to_vec(),
            item_ids: m.item_ids().to_vec(),
            doc_lengths: m.doc_lengths().to_vec(),
            theta: rows(m.theta()),
            phi: rows(m.phi()),
            similarity: f.similarity.as_ref().map(|s| JsonSimilarity {
                bounds: s.bounds(),
                values: rows(s.values()),
            }),
        }
    }
}

impl TryFrom<JsonModel> for ModelFile {
    type Error = Error;

    fn try_from(j: JsonModel) -> Result<Self> {
        if j.magic.as_bytes() != MAGIC || j.version != FORMAT_VERSION {
            return Err(Error::Format("not a version 1 model export".into()));
        }
        let k = j.hyperparams.topics;
        let v = j.vocabulary.len();
        let m = j.item_ids.len();
        let model = TopicModel::from_parts(
            j.hyperparams,
            Vocabulary::from(j.vocabulary),
            j.item_ids,
            j.doc_lengths,
            from_rows(j.theta, k)?,
            from_rows(j.phi, v)?,
        )?;
        let similarity = j
            .similarity
            .map(|s| SimilarityMatrix::from_values(model.item_ids().to_vec(), from_rows(s.values, m)?, s.bounds))
            .transpose()?;
        Ok(ModelFile { model, similarity })
    }
}
