//! Item ingestion, document enrichment and the tokenized corpus.

mod preprocess;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use preprocess::{preprocess, preprocess_all, tokenize, BigramConfig, Phrases, PreprocessConfig, StopWords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Landscape,
    Portrait,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Landscape => "landscape",
            Format::Portrait => "portrait",
        })
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        })
    }
}

/// One painting with its catalogue attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub item_id: String,
    pub artist_name: String,
    pub painting_title: String,
    pub painting_description: String,
    pub publishing_date: String,
    pub format: Format,
    pub size_class: SizeClass,
    pub technique: String,
    #[serde(default)]
    pub extra_texts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemFormat {
    Jsonl,
    Csv,
}

impl ItemFormat {
    /// Guesses from the file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ItemFormat::Csv,
            _ => ItemFormat::Jsonl,
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    item_id: String,
    artist_name: String,
    painting_title: String,
    painting_description: String,
    publishing_date: String,
    format: Format,
    size_class: SizeClass,
    technique: String,
    #[serde(default)]
    extra_texts: String,
}

impl From<CsvRow> for ItemRecord {
    fn from(row: CsvRow) -> Self {
        let extra_texts = row
            .extra_texts
            .split('|')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        ItemRecord {
            item_id: row.item_id,
            artist_name: row.artist_name,
            painting_title: row.painting_title,
            painting_description: row.painting_description,
            publishing_date: row.publishing_date,
            format: row.format,
            size_class: row.size_class,
            technique: row.technique,
            extra_texts,
        }
    }
}

fn check_record(row: usize, record: &ItemRecord, seen: &mut HashSet<String>) -> Result<()> {
    if record.item_id.trim().is_empty() {
        return Err(Error::Parse {
            row,
            message: "empty item_id".into(),
        });
    }
    if record.painting_description.trim().is_empty() {
        return Err(Error::Parse {
            row,
            message: "empty painting_description".into(),
        });
    }
    if !seen.insert(record.item_id.clone()) {
        return Err(Error::DuplicateId(record.item_id.clone()));
    }
    Ok(())
}

/// Loads item records in file order. Rows are numbered from 1 (for CSV the
/// header is not counted). Blank JSONL lines are skipped but still counted.
pub fn load_items(path: impl AsRef<Path>, format: ItemFormat) -> Result<Vec<ItemRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut items = Vec::new();

    match format {
        ItemFormat::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let row = i + 1;
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: ItemRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                    row,
                    message: e.to_string(),
                })?;
                check_record(row, &record, &mut seen)?;
                items.push(record);
            }
        }
        ItemFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            for (i, result) in reader.deserialize::<CsvRow>().enumerate() {
                let row = i + 1;
                let record: ItemRecord = result
                    .map_err(|e| Error::Parse {
                        row,
                        message: e.to_string(),
                    })?
                    .into();
                check_record(row, &record, &mut seen)?;
                items.push(record);
            }
        }
    }
    Ok(items)
}

/// The description alone, or with the catalogue attributes and external
/// texts appended in a fixed order.
pub fn build_document(item: &ItemRecord, enrich: bool) -> String {
    if !enrich {
        return item.painting_description.clone();
    }
    let mut parts = vec![
        item.painting_description.clone(),
        item.artist_name.clone(),
        item.painting_title.clone(),
        item.technique.clone(),
        item.publishing_date.clone(),
        item.format.to_string(),
        item.size_class.to_string(),
    ];
    parts.extend(item.extra_texts.iter().cloned());
    parts.join(" ")
}

/// Sorted distinct terms with a reverse index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Vocabulary { terms, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

impl Vocabulary {
    /// Builds a lexicographically sorted vocabulary from any set of terms.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        Self::from(set.into_iter().collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Maps terms to ids, dropping anything not in the vocabulary.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens.iter().filter_map(|t| self.id(t.as_ref())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub item_id: String,
    pub tokens: Vec<u32>,
}

/// Tokenized documents over a shared vocabulary, ordered by item id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    vocabulary: Vocabulary,
    documents: Vec<Document>,
    total_tokens: usize,
}

impl Corpus {
    /// Assembles a corpus from already-tokenized documents. The vocabulary is
    /// every distinct token, sorted; documents are sorted by item id.
    pub fn from_token_documents<I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut docs: Vec<(String, Vec<S>)> = docs.into_iter().collect();
        if docs.is_empty() {
            return Err(Error::Invalid("corpus needs at least one document".into()));
        }
        docs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = docs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateId(w[0].0.clone()));
        }
        let empty: Vec<String> = docs
            .iter()
            .filter(|(_, toks)| toks.is_empty())
            .map(|(id, _)| id.clone())
            .collect();
        if !empty.is_empty() {
            return Err(Error::EmptyDocuments(empty));
        }

        let vocabulary = Vocabulary::from_terms(
            docs.iter()
                .flat_map(|(_, toks)| toks.iter().map(|t| t.as_ref().to_string())),
        );
        let documents: Vec<Document> = docs
            .iter()
            .map(|(id, toks)| Document {
                item_id: id.clone(),
                tokens: vocabulary.encode(toks),
            })
            .collect();
        let total_tokens = documents.iter().map(|d| d.tokens.len()).sum();
        Ok(Corpus {
            vocabulary,
            documents,
            total_tokens,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Number of documents.
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.total_tokens
    }

    pub fn item_ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.item_id.clone()).collect()
    }

    /// Term strings of document `d`.
    pub fn document_terms(&self, d: usize) -> Vec<&str> {
        self.documents[d]
            .tokens
            .iter()
            .map(|&t| self.vocabulary.terms[t as usize].as_str())
            .collect()
    }
}

/// Builds D (plain descriptions) or DE (enriched) and tokenizes it. Bigrams
/// are learned over the whole collection. Any item whose document ends up
/// empty is reported rather than dropped.
pub fn build_corpus(items: &[ItemRecord], enrich: bool, config: &PreprocessConfig) -> Result<Corpus> {
    if items.is_empty() {
        return Err(Error::Invalid("no items".into()));
    }
    let raws: Vec<String> = items.iter().map(|it| build_document(it, enrich)).collect();
    let tokens = preprocess_all(&raws, config);
    let mut empty: Vec<String> = items
        .iter()
        .zip(&tokens)
        .filter(|(_, t)| t.is_empty())
        .map(|(it, _)| it.item_id.clone())
        .collect();
    if !empty.is_empty() {
        empty.sort();
        return Err(Error::EmptyDocuments(empty));
    }
    Corpus::from_token_documents(items.iter().map(|it| it.item_id.clone()).zip(tokens))
}
