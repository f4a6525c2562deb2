//! Library side of each subcommand. `main` only parses flags, calls these
//! and writes the returned text, so every CLI output can be reproduced
//! from a library call.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use topicrec::corpus::ItemFormat;
use topicrec::eval::sweep_csv;
use topicrec::{
    build_corpus, build_similarity, coherence, coherence_sweep, load_items, recommend_with_terms, train,
    CoherenceReport, HyperTemplate, ItemRecord, LdaHyperparams, ModelFile, PreprocessConfig, Recommendation, SweepRow,
    UserProfile,
};

pub fn read_items(path: &Path) -> Result<Vec<ItemRecord>> {
    Ok(load_items(path, ItemFormat::from_path(path))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub model_file: ModelFile,
    pub coherence: CoherenceReport,
}

/// Preprocess, fit, score coherence and attach the LDA similarity matrix.
pub fn train_pipeline(
    items: &[ItemRecord],
    enrich: bool,
    config: &PreprocessConfig,
    hyper: &LdaHyperparams,
    top_n: usize,
) -> Result<TrainOutput> {
    let corpus = build_corpus(items, enrich, config)?;
    let model = train(&corpus, hyper)?;
    let coherence = coherence(&model, &corpus, top_n)?;
    let similarity = build_similarity(&model);
    Ok(TrainOutput {
        model_file: ModelFile::new(model, Some(similarity))?,
        coherence,
    })
}

pub fn coherence_summary(report: &CoherenceReport) -> String {
    let mut out = format!("mean UMass coherence (top {}): {:.4}\n", report.top_n, report.mean);
    for (k, c) in report.per_topic.iter().enumerate() {
        writeln!(out, "  topic {k}: {c:.4}").unwrap();
    }
    out
}

pub fn coherence_json(report: &CoherenceReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    /// "D" for plain descriptions, "DE" for enriched documents.
    pub name: String,
    pub enrich: bool,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub top_n: usize,
    pub series: Vec<SweepSeries>,
}

fn series_name(enrich: bool) -> &'static str {
    if enrich {
        "DE"
    } else {
        "D"
    }
}

/// One series for the chosen document variant, or both when `compare`.
pub fn sweep_report(
    items: &[ItemRecord],
    k_values: &[usize],
    template: &HyperTemplate,
    config: &PreprocessConfig,
    top_n: usize,
    enrich: bool,
    compare: bool,
) -> Result<SweepReport> {
    let variants: Vec<bool> = if compare { vec![false, true] } else { vec![enrich] };
    let series = variants
        .into_iter()
        .map(|e| {
            let corpus = build_corpus(items, e, config)?;
            let rows = coherence_sweep(&corpus, k_values, template, top_n)?;
            Ok(SweepSeries {
                name: series_name(e).into(),
                enrich: e,
                rows,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport { top_n, series })
}

impl SweepReport {
    /// `K,mean_coherence` for one series; `K,D,DE` when comparing.
    pub fn to_csv(&self) -> String {
        if let [only] = self.series.as_slice() {
            return sweep_csv(&only.rows);
        }
        let mut out = String::from("K");
        for s in &self.series {
            write!(out, ",{}", s.name).unwrap();
        }
        out.push('\n');
        for (i, row) in self.series[0].rows.iter().enumerate() {
            write!(out, "{}", row.topics).unwrap();
            for s in &self.series {
                write!(out, ",{}", s.rows[i].mean_coherence).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Ratings file: a JSON object mapping item id to a 1..5 rating.
pub fn read_ratings(path: &Path) -> Result<BTreeMap<String, i64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn recommend_from_file(
    model_file: &ModelFile,
    ratings: &BTreeMap<String, i64>,
    k: usize,
    top_terms: usize,
) -> Result<Recommendation> {
    let profile = UserProfile::with_ratings("cli", ratings.iter().map(|(id, &r)| (id.as_str(), r)))?;
    let sim = match &model_file.similarity {
        Some(s) => s.clone(),
        None => build_similarity(&model_file.model),
    };
    Ok(recommend_with_terms(&profile, &sim, &model_file.model, k, top_terms)?)
}

pub fn recommendation_json(rec: &Recommendation) -> String {
    serde_json::to_string_pretty(rec).expect("recommendation serializes") + "\n"
}
