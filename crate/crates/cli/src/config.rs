//! Preprocessing options read from a TOML or JSON file, with CLI overrides.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use topicrec::{BigramConfig, PreprocessConfig, StopWords};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessFile {
    pub stop_words_file: Option<PathBuf>,
    pub min_token_len: Option<usize>,
    pub stem: Option<bool>,
    pub bigrams: Option<BigramConfig>,
}

impl PreprocessFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        Ok(parsed)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct PreprocessArgs {
    /// TOML or JSON preprocessing config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Stop-word file, one token per line; replaces the bundled list.
    #[arg(long)]
    pub stop_words: Option<PathBuf>,
    #[arg(long)]
    pub min_token_len: Option<usize>,
    #[arg(long)]
    pub no_stem: bool,
    #[arg(long)]
    pub no_bigrams: bool,
}

impl PreprocessArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<PreprocessConfig> {
        let file = match &self.config {
            Some(p) => PreprocessFile::load(p)?,
            None => PreprocessFile::default(),
        };
        let mut cfg = PreprocessConfig::default();
        if let Some(path) = self.stop_words.as_ref().or(file.stop_words_file.as_ref()) {
            cfg.stop_words = StopWords::from_file(path)?;
        }
        if let Some(n) = self.min_token_len.or(file.min_token_len) {
            cfg.min_token_len = n;
        }
        if let Some(stem) = file.stem {
            cfg.stem = stem;
        }
        if self.no_stem {
            cfg.stem = false;
        }
        if let Some(b) = file.bigrams {
            cfg.bigrams = b;
        }
        if self.no_bigrams {
            cfg.bigrams.enabled = false;
        }
        Ok(cfg)
    }
}
