//! User profiles backed by an append-only JSON-lines ratings log.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use topicrec::{likert_to_weight, UserProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingEvent {
    pub user_id: String,
    pub item_id: String,
    pub rating: u8,
}

#[derive(Debug, thiserror::Error)]
pub enum RateError {
    #[error("rating {0} outside the 1..=5 Likert range")]
    OutOfRange(i64),
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("writing ratings log: {0}")]
    Io(#[source] std::io::Error),
}

#[derive(Debug)]
struct Inner {
    log: File,
    profiles: HashMap<String, UserProfile>,
}

/// Profiles keyed by user id. A single mutex makes the log single-writer
/// and serializes updates to any one user.
#[derive(Debug)]
pub struct SessionStore {
    path: PathBuf,
    items: BTreeSet<String>,
    inner: Mutex<Inner>,
}

impl SessionStore {
    /// Opens or creates the log and replays it. A final line without a
    /// newline was never acknowledged and is cut off.
    pub fn open(path: impl AsRef<Path>, items: impl IntoIterator<Item = String>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let items: BTreeSet<String> = items.into_iter().collect();
        let mut log = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .with_context(|| format!("opening ratings log {}", path.display()))?;
        let mut text = String::new();
        log.read_to_string(&mut text)
            .with_context(|| format!("reading ratings log {}", path.display()))?;

        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        if complete < text.len() {
            log::warn!(
                "dropping {} bytes of unacknowledged tail in {}",
                text.len() - complete,
                path.display()
            );
            log.set_len(complete as u64)?;
            log.seek(SeekFrom::End(0))?;
        }

        let mut profiles: HashMap<String, UserProfile> = HashMap::new();
        for (n, line) in text[..complete].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let ev: RatingEvent =
                serde_json::from_str(line).with_context(|| format!("{} line {}", path.display(), n + 1))?;
            if !items.contains(&ev.item_id) {
                bail!("{} line {}: unknown item {:?}", path.display(), n + 1, ev.item_id);
            }
            profiles
                .entry(ev.user_id.clone())
                .or_insert_with(|| UserProfile::new(ev.user_id.clone()))
                .rate(ev.item_id, ev.rating as i64)
                .with_context(|| format!("{} line {}", path.display(), n + 1))?;
        }
        Ok(SessionStore {
            path,
            items,
            inner: Mutex::new(Inner { log, profiles }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Validates, appends and fsyncs the event, then applies it. Returns
    /// the profile as it stands after the write.
    pub fn rate(&self, user_id: &str, item_id: &str, rating: i64) -> Result<UserProfile, RateError> {
        likert_to_weight(rating).map_err(|_| RateError::OutOfRange(rating))?;
        if !self.items.contains(item_id) {
            return Err(RateError::UnknownItem(item_id.to_string()));
        }
        let ev = RatingEvent {
            user_id: user_id.to_string(),
            item_id: item_id.to_string(),
            rating: rating as u8,
        };
        let mut line = serde_json::to_string(&ev).expect("rating event serializes");
        line.push('\n');

        let mut inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        let log = &mut inner.log;
        let before = log.metadata().map_err(RateError::Io)?.len();
        if let Err(e) = log.write_all(line.as_bytes()).and_then(|_| log.sync_data()) {
            // Keep the log line-aligned so later appends replay cleanly.
            let _ = log.set_len(before);
            return Err(RateError::Io(e));
        }
        let profile = inner
            .profiles
            .entry(ev.user_id.clone())
            .or_insert_with(|| UserProfile::new(ev.user_id));
        profile.rate(ev.item_id, rating).expect("rating validated above");
        Ok(profile.clone())
    }

    /// Empty profile for users with no ratings yet.
    pub fn profile(&self, user_id: &str) -> UserProfile {
        let inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        inner
            .profiles
            .get(user_id)
            .cloned()
            .unwrap_or_else(|| UserProfile::new(user_id))
    }

    pub fn users(&self) -> Vec<String> {
        let inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        let mut users: Vec<String> = inner.profiles.keys().cloned().collect();
        users.sort();
        users
    }
}
