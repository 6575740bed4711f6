use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub endpoint: String,
    pub case_id: String,
    pub text_hash: String,
    pub response: String,
}

type Key = (String, String, String);

/// Append-only JSON Lines store of model responses keyed by
/// `(endpoint, case_id, text_hash)`.
#[derive(Debug)]
pub struct ReplayCache {
    path: PathBuf,
    entries: HashMap<Key, String>,
}

impl ReplayCache {
    /// Opens (or starts) the cache at `path`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let e: CacheEntry = serde_json::from_str(&line).map_err(|err| Error::Corpus {
                    path: path.clone(),
                    line: i + 1,
                    message: err.to_string(),
                })?;
                entries.insert((e.endpoint, e.case_id, e.text_hash), e.response);
            }
        }
        Ok(ReplayCache { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, endpoint: &str, case_id: &str, text_hash: &str) -> Option<&str> {
        self.entries
            .get(&(endpoint.to_string(), case_id.to_string(), text_hash.to_string()))
            .map(String::as_str)
    }

    /// Records an entry and appends it to the file.
    pub fn insert(&mut self, entry: CacheEntry) -> Result<()> {
        self.insert_all(std::iter::once(entry))
    }

    /// Appends every new entry with a single file open.
    pub fn insert_all(&mut self, entries: impl IntoIterator<Item = CacheEntry>) -> Result<()> {
        let mut lines = String::new();
        for entry in entries {
            let key = (
                entry.endpoint.clone(),
                entry.case_id.clone(),
                entry.text_hash.clone(),
            );
            if self.entries.get(&key) == Some(&entry.response) {
                continue;
            }
            lines.push_str(&serde_json::to_string(&entry)?);
            lines.push('\n');
            self.entries.insert(key, entry.response);
        }
        if lines.is_empty() {
            return Ok(());
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(lines.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut c = ReplayCache::open(&path).unwrap();
        c.insert(CacheEntry {
            endpoint: "e".into(),
            case_id: "1".into(),
            text_hash: "h".into(),
            response: "hi".into(),
        })
        .unwrap();
        let c = ReplayCache::open(&path).unwrap();
        assert_eq!(c.get("e", "1", "h"), Some("hi"));
        assert_eq!(c.get("e", "1", "other"), None);
    }
}
