//! Persistent period cache: one JSON document, replaced atomically.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ducci_core::PeriodRecord;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_FILE_NAME: &str = "period-cache.json";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cannot read cache {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write cache {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cache {path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("cache {path} has format version {found}, expected {expected}")]
    Version { path: PathBuf, found: u32, expected: u32 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeriodCache {
    pub entries: BTreeMap<(u64, usize), PeriodRecord>,
}

#[derive(Serialize, Deserialize)]
struct OnDisk {
    version: u32,
    entries: Vec<PeriodRecord>,
}

/// A directory resolves to `period-cache.json` inside it; anything else is
/// taken as the file itself.
pub fn resolve_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(CACHE_FILE_NAME)
    } else {
        path.to_path_buf()
    }
}

impl PeriodCache {
    pub fn from_entries(entries: BTreeMap<(u64, usize), PeriodRecord>) -> Self {
        Self { entries }
    }

    /// Loads `path`, or returns an empty cache when the file does not exist.
    /// A corrupt file or a foreign version is an error, never a partial load.
    pub fn load(path: &Path) -> Result<Self, CacheError> {
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(source) => return Err(CacheError::Read { path: path.into(), source }),
        };
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CacheError::Corrupt { path: path.into(), reason: e.to_string() })?;
        let found = value.get("version").and_then(|v| v.as_u64()).ok_or_else(|| CacheError::Corrupt {
            path: path.into(),
            reason: "missing version".into(),
        })?;
        if found != CACHE_VERSION as u64 {
            return Err(CacheError::Version { path: path.into(), found: found as u32, expected: CACHE_VERSION });
        }
        let disk: OnDisk = serde_json::from_value(value)
            .map_err(|e| CacheError::Corrupt { path: path.into(), reason: e.to_string() })?;
        let mut entries = BTreeMap::new();
        for record in disk.entries {
            let key = (record.m, record.n);
            if entries.insert(key, record).is_some() {
                return Err(CacheError::Corrupt {
                    path: path.into(),
                    reason: format!("duplicate entry for m={} n={}", key.0, key.1),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Writes to a temporary file in the same directory, then renames it
    /// over `path`, so readers see either the old or the new document.
    pub fn store(&self, path: &Path) -> Result<(), CacheError> {
        let write_err = |source| CacheError::Write { path: path.into(), source };
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let disk = OnDisk { version: CACHE_VERSION, entries: self.entries.values().cloned().collect() };
        let body = serde_json::to_vec_pretty(&disk).expect("records serialize");
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(write_err)?;
        tmp.write_all(&body).map_err(write_err)?;
        tmp.as_file().sync_all().map_err(write_err)?;
        tmp.persist(path).map_err(|e| write_err(e.error))?;
        Ok(())
    }
}
