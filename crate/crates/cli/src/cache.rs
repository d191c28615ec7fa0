use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A validated request. Its JSON form is the cache key preimage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: String,
    pub p: Option<u64>,
    pub n: Option<usize>,
    /// Canonical polynomial text or family descriptor.
    pub input: String,
    pub emax: Option<u32>,
    pub format: String,
    pub strict: bool,
    pub extra: BTreeMap<String, String>,
}

impl JobSpec {
    pub fn key(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("job specs serialize");
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update([0]);
        h.update(&canonical);
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub version: String,
    pub timestamp: u64,
    pub job: JobSpec,
    pub result: String,
}

pub fn default_dir() -> Option<PathBuf> {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME").filter(|x| !x.is_empty()) {
        return Some(PathBuf::from(x).join("frobenius"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("frobenius"))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// The stored output for `job`. Unreadable, corrupt or stale entries are misses.
    pub fn lookup(&self, job: &JobSpec) -> Option<String> {
        let key = job.key();
        let bytes = fs::read(self.path(&key)).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&bytes).ok()?;
        (entry.version == VERSION && entry.key == key && entry.job == *job).then_some(entry.result)
    }

    /// Writes through a temporary file and a rename.
    pub fn store(&self, job: &JobSpec, result: &str) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let key = job.key();
        let entry = CacheEntry {
            key: key.clone(),
            version: VERSION.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            job: job.clone(),
            result: result.to_string(),
        };
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        let write = |path: &Path| -> std::io::Result<()> {
            let mut file = fs::File::create(path)?;
            file.write_all(&serde_json::to_vec_pretty(&entry).map_err(std::io::Error::other)?)?;
            file.sync_all()
        };
        if let Err(e) = write(&tmp) {
            let _ = fs::remove_file(&tmp);
            return Err(e);
        }
        fs::rename(&tmp, self.path(&key))
    }
}
