//! On-disk cache for expensive, deterministic results.
//!
//! Entries are JSON envelopes carrying a format version and the key material
//! they were computed from; a mismatch in either is treated as a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "LPP_CACHE_DIR";

/// Bumped whenever a cached payload changes shape or meaning.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format_version: u32,
    kind: String,
    key: serde_json::Value,
    payload: T,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    /// `$LPP_CACHE_DIR`, else `$XDG_CACHE_HOME/lpp`, else `$HOME/.cache/lpp`,
    /// else `.lpp-cache` in the working directory.
    pub fn from_env() -> Self {
        let root = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|p| PathBuf::from(p).join("lpp")))
            .or_else(|| std::env::var_os("HOME").map(|p| PathBuf::from(p).join(".cache").join("lpp")))
            .unwrap_or_else(|| PathBuf::from(".lpp-cache"));
        Self { root }
    }

    pub fn at(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path<K: Serialize>(&self, kind: &str, key: &K) -> Result<(PathBuf, serde_json::Value)> {
        let value = serde_json::to_value(key)?;
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        h.update(serde_json::to_vec(&value)?);
        let digest: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok((self.root.join(kind).join(format!("{digest}.json")), value))
    }

    pub fn load<K: Serialize, T: DeserializeOwned>(&self, kind: &str, key: &K) -> Option<T> {
        let (path, value) = self.path(kind, key).ok()?;
        let bytes = fs::read(path).ok()?;
        let env: Envelope<T> = serde_json::from_slice(&bytes).ok()?;
        (env.format_version == CACHE_FORMAT_VERSION && env.kind == kind && env.key == value).then_some(env.payload)
    }

    /// Writes atomically (temporary file plus rename) and returns the entry path.
    pub fn store<K: Serialize, T: Serialize>(&self, kind: &str, key: &K, payload: &T) -> Result<PathBuf> {
        let (path, value) = self.path(kind, key)?;
        let dir = path.parent().expect("cache entries live in a kind directory");
        fs::create_dir_all(dir)?;
        let env = Envelope {
            format_version: CACHE_FORMAT_VERSION,
            kind: kind.to_string(),
            key: value,
            payload,
        };
        let tmp = dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            path.file_name().unwrap().to_string_lossy()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(&env)?)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_key_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path());
        assert!(c.load::<_, Vec<f64>>("demo", &(1, 2.5)).is_none());
        c.store("demo", &(1, 2.5), &vec![1.0, 2.0]).unwrap();
        assert_eq!(c.load::<_, Vec<f64>>("demo", &(1, 2.5)), Some(vec![1.0, 2.0]));
        assert!(c.load::<_, Vec<f64>>("demo", &(1, 2.6)).is_none());
        assert!(c.load::<_, Vec<f64>>("other", &(1, 2.5)).is_none());
    }

    #[test]
    fn stale_version_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path());
        let p = c.store("demo", &"k", &3u32).unwrap();
        let text = fs::read_to_string(&p).unwrap().replace(
            &format!("\"format_version\":{CACHE_FORMAT_VERSION}"),
            "\"format_version\":0",
        );
        fs::write(&p, text).unwrap();
        assert!(c.load::<_, u32>("demo", &"k").is_none());
    }
}
