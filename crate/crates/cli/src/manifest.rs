use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lpp_core::cache::CACHE_FORMAT_VERSION;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Serialize, Debug)]
pub struct Versions {
    pub code: &'static str,
    pub cache_format: u32,
}

#[derive(Serialize, Debug)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub versions: Versions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_hit: Option<bool>,
    pub outputs: Vec<OutputFile>,
}

/// Collects output files for one command and writes `manifest.json` last.
pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Run {
    pub fn new(dir: &Path, command: &str, seed: Option<u64>) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                parameters: BTreeMap::new(),
                versions: Versions {
                    code: env!("CARGO_PKG_VERSION"),
                    cache_format: CACHE_FORMAT_VERSION,
                },
                seed,
                cache_hit: None,
                outputs: Vec::new(),
            },
        })
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameters serialize");
        self.manifest.parameters.insert(key.to_string(), v);
    }

    pub fn cache_hit(&mut self, hit: bool) {
        self.manifest.cache_hit = Some(hit);
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure::io(&path, e))?;
        self.manifest.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, Failure> {
        let mut text = serde_json::to_vec_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
        text.push(b'\n');
        self.write(name, &text)
    }

    pub fn finish(self) -> Result<PathBuf, Failure> {
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_vec_pretty(&self.manifest).map_err(|e| Failure::Numerical(e.to_string()))?;
        text.push(b'\n');
        fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        Ok(path)
    }
}
