//! Content-addressed store of run artifacts under `<out>/.cache/<key>/`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::artifacts::Artifacts;
use crate::error::{Error, Result};

/// Bumped whenever artifact contents change for an unchanged config.
pub const ARTIFACT_VERSION: &str = "2";

pub fn module_version() -> String {
    format!("{}+artifacts.{}", env!("CARGO_PKG_VERSION"), ARTIFACT_VERSION)
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: String,
    files: Vec<String>,
    summary: String,
}

#[derive(Clone, Debug)]
pub struct ResultCache {
    root: PathBuf,
    version: String,
}

fn io_err(what: &str, path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{what} {}: {e}", path.display())))
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_err("cannot create", dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| io_err("cannot write", &tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err("cannot rename into", path, e))
}

impl ResultCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ResultCache { root: root.into(), version: module_version() }
    }

    pub fn with_version(root: impl Into<PathBuf>, version: &str) -> Self {
        ResultCache { root: root.into(), version: version.to_string() }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// `sha256(version ‖ canonical config)` in hex.
    pub fn key(&self, canonical_config: &str) -> String {
        let mut h = Sha256::new();
        h.update(b"apdim-cache\0");
        h.update(self.version.as_bytes());
        h.update(b"\0");
        h.update(canonical_config.as_bytes());
        hex::encode(h.finalize())
    }

    fn entry(&self, key: &str) -> PathBuf {
        self.root.join(key)
    }

    pub fn get(&self, key: &str) -> Result<Option<Artifacts>> {
        let dir = self.entry(key);
        let manifest_path = dir.join("manifest.json");
        if !manifest_path.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&manifest_path).map_err(|e| io_err("cannot read", &manifest_path, e))?;
        let Ok(m) = serde_json::from_str::<Manifest>(&text) else {
            return Ok(None);
        };
        if m.version != self.version {
            return Ok(None);
        }
        let mut a = Artifacts::default();
        for f in &m.files {
            let p = dir.join(f);
            a.add(f, fs::read(&p).map_err(|e| io_err("cannot read", &p, e))?);
        }
        a.summary = m.summary;
        Ok(Some(a))
    }

    pub fn put(&self, key: &str, artifacts: &Artifacts) -> Result<()> {
        let dir = self.entry(key);
        if dir.exists() {
            return Ok(());
        }
        fs::create_dir_all(&self.root).map_err(|e| io_err("cannot create", &self.root, e))?;
        let tmp = self.root.join(format!(".tmp-{key}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&tmp);
        fs::create_dir_all(&tmp).map_err(|e| io_err("cannot create", &tmp, e))?;
        for (name, bytes) in artifacts.files() {
            let p = tmp.join(name);
            fs::write(&p, bytes).map_err(|e| io_err("cannot write", &p, e))?;
        }
        let m = Manifest {
            version: self.version.clone(),
            files: artifacts.files().iter().map(|(n, _)| n.clone()).collect(),
            summary: artifacts.summary.clone(),
        };
        let p = tmp.join("manifest.json");
        fs::write(&p, serde_json::to_vec_pretty(&m).expect("manifest serializes")).map_err(|e| io_err("cannot write", &p, e))?;
        if fs::rename(&tmp, &dir).is_err() {
            // another run won the race
            let _ = fs::remove_dir_all(&tmp);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_and_version_bump() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::new(dir.path());
        let key = cache.key("kind = \"cf\"");
        assert!(cache.get(&key).unwrap().is_none());
        let mut a = Artifacts::default();
        a.add("x.csv", b"1,2\n".to_vec());
        a.summary = "ok".into();
        cache.put(&key, &a).unwrap();
        let back = cache.get(&key).unwrap().unwrap();
        assert_eq!(back.files(), a.files());
        let bumped = ResultCache::with_version(dir.path(), "999");
        assert_ne!(bumped.key("kind = \"cf\""), key);
        assert!(bumped.get(&key).unwrap().is_none());
    }
}
