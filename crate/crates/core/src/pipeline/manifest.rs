use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::datagen::write_file;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub const SEED_DERIVATION: &str = "root(s) = SHA-256(\"ddoec/v1\" || s as u64 LE); \
child(tag, i) = SHA-256(parent || tag || 0x00 || i as u64 LE); seed(node) = first 8 bytes LE; \
rng(node) = ChaCha8 keyed by the 32 node bytes. \
Databases: d = seed(root(master).child(\"datagen\", 0)); COP i: c = seed(root(d).child(\"cop\", i)); \
cycle k: root(c).child(\"cycle\", k). \
Training: seed(root(master).child(\"train\", 0)). \
Optimizer: seed(root(master).child(\"opt\", alpha.to_bits()).child(algo, trial)). \
Validation: seed(root(master).child(\"validate\", alpha.to_bits()).child(algo, trial)).";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Path relative to the output root, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to replay a stage: the full config, the seed scheme,
/// and digests of what was read and written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub stage: String,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub config: ExperimentConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(root: &Path, rel: &Path) -> Result<FileDigest> {
    let p = root.join(rel);
    let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
    Ok(FileDigest {
        path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

impl RunManifest {
    pub fn new(stage: &str, cfg: &ExperimentConfig, started_unix_s: u64) -> Self {
        Self {
            tool: "ddoec".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            stage: stage.into(),
            master_seed: cfg.master_seed,
            seed_derivation: SEED_DERIVATION.into(),
            config: cfg.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix_s,
            finished_unix_s: started_unix_s,
        }
    }

    pub fn write(&mut self, dir: &Path) -> Result<()> {
        self.finished_unix_s = unix_now();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_file(&dir.join(MANIFEST_FILE), text.as_bytes())
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
