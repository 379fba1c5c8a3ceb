//! Writes run outputs and the manifest that indexes them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::NormalizedConfig;
use crate::error::Result;
use crate::pipelines::RunOutput;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub preset: String,
    pub seed: u64,
    /// SHA-256 of the canonical normalized configuration.
    pub config_hash: String,
    pub version: String,
    pub runtime_seconds: f64,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Canonical JSON of the effective configuration, without the output directory.
pub fn canonical_config(cfg: &NormalizedConfig) -> Vec<u8> {
    let mut c = cfg.clone();
    c.output_dir = None;
    serde_json::to_vec(&c).expect("config serializes")
}

pub fn default_output_dir(cfg: &NormalizedConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(cfg.preset.name()))
}

/// Writes every emitted file, the config echo and the summary, then the manifest.
pub fn write_run(
    dir: &Path,
    command: &str,
    cfg: &NormalizedConfig,
    output: &RunOutput,
    runtime_seconds: f64,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut emit = |name: &str, bytes: &[u8]| -> Result<()> {
        fs::write(dir.join(name), bytes)?;
        files.push(FileEntry { name: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    };
    let echo = NormalizedConfig { output_dir: None, ..cfg.clone() }.echo();
    emit("config.json", echo.as_bytes())?;
    for f in &output.files {
        emit(&f.name, &f.bytes)?;
    }
    let summary = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    emit("summary.json", summary.as_bytes())?;
    let manifest = Manifest {
        command: command.to_string(),
        preset: cfg.preset.name().to_string(),
        seed: cfg.seed,
        config_hash: sha256_hex(&canonical_config(cfg)),
        version: env!("CARGO_PKG_VERSION").to_string(),
        runtime_seconds,
        warnings: output.warnings.clone(),
        files,
    };
    fs::write(dir.join(MANIFEST_NAME), serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate_config, ExperimentConfig, Preset};
    use serde_json::json;

    #[test]
    fn manifest_hashes_match_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = validate_config(&ExperimentConfig::preset(Preset::Fig3Gfunc)).unwrap();
        let mut out = RunOutput { summary: json!({ "k": 1 }), ..Default::default() };
        out.files.push(crate::pipelines::Emitted { name: "a.csv".into(), bytes: b"x,y\n1,2\n".to_vec() });
        let m = write_run(dir.path(), "run", &cfg, &out, 0.5).unwrap();
        let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["config.json", "a.csv", "summary.json"]);
        for f in &m.files {
            let bytes = fs::read(dir.path().join(&f.name)).unwrap();
            assert_eq!(f.sha256, sha256_hex(&bytes));
            assert_eq!(f.bytes, bytes.len() as u64);
        }
        let read: Manifest = serde_json::from_slice(&fs::read(dir.path().join(MANIFEST_NAME)).unwrap()).unwrap();
        assert_eq!(read, m);
    }

    #[test]
    fn config_hash_ignores_output_dir() {
        let a = validate_config(&ExperimentConfig::preset(Preset::Fig4Mismatch)).unwrap();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(canonical_config(&a), canonical_config(&b));
        let c = NormalizedConfig { seed: 9, ..a.clone() };
        assert_ne!(canonical_config(&a), canonical_config(&c));
    }
}
