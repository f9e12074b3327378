//! Run manifests: a JSON file beside every output recording what produced it.

use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub baitscope: &'static str,
    pub embedding_format: &'static str,
    pub classifier_format: &'static str,
    pub stopwords: u32,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub versions: Versions,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

fn digests(paths: &[PathBuf]) -> io::Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileDigest {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// Where the manifest for `out` goes: `DIR/manifest.json` for a directory,
/// `FILE.manifest.json` otherwise.
pub fn manifest_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("manifest.json")
    } else {
        let mut name = out.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        out.with_file_name(name)
    }
}

pub fn write_manifest(
    out: &Path,
    command: &str,
    seed: Option<u64>,
    config: Value,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> io::Result<PathBuf> {
    let manifest = Manifest {
        command: command.to_string(),
        seed,
        config,
        inputs: digests(inputs)?,
        outputs: digests(outputs)?,
        versions: Versions {
            baitscope: env!("CARGO_PKG_VERSION"),
            embedding_format: std::str::from_utf8(baitscope::embed::MODEL_MAGIC).unwrap_or("?"),
            classifier_format: std::str::from_utf8(baitscope::classify::CLASSIFIER_MAGIC)
                .unwrap_or("?"),
            stopwords: baitscope::topics::STOPWORDS_VERSION,
        },
    };
    let path = manifest_path(out);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
