use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// What is needed to reproduce a run: the arguments, every seed and budget
/// that reached a module call, and digests of everything read and written.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    pub budgets: BTreeMap<String, f64>,
    pub version: String,
    pub wall_seconds: f64,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub exit_code: i32,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects manifest fields while a command runs.
pub struct Recorder {
    start: Instant,
    pub manifest: RunManifest,
}

impl Recorder {
    pub fn new(argv: Vec<String>) -> Recorder {
        Recorder {
            start: Instant::now(),
            manifest: RunManifest {
                command_line: argv,
                seeds: BTreeMap::new(),
                budgets: BTreeMap::new(),
                version: env!("CARGO_PKG_VERSION").into(),
                wall_seconds: 0.0,
                inputs: Vec::new(),
                outputs: Vec::new(),
                exit_code: 0,
            },
        }
    }

    pub fn read(&mut self, path: &Path) -> std::io::Result<String> {
        let bytes = std::fs::read(path)?;
        self.manifest.inputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn seed(&mut self, name: &str, seed: u64) -> u64 {
        self.manifest.seeds.insert(name.into(), seed);
        seed
    }

    pub fn budget(&mut self, name: &str, value: f64) {
        self.manifest.budgets.insert(name.into(), value);
    }

    pub fn output(&mut self, label: String, bytes: &[u8]) {
        self.manifest.outputs.push(FileDigest { path: label, sha256: sha256_hex(bytes) });
    }

    pub fn finish(mut self, exit_code: i32) -> RunManifest {
        self.manifest.wall_seconds = self.start.elapsed().as_secs_f64();
        self.manifest.exit_code = exit_code;
        self.manifest
    }
}

/// `<out>.manifest.json` next to the output file.
pub fn default_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
