use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Provenance of one output. Everything except the two wall-clock fields is
/// a function of the command line and the input files, and fixes the output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    /// SHA-256 of the resolved arguments and the bytes of every input file.
    pub config_hash: String,
    pub rng_seed: u64,
    pub tool_version: String,
    pub budgets: Value,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(argv: &[String], args: &impl Serialize, inputs: &[Vec<u8>], seed: u64, budgets: Value, start: Instant) -> Self {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(args).expect("arguments serialize"));
        for bytes in inputs {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        let elapsed = start.elapsed();
        let started = SystemTime::now().checked_sub(elapsed).unwrap_or(UNIX_EPOCH);
        RunManifest {
            command: argv.to_vec(),
            config_hash: h.finalize().iter().map(|b| format!("{b:02x}")).collect(),
            rng_seed: seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            budgets,
            started_unix: started.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_clock_seconds: elapsed.as_secs_f64(),
        }
    }
}

/// `out.csv` is described by `out.csv.manifest.json`.
pub fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
