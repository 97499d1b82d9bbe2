//! Run manifests: everything needed to reproduce a command's output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::time::Duration;

use hicrit_core::rng::RNG_VERSION;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Parsed parameters, including defaults.
    pub parameters: serde_json::Value,
    /// The command line as given, for replay.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub rng_version: String,
    /// SHA-256 of every input file, keyed by path.
    pub input_digests: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, argv: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters,
            argv,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng_version: RNG_VERSION.to_string(),
            input_digests: BTreeMap::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.input_digests.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_clock_seconds = elapsed.as_secs_f64();
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let k = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}
