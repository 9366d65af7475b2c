use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What a `run` produced and how to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Hash of the parsed catalog after overrides.
    pub config_hash: String,
    /// Hash of every field except `timestamp_unix`; written into each output file.
    pub manifest_hash: String,
    pub catalog: String,
    pub overrides: Vec<String>,
    pub seed: u64,
    pub scenarios: Vec<String>,
    pub outputs: Vec<String>,
    /// `SOURCE_DATE_EPOCH` when set, otherwise the wall clock.
    pub timestamp_unix: u64,
}

#[derive(Serialize)]
struct Hashed<'a> {
    tool_version: &'a str,
    config_hash: &'a str,
    catalog: &'a str,
    overrides: &'a [String],
    seed: u64,
    scenarios: &'a [String],
    outputs: &'a [String],
}

impl RunManifest {
    pub fn new(
        config_hash: String,
        catalog: String,
        overrides: Vec<String>,
        seed: u64,
        scenarios: Vec<String>,
        outputs: Vec<String>,
    ) -> Self {
        let tool_version = env!("CARGO_PKG_VERSION").to_string();
        let hashed = Hashed {
            tool_version: &tool_version,
            config_hash: &config_hash,
            catalog: &catalog,
            overrides: &overrides,
            seed,
            scenarios: &scenarios,
            outputs: &outputs,
        };
        let manifest_hash = sha256_hex(&serde_json::to_vec(&hashed).expect("manifest serializes"));
        Self {
            tool_version,
            config_hash,
            manifest_hash,
            catalog,
            overrides,
            seed,
            scenarios,
            outputs,
            timestamp_unix: timestamp(),
        }
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}
