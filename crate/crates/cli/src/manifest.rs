use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// One record per run: what was asked, with which inputs, and how it ended.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub kind: &'static str,
    pub command: String,
    pub parameters: Value,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub input_hashes: BTreeMap<String, String>,
    pub timing_ms: u128,
    pub summary: Value,
    pub exit_code: i32,
}

pub fn versions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("schurkit", env!("CARGO_PKG_VERSION")),
        ("enumerator", schurkit::enumeration::ENUMERATOR_VERSION),
    ])
}

/// SHA-256 of each readable input file, keyed by the path as given.
pub fn hash_inputs(paths: &[&Path]) -> BTreeMap<String, String> {
    paths
        .iter()
        .filter_map(|p| {
            let bytes = std::fs::read(p).ok()?;
            Some((p.display().to_string(), hex::encode(Sha256::digest(&bytes))))
        })
        .collect()
}
