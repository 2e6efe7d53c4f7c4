//! Provenance stamps for file outputs: tool version, seed, and input
//! digests, so audit artifacts can be traced back to their exact inputs.
//! Deliberately excludes timestamps; outputs must be byte-identical across
//! reruns with the same inputs and seed.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputDigest>,
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        Self {
            tool: "sizepower",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            inputs: Vec::new(),
        }
    }

    pub fn with_input(mut self, path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            digest: format!("fnv1a64:{:016x}", fnv1a64(&bytes)),
        });
        Ok(self)
    }

    /// `# key=value` comment lines for CSV outputs.
    pub fn csv_comment_lines(&self) -> String {
        let mut out = format!("# tool={} version={}\n", self.tool, self.version);
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed={seed}\n"));
        }
        for input in &self.inputs {
            out.push_str(&format!("# input={} digest={}\n", input.path, input.digest));
        }
        out
    }
}

/// 64-bit FNV-1a over raw bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &byte in bytes {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
