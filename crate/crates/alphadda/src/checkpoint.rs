//! Network checkpoint files.
//!
//! ```text
//! offset  size  content
//! 0       8     magic "ALPHADDA"
//! 8       4     format version, u32 little-endian (currently 1)
//! 12      4     metadata length M, u32 little-endian
//! 16      M     metadata, UTF-8 JSON (see `CheckpointMeta`)
//! 16+M    4·P   P weights, f32 little-endian, in network storage order
//! ```
//!
//! The metadata carries the tensor layout so a reader can split the flat
//! weight array without knowing the architecture code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use alphadda_core::eval::{NetworkConfig, PolicyValueNet};
use alphadda_core::GameVariant;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::as_str;

pub const MAGIC: &[u8; 8] = b"ALPHADDA";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("checkpoint {path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkMeta {
    pub history: usize,
    pub residual_blocks: usize,
    pub filters: usize,
    pub kernel_size: usize,
    pub value_hidden: usize,
    pub policy_hidden: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    #[serde(with = "as_str")]
    pub variant: GameVariant,
    pub network: NetworkMeta,
    /// Training iterations completed, 0 for a fresh network.
    pub iteration: u32,
    pub seed: u64,
    pub parameter_count: usize,
    /// `(tensor name, shape)` in storage order.
    pub layout: Vec<(String, Vec<usize>)>,
}

impl CheckpointMeta {
    pub fn new(net: &PolicyValueNet<f32>, iteration: u32, seed: u64) -> Self {
        let c = net.config();
        Self {
            variant: c.variant,
            network: NetworkMeta {
                history: c.history,
                residual_blocks: c.residual_blocks,
                filters: c.filters,
                kernel_size: c.kernel_size,
                value_hidden: c.value_hidden,
                policy_hidden: c.policy_hidden,
            },
            iteration,
            seed,
            parameter_count: net.parameter_count(),
            layout: net.layout().to_vec(),
        }
    }

    pub fn network_config(&self) -> NetworkConfig {
        let n = &self.network;
        NetworkConfig {
            variant: self.variant,
            history: n.history,
            residual_blocks: n.residual_blocks,
            filters: n.filters,
            kernel_size: n.kernel_size,
            value_hidden: n.value_hidden,
            policy_hidden: n.policy_hidden,
        }
    }
}

pub fn encode(net: &PolicyValueNet<f32>, meta: &CheckpointMeta) -> Vec<u8> {
    let json = serde_json::to_vec(meta).expect("metadata serializes");
    let mut out = Vec::with_capacity(HEADER_LEN + json.len() + 4 * net.parameter_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for w in net.params() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

/// Parses a checkpoint image; `Err` holds the reason it is rejected.
pub fn decode(bytes: &[u8]) -> Result<(CheckpointMeta, PolicyValueNet<f32>), String> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err("missing ALPHADDA header".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(8);
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let meta_len = word(12) as usize;
    let body = HEADER_LEN
        .checked_add(meta_len)
        .filter(|&end| end <= bytes.len())
        .ok_or("metadata runs past end of file")?;
    let meta: CheckpointMeta = serde_json::from_slice(&bytes[HEADER_LEN..body])
        .map_err(|e| format!("bad metadata: {e}"))?;
    let weights = &bytes[body..];
    if weights.len() != 4 * meta.parameter_count {
        return Err(format!(
            "expected {} weights, found {} bytes",
            meta.parameter_count,
            weights.len()
        ));
    }
    let params = weights
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let net =
        PolicyValueNet::from_params(meta.network_config(), params).map_err(|e| e.to_string())?;
    if net.layout() != meta.layout.as_slice() {
        return Err("tensor layout does not match the network configuration".into());
    }
    Ok((meta, net))
}

/// Writes atomically: a temporary sibling is renamed over `path`.
pub fn save(
    path: &Path,
    net: &PolicyValueNet<f32>,
    meta: &CheckpointMeta,
) -> Result<(), CheckpointError> {
    let io = |source| CheckpointError::Io {
        path: path.to_owned(),
        source,
    };
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(&encode(net, meta)).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn load(path: &Path) -> Result<(CheckpointMeta, PolicyValueNet<f32>), CheckpointError> {
    let bytes = fs::read(path).map_err(|source| CheckpointError::Io {
        path: path.to_owned(),
        source,
    })?;
    decode(&bytes).map_err(|reason| CheckpointError::Corrupt {
        path: path.to_owned(),
        reason,
    })
}

/// File name of the checkpoint written after `iteration`.
pub fn file_name(iteration: u32) -> String {
    format!("iter_{iteration:04}.ckpt")
}

/// Highest-numbered `iter_NNNN.ckpt` in `dir`, if any.
pub fn latest(dir: &Path) -> std::io::Result<Option<(u32, PathBuf)>> {
    if !dir.exists() {
        return Ok(None);
    }
    let mut best: Option<(u32, PathBuf)> = None;
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let it = path.file_name().and_then(|n| n.to_str()).and_then(|n| {
            n.strip_prefix("iter_")?
                .strip_suffix(".ckpt")?
                .parse::<u32>()
                .ok()
        });
        if let Some(it) = it {
            if best.as_ref().is_none_or(|(b, _)| it > *b) {
                best = Some((it, path));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alphadda_core::arena::game_rng;

    fn tiny() -> PolicyValueNet<f32> {
        let c = NetworkConfig {
            residual_blocks: 1,
            filters: 4,
            value_hidden: 8,
            policy_hidden: 8,
            ..NetworkConfig::desk(GameVariant::Othello6)
        };
        PolicyValueNet::new(c, &mut game_rng(3, 0))
    }

    #[test]
    fn round_trip_is_exact() {
        let net = tiny();
        let meta = CheckpointMeta::new(&net, 7, 42);
        let bytes = encode(&net, &meta);
        assert_eq!(&bytes[..8], MAGIC);
        let (m, back) = decode(&bytes).unwrap();
        assert_eq!(m, meta);
        assert_eq!(back.params(), net.params());
        assert_eq!(back.config(), net.config());
    }

    #[test]
    fn damage_is_detected() {
        let net = tiny();
        let bytes = encode(&net, &CheckpointMeta::new(&net, 0, 0));
        assert!(decode(&bytes[..bytes.len() - 1])
            .unwrap_err()
            .contains("weights"));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        let mut bad = bytes.clone();
        bad[8] = 9;
        assert!(decode(&bad).unwrap_err().contains("version"));
        assert!(decode(&bytes[..20]).is_err());
    }

    #[test]
    fn latest_picks_highest_iteration() {
        let dir = tempfile::tempdir().unwrap();
        assert!(latest(dir.path()).unwrap().is_none());
        for it in [1, 3, 2] {
            fs::write(dir.path().join(file_name(it)), b"").unwrap();
        }
        fs::write(dir.path().join("notes.txt"), b"").unwrap();
        assert_eq!(latest(dir.path()).unwrap().unwrap().0, 3);
    }
}
