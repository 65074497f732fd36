//! Run provenance embedded in every result file: enough to reproduce the
//! run byte-for-byte.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: String,
}

impl Provenance {
    pub fn new(command: &str, config_bytes: &str, seed: Option<u64>) -> Self {
        Provenance {
            command: command.to_owned(),
            config_hash: format!("{:016x}", fnv1a64(config_bytes.as_bytes())),
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }
}

/// FNV-1a, 64-bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_ne!(fnv1a64(b"a = 1"), fnv1a64(b"a = 2"));
        let p1 = Provenance::new("fit", "a = 1", Some(7));
        let p2 = Provenance::new("fit", "a = 1", Some(7));
        assert_eq!(p1.config_hash, p2.config_hash);
    }
}
