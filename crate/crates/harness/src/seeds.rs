//! Per-run seed derivation.

use sha2::{Digest, Sha256};

/// Seed of pair `pair` on `instance` under `master`. The algorithm is not an
/// input, so paired runs of different algorithms share their start tour.
pub fn derive_seed(master: u64, instance: &str, pair: u32) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((instance.len() as u64).to_le_bytes());
    h.update(instance.as_bytes());
    h.update(pair.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
