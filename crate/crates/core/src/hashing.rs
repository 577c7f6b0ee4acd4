//! Seed derivation and string hashing.
//!
//! One documented 64-bit hash (FNV-1a) backs everything that must be stable
//! across runs and platforms: deriving per-stream RNG seeds, deriving
//! per-(cell, repetition) experiment seeds, and hashing categorical feature
//! strings during log ingestion. Adding experiment cells therefore never
//! perturbs the streams of existing cells.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over `bytes`, folding `seed` into the initial state.
pub fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive an independent stream seed from a base seed and a textual tag.
pub fn stream_seed(base: u64, tag: &str) -> u64 {
    let mut buf = [0u8; 8];
    buf.copy_from_slice(&base.to_le_bytes());
    fnv1a64(fnv1a64(0, &buf), tag.as_bytes())
}

/// Derive the seed for one (cell, repetition) run of an experiment matrix.
pub fn cell_seed(base: u64, cell_index: usize, repetition: usize) -> u64 {
    let mut buf = [0u8; 24];
    buf[..8].copy_from_slice(&base.to_le_bytes());
    buf[8..16].copy_from_slice(&(cell_index as u64).to_le_bytes());
    buf[16..].copy_from_slice(&(repetition as u64).to_le_bytes());
    fnv1a64(0, &buf)
}
