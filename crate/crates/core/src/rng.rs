//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, domain)` and selected by a 64-bit stream index. ChaCha is a
//! counter-based generator, so streams with different indices are
//! independent and can be consumed in any order or on any thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Separates the key space of unrelated consumers sharing one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Weights = 0x5745_4947_4854_5321,
    Edges = 0x4544_4745_5321_0000,
    Pairs = 0x5041_4952_5300_0000,
    Centers = 0x4345_4e54_4552_5300,
    Harness = 0x4841_524e_4553_5300,
}

/// Opens stream `index` of `(seed, domain)`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Derives a child seed from a parent seed and a path of integer labels.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0xd1b5_4a32_d192_ed03)));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw in `(0, 1]`, safe to pass to `ln`.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}
