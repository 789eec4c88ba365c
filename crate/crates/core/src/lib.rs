//! Acoustic scene classification from log-frequency spectrogram images.
//!
//! The crate covers the whole pipeline: WAV decoding ([`audio`]), spectrogram
//! rendering ([`dsp`]), seeded augmentation ([`augment`]), manifests, splits
//! and batching ([`dataset`]), a small convolutional classifier trained from
//! scratch ([`model`]) and evaluation reports ([`eval`]).

pub mod audio;
pub mod augment;
pub mod dataset;
pub mod dsp;
pub mod eval;
pub mod model;
pub mod rng;
pub mod synthetic;

/// 64-bit FNV-1a hash, used for spec and class-map fingerprints.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
