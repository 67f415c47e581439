//! Deterministic random sub-streams.
//!
//! Every random draw in the crate comes from a [`SeedTree`] node. The root is
//! `SHA-256("ddoec/v1" || master_seed as u64 LE)`; a child is
//! `SHA-256(parent || tag bytes || 0x00 || index as u64 LE)`. The 32-byte node
//! value keys a ChaCha8 generator (`rand_chacha::ChaCha8Rng::from_seed`), so
//! any implementation of SHA-256 and ChaCha8 reproduces the same streams.
//!
//! Per-link shadowing uses a counter-based draw instead of a sequential
//! stream so that the same (UE, DBS) pair sees the same value regardless of
//! which links a flavor happens to evaluate; see [`SeedTree::keyed_normal`].

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree([u8; 32]);

impl std::fmt::Debug for SeedTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SeedTree(")?;
        for b in &self.0[..8] {
            write!(f, "{b:02x}")?;
        }
        write!(f, "..)")
    }
}

impl SeedTree {
    pub fn root(master_seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"ddoec/v1");
        h.update(master_seed.to_le_bytes());
        SeedTree(h.finalize().into())
    }

    pub fn child(&self, tag: &str, index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(self.0);
        h.update(tag.as_bytes());
        h.update([0u8]);
        h.update(index.to_le_bytes());
        SeedTree(h.finalize().into())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.0)
    }

    /// First eight bytes of the node as a little-endian integer.
    pub fn as_u64(&self) -> u64 {
        u64::from_le_bytes(self.0[..8].try_into().expect("8 bytes"))
    }

    /// Standard normal draw addressed by `(a, b)` under this node.
    ///
    /// A SplitMix64 generator is seeded with
    /// `as_u64() + splitmix64(a·0x9E3779B97F4A7C15 ⊕ b)` and fed to the
    /// `rand_distr` ziggurat sampler.
    pub fn keyed_normal(&self, a: u64, b: u64) -> f64 {
        let state = self
            .as_u64()
            .wrapping_add(splitmix64(a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b));
        StandardNormal.sample(&mut SplitMix64 { state })
    }
}

/// Minimal SplitMix64 generator used for counter-addressed draws.
struct SplitMix64 {
    state: u64,
}

impl rand::RngCore for SplitMix64 {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        splitmix64_next(&mut self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
