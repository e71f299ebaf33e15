//! Seed derivation. Every random draw in the crate flows from a single 64-bit
//! root seed through [`SeedStream`], so independent shards (seeds, primes,
//! grid cells) can be generated in any order and still reproduce exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// A counted, splittable seed source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    root: u64,
}

impl SeedStream {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// The `index`-th seed of the substream named `label`.
    pub fn derive(&self, label: &str, index: u64) -> u64 {
        splitmix64(splitmix64(self.root ^ label_hash(label)).wrapping_add(index))
    }

    pub fn child(&self, label: &str, index: u64) -> SeedStream {
        SeedStream::new(self.derive(label, index))
    }

    pub fn rng(&self, label: &str, index: u64) -> Rng {
        Rng::seed_from_u64(self.derive(label, index))
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_separates_labels() {
        let s = SeedStream::new(7);
        assert_eq!(s.derive("a", 3), SeedStream::new(7).derive("a", 3));
        assert_ne!(s.derive("a", 3), s.derive("b", 3));
        assert_ne!(s.derive("a", 3), s.derive("a", 4));
    }
}
