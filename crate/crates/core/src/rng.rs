//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a stream identified by
//! `(seed, index, tag)`. The seed and tag select a ChaCha key, the index
//! selects the ChaCha stream, so replicate `r` never shares state with
//! replicate `r'` and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags. Distinct tags give unrelated streams for the same seed.
pub mod tag {
    pub const WILD: u64 = 0x5749_4c44_0000_0001;
    pub const WILD_X: u64 = 0x5749_4c44_0000_0002;
    pub const WILD_Y: u64 = 0x5749_4c44_0000_0003;
    pub const PERMUTATION: u64 = 0x5045_524d_0000_0001;
    pub const SHIFT: u64 = 0x5348_4946_0000_0001;
    pub const DATA: u64 = 0x4441_5441_0000_0001;
    pub const DATA_AUX: u64 = 0x4441_5441_0000_0002;
    pub const DATA_BACKWARD: u64 = 0x4441_5441_0000_0003;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub index: u64,
    pub tag: u64,
}

impl StreamKey {
    pub fn new(seed: u64, index: u64, tag: u64) -> Self {
        Self { seed, index, tag }
    }

    pub fn rng(&self) -> StreamRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.tag.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.index);
        rng
    }
}

/// SplitMix64 finalizer; derives child seeds (e.g. per trial) from a parent seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
