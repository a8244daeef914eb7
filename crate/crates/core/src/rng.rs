//! Counter-based random streams.
//!
//! Every draw in the simulator is addressed by a path of tags such as
//! `(seed, trial, block, subblock, link)`. A [`RngStream`] hashes that path
//! into a 64-bit key and produces output by hashing `(key, counter)`, so a
//! draw depends only on its address and never on how many other draws were
//! made before it or on which thread made them.

use rand_core::{impls, RngCore};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const TAG_GAMMA: u64 = 0xd1b5_4a32_d192_ed03;

/// MurmurHash3 / SplitMix64 finalizer.
#[inline]
fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed, counter-based generator.
///
/// Cloning a stream clones its position; use [`RngStream::substream`] to
/// obtain statistically independent children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    counter: u64,
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn new(seed: u64) -> Self {
        Self {
            key: fmix64(seed ^ 0x6a09_e667_f3bc_c909),
            counter: 0,
        }
    }

    /// Child stream addressed by `tag`. Independent of this stream's
    /// position, so `s.substream(t)` is the same before and after drawing
    /// from `s`.
    pub fn substream(&self, tag: u64) -> Self {
        let salted = tag.wrapping_mul(TAG_GAMMA).wrapping_add(TAG_GAMMA);
        Self {
            key: fmix64(self.key ^ fmix64(salted)).rotate_left(17) ^ self.key,
            counter: 0,
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        fmix64(self.key ^ fmix64(c.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA)))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}
