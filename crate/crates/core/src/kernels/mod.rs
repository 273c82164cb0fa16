//! Per-segment marking kernels.
//!
//! Every kernel only ever sets bits, so the order in which they run does not
//! change the finished segment. The driver runs them as masks, wheel-medium,
//! dense-medium, large.

mod large;
mod masks;
mod medium;

pub use large::{
    advance_pair_large, sieve_large, sieve_large_observed, LargeMarkObserver, LargeStrategy,
    UNROLL_LOG2,
};
pub use masks::apply_small_masks;
pub use medium::{sieve_medium_dense, sieve_medium_dense_naive, sieve_medium_wheel, DenseStrategy};

/// One `2^l`-bit segment of the sieve table. A set bit means composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentBuffer {
    l: u32,
    words: Vec<u64>,
}

impl SegmentBuffer {
    pub fn new(l: u32) -> Self {
        let words = ((1usize << l) / 64).max(1);
        SegmentBuffer {
            l,
            words: vec![0; words],
        }
    }

    pub fn log_segment(&self) -> u32 {
        self.l
    }

    pub fn bits(&self) -> usize {
        1 << self.l
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    #[inline]
    pub fn mark(&mut self, q: usize) {
        self.words[q >> 6] |= 1 << (q & 63);
    }

    #[inline]
    pub fn is_marked(&self, q: usize) -> bool {
        self.words[q >> 6] >> (q & 63) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Clears bits beyond `2^l` in segments shorter than one word.
    pub(crate) fn trim(&mut self) {
        if self.l < 6 {
            self.words[0] &= (1u64 << (1 << self.l)) - 1;
        }
    }

    /// Number of clear bits, i.e. primes in this segment.
    pub fn count_clear(&self) -> u64 {
        self.bits() as u64
            - self
                .words
                .iter()
                .map(|w| w.count_ones() as u64)
                .sum::<u64>()
    }

    /// Offsets of clear bits, ascending.
    pub fn clear_offsets(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits();
        self.words.iter().enumerate().flat_map(move |(i, &w)| {
            let mut free = !w;
            std::iter::from_fn(move || {
                if free == 0 {
                    return None;
                }
                let b = free.trailing_zeros() as usize;
                free &= free - 1;
                Some(i * 64 + b)
            })
            .take_while(move |&q| q < bits)
        })
    }

    /// Table bytes for this segment: bit `q` is bit `q % 8` of byte `q / 8`.
    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        let bytes = (self.bits() / 8).max(1);
        let start = out.len();
        out.extend(self.words.iter().flat_map(|w| w.to_le_bytes()));
        out.truncate(start + bytes);
    }
}
