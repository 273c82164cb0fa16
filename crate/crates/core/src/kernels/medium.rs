use super::SegmentBuffer;
use crate::base::WheelPair;
use crate::circle::PrimeOffsetPair;
use crate::wheel::WHEEL;

/// Marks with wheel steps: after the mark at wheel position `s` the offset
/// advances by `deltas[s] * p`, skipping multiples whose cofactor is
/// divisible by 3 or 5.
pub fn sieve_medium_wheel(segment: &mut SegmentBuffer, pairs: &mut [WheelPair]) {
    let size = segment.bits() as u64;
    for pair in pairs.iter_mut() {
        let p = pair.prime() as u64;
        let mut q = pair.q as u64;
        let mut s = pair.wheel_index() as usize;
        let steps: [u64; 8] = WHEEL.deltas.map(|d| d as u64 * p);
        let cycle = 15 * p;
        if q + cycle <= size {
            // a full turn of the wheel returns to the same s
            let mut offsets = [0u64; 8];
            let mut acc = 0;
            for (i, o) in offsets.iter_mut().enumerate() {
                *o = acc;
                acc += steps[(s + i) & 7];
            }
            while q + cycle <= size {
                for o in offsets {
                    segment.mark((q + o) as usize);
                }
                q += cycle;
            }
        }
        while q < size {
            segment.mark(q as usize);
            q += steps[s];
            s = (s + 1) & 7;
        }
        pair.set((q - size) as u32, s as u8);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenseStrategy {
    /// Loop until the offset leaves the segment.
    Naive,
    /// `k` unconditional marks and one predicated mark.
    #[default]
    FixedCount,
}

/// Sieves primes with `floor(2^l/p) = k`, each of which marks `k` or `k+1`
/// bits per segment. Offsets carried over from the previous segment are
/// always below `p`, which leaves room for the `k` unconditional marks.
pub fn sieve_medium_dense(
    segment: &mut SegmentBuffer,
    k: u32,
    pairs: &mut [PrimeOffsetPair],
    strategy: DenseStrategy,
) {
    match strategy {
        DenseStrategy::Naive => sieve_medium_dense_naive(segment, pairs),
        DenseStrategy::FixedCount => dense_fixed(segment, k as u64, pairs),
    }
}

pub fn sieve_medium_dense_naive(segment: &mut SegmentBuffer, pairs: &mut [PrimeOffsetPair]) {
    let size = segment.bits() as u64;
    for pair in pairs.iter_mut() {
        let p = pair.p as u64;
        let mut q = pair.q as u64;
        while q < size {
            segment.mark(q as usize);
            q += p;
        }
        pair.q = (q - size) as u32;
    }
}

fn dense_fixed(segment: &mut SegmentBuffer, k: u64, pairs: &mut [PrimeOffsetPair]) {
    let size = segment.bits() as u64;
    for pair in pairs.iter_mut() {
        let p = pair.p as u64;
        let q = pair.q as u64;
        debug_assert!(size / p == k && q + (k - 1) * p < size);
        for i in 0..k {
            segment.mark((q + i * p) as usize);
        }
        let last = q + k * p;
        let hit = last < size;
        // re-marking q is a no-op, so the miss case needs no branch
        let target = if hit { last } else { q };
        segment.mark(target as usize);
        pair.q = (last + hit as u64 * p - size) as u32;
    }
}
