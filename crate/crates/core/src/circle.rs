//! Circles and buckets for large primes.
//!
//! Primes between `k*2^l` and `(k+1)*2^l` form circle `k`, a cyclic sequence
//! of `k+1` buckets. The pairs of a circle are one contiguous run of the pair
//! array; each bucket is a contiguous slice of that run, except the broken
//! bucket, whose slice wraps from the end of the circle back to its start.
//! The bucket array stores, for every bucket, the pair index of its first
//! pair. When segment `t` is sieved, bucket `t mod (k+1)` of circle `k` holds
//! exactly the pairs that mark a bit in that segment.

use std::fmt;
use std::ops::Range;

use crate::params::SieveParams;

/// A prime with the offset of its next mark.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PrimeOffsetPair {
    pub p: u32,
    pub q: u32,
}

impl PrimeOffsetPair {
    pub fn new(p: u32, q: u32) -> Self {
        PrimeOffsetPair { p, q }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Circle {
    /// One past the last pair of this circle in the pair array.
    pub(crate) end: u32,
    /// Bucket holding the pairs for the upcoming segment.
    pub(crate) current: u32,
    /// Bucket whose slice may wrap around the circle.
    pub(crate) broken: u32,
}

impl Circle {
    pub fn end(&self) -> u32 {
        self.end
    }
    pub fn current(&self) -> u32 {
        self.current
    }
    pub fn broken(&self) -> u32 {
        self.broken
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSet {
    pub(crate) l: u32,
    pub(crate) circles: Vec<Circle>,
    pub(crate) buckets: Vec<u32>,
    pub(crate) pairs: Vec<PrimeOffsetPair>,
}

/// Index of bucket 0 of circle `k` in the flat bucket array.
#[inline]
pub fn bucket_base(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Number of bucket entries for circles `0..=max_order`.
pub fn bucket_entries(max_order: u64) -> u64 {
    (max_order + 1) * (max_order + 2) / 2
}

impl CircleSet {
    pub fn log_segment(&self) -> u32 {
        self.l
    }

    /// K, the highest circle order.
    pub fn max_order(&self) -> usize {
        self.circles.len() - 1
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn buckets(&self) -> &[u32] {
        &self.buckets
    }

    pub fn pairs(&self) -> &[PrimeOffsetPair] {
        &self.pairs
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn circle_range(&self, k: usize) -> Range<usize> {
        let start = if k == 0 {
            0
        } else {
            self.circles[k - 1].end as usize
        };
        start..self.circles[k].end as usize
    }

    pub fn bucket_entry(&self, k: usize, d: usize) -> u32 {
        self.buckets[bucket_base(k) + d]
    }

    /// Physical slices of bucket `d` of circle `k`. The second slice is
    /// non-empty only for the broken bucket.
    pub fn bucket_slices(&self, k: usize, d: usize) -> (Range<usize>, Range<usize>) {
        let range = self.circle_range(k);
        let lo = self.bucket_entry(k, d) as usize;
        let hi = self.bucket_entry(k, (d + 1) % (k + 1)) as usize;
        if d as u32 == self.circles[k].broken {
            (lo..range.end, range.start..hi)
        } else {
            (lo..hi, 0..0)
        }
    }

    pub fn bucket_len(&self, k: usize, d: usize) -> usize {
        let (a, b) = self.bucket_slices(k, d);
        a.len() + b.len()
    }

    pub fn bucket_pairs(&self, k: usize, d: usize) -> impl Iterator<Item = &PrimeOffsetPair> + '_ {
        let (a, b) = self.bucket_slices(k, d);
        self.pairs[a].iter().chain(self.pairs[b].iter())
    }

    /// Sorted pair multiset of every bucket plus the current bucket of every
    /// circle. Two sets with equal snapshots sieve identically from here on,
    /// whatever their in-bucket order or wrap representation.
    pub fn snapshot(&self) -> CircleSnapshot {
        let mut buckets = Vec::with_capacity(self.buckets.len());
        let mut current = Vec::with_capacity(self.circles.len());
        for (k, circle) in self.circles.iter().enumerate() {
            current.push(circle.current);
            for d in 0..=k {
                let mut pairs: Vec<PrimeOffsetPair> = self.bucket_pairs(k, d).copied().collect();
                pairs.sort_unstable();
                buckets.push(pairs);
            }
        }
        CircleSnapshot { current, buckets }
    }

    /// Marks an arbitrary pair's offset; used for fault injection in tests.
    #[doc(hidden)]
    pub fn pairs_mut(&mut self) -> &mut [PrimeOffsetPair] {
        &mut self.pairs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSnapshot {
    pub current: Vec<u32>,
    pub buckets: Vec<Vec<PrimeOffsetPair>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantViolation {
    WrongCurrentBucket {
        k: usize,
        expected: u64,
        found: u32,
    },
    BrokenIndexOutOfRange {
        k: usize,
        broken: u32,
    },
    BucketLayout {
        k: usize,
        detail: String,
    },
    PrimeOutsideCircle {
        k: usize,
        d: usize,
        pair: PrimeOffsetPair,
    },
    OffsetTooLarge {
        k: usize,
        d: usize,
        pair: PrimeOffsetPair,
    },
    NotDivisible {
        k: usize,
        d: usize,
        pair: PrimeOffsetPair,
        number: u128,
    },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InvariantViolation::*;
        match self {
            WrongCurrentBucket { k, expected, found } => {
                write!(f, "circle {k}: current bucket {found}, expected {expected}")
            }
            BrokenIndexOutOfRange { k, broken } => {
                write!(f, "circle {k}: broken bucket index {broken} out of range")
            }
            BucketLayout { k, detail } => write!(f, "circle {k}: {detail}"),
            PrimeOutsideCircle { k, d, pair } => {
                write!(f, "circle {k} bucket {d}: prime {} outside circle", pair.p)
            }
            OffsetTooLarge { k, d, pair } => {
                write!(
                    f,
                    "circle {k} bucket {d}: offset {} of prime {} too large",
                    pair.q, pair.p
                )
            }
            NotDivisible { k, d, pair, number } => write!(
                f,
                "circle {k} bucket {d}: prime {} does not divide {number} (offset {})",
                pair.p, pair.q
            ),
        }
    }
}

/// Checks the circle/bucket invariants for the state before sieving segment `t`.
///
/// For circle `k` with current bucket `b = t mod (k+1)`, every pair `(p, q)`
/// in bucket `d` must satisfy `k*2^l < p < (k+1)*2^l`, `q < 2^l`, and
/// `p | 2((f+t+d-b)*2^l + q) + 1` when `d >= b`, or
/// `p | 2((f+t+d-b+k+1)*2^l + q) + 1` when `d < b`.
pub fn validate_circle_invariants(
    circles: &CircleSet,
    params: &SieveParams,
    t: u64,
) -> Result<(), InvariantViolation> {
    let l = params.log_segment();
    let seg = 1u128 << l;
    let f = params.first_segment() as u128;
    let mut prev_end = 0usize;
    for (k, circle) in circles.circles.iter().enumerate() {
        let order = k as u64 + 1;
        let b = t % order;
        if circle.current as u64 != b {
            return Err(InvariantViolation::WrongCurrentBucket {
                k,
                expected: b,
                found: circle.current,
            });
        }
        if circle.broken as usize > k {
            return Err(InvariantViolation::BrokenIndexOutOfRange {
                k,
                broken: circle.broken,
            });
        }
        let range = circles.circle_range(k);
        if range.start != prev_end || range.end < range.start || range.end > circles.pairs.len() {
            return Err(InvariantViolation::BucketLayout {
                k,
                detail: format!("pair range {range:?} not contiguous"),
            });
        }
        prev_end = range.end;
        let mut total = 0;
        for d in 0..=k {
            let (a, w) = circles.bucket_slices(k, d);
            let entries_ok = |r: &Range<usize>| {
                r.start <= r.end && (r.is_empty() || (r.start >= range.start && r.end <= range.end))
            };
            if !entries_ok(&a) || !entries_ok(&w) {
                return Err(InvariantViolation::BucketLayout {
                    k,
                    detail: format!("bucket {d} slices {a:?} {w:?} outside {range:?}"),
                });
            }
            total += a.len() + w.len();
            for pair in circles.pairs[a].iter().chain(circles.pairs[w].iter()) {
                let p = pair.p as u128;
                if !(k as u128 * seg < p && p < (k as u128 + 1) * seg) {
                    return Err(InvariantViolation::PrimeOutsideCircle { k, d, pair: *pair });
                }
                if pair.q as u128 >= seg {
                    return Err(InvariantViolation::OffsetTooLarge { k, d, pair: *pair });
                }
                let segment = if (d as u64) < b {
                    f + t as u128 + d as u128 + order as u128 - b as u128
                } else {
                    f + t as u128 + d as u128 - b as u128
                };
                let number = 2 * (segment * seg + pair.q as u128) + 1;
                if !number.is_multiple_of(p) {
                    return Err(InvariantViolation::NotDivisible {
                        k,
                        d,
                        pair: *pair,
                        number,
                    });
                }
            }
        }
        if total != range.len() {
            return Err(InvariantViolation::BucketLayout {
                k,
                detail: format!("buckets cover {total} pairs, circle has {}", range.len()),
            });
        }
    }
    Ok(())
}
