//! The base: every odd prime up to sqrt(v), split by size and prepared with
//! its first offset.

use crate::circle::{bucket_base, bucket_entries, Circle, CircleSet, PrimeOffsetPair};
use crate::error::{Result, SieveError};
use crate::oracle::simple_sieve;
use crate::params::SieveParams;
use crate::wheel::{
    first_offset, small_prime_masks, wheel_align, SmallPrimeMask, SMALL_PRIME_LIMIT,
};

/// Dense medium primes sieve at most this many times per segment.
pub const DENSE_MAX_MARKS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeClass {
    /// Marked by word masks.
    Small,
    /// `64 <= p <= 2^l/16`, marked with wheel steps.
    WheelMedium,
    /// `2^l/16 < p < 2^l`, marked `k` or `k+1` times per segment.
    DenseMedium { k: u32 },
    /// `p > 2^l`, kept in circle `k`.
    Large { k: u32 },
}

pub fn classify_prime(p: u64, l: u32) -> PrimeClass {
    let seg = 1u64 << l;
    if p < SMALL_PRIME_LIMIT.min(seg) {
        PrimeClass::Small
    } else if p < seg {
        if p * DENSE_MAX_MARKS <= seg {
            PrimeClass::WheelMedium
        } else {
            PrimeClass::DenseMedium {
                k: (seg / p) as u32,
            }
        }
    } else {
        PrimeClass::Large { k: (p >> l) as u32 }
    }
}

/// A wheel-medium pair. The wheel position lives in the top three bits of the
/// prime word, which are free since these primes are below 2^26.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WheelPair {
    packed: u32,
    pub q: u32,
}

impl WheelPair {
    const SHIFT: u32 = 29;
    const PRIME_MASK: u32 = (1 << Self::SHIFT) - 1;

    pub fn new(p: u32, q: u32, s: u8) -> Self {
        debug_assert!(p <= Self::PRIME_MASK && s < 8);
        WheelPair {
            packed: p | (s as u32) << Self::SHIFT,
            q,
        }
    }

    #[inline]
    pub fn prime(&self) -> u32 {
        self.packed & Self::PRIME_MASK
    }

    #[inline]
    pub fn wheel_index(&self) -> u8 {
        (self.packed >> Self::SHIFT) as u8
    }

    #[inline]
    pub fn set(&mut self, q: u32, s: u8) {
        self.packed = self.prime() | (s as u32) << Self::SHIFT;
        self.q = q;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BaseLimits {
    pub max_base_primes: usize,
    pub max_bucket_entries: u64,
}

impl Default for BaseLimits {
    fn default() -> Self {
        BaseLimits {
            max_base_primes: 1 << 28,
            max_bucket_entries: 1 << 28,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaseTable {
    pub masks: Vec<SmallPrimeMask>,
    pub wheel: Vec<WheelPair>,
    /// `dense[k]` holds the primes with `floor(2^l/p) = k`; index 0 is unused.
    pub dense: Vec<Vec<PrimeOffsetPair>>,
    pub circles: CircleSet,
    /// Number of odd base primes, `|P|`.
    pub prime_count: usize,
    pub max_prime: u64,
}

impl BaseTable {
    /// K, the highest circle order.
    pub fn max_order(&self) -> usize {
        self.circles.max_order()
    }
}

pub fn build_base(params: &SieveParams) -> Result<BaseTable> {
    build_base_with(params, BaseLimits::default())
}

pub fn build_base_with(params: &SieveParams, limits: BaseLimits) -> Result<BaseTable> {
    let l = params.log_segment();
    let f = params.first_segment();
    let sqrt_v = params.sqrt_v();
    let primes = simple_sieve(sqrt_v)?;
    let odd: &[u64] = primes.get(1..).unwrap_or(&[]);
    if odd.len() > limits.max_base_primes {
        return Err(SieveError::AllocLimit(format!(
            "{} base primes exceed the cap of {}",
            odd.len(),
            limits.max_base_primes
        )));
    }
    let max_prime = odd.last().copied().unwrap_or(2);
    let max_order = max_prime >> l;
    if bucket_entries(max_order) > limits.max_bucket_entries {
        return Err(SieveError::AllocLimit(format!(
            "{} bucket entries exceed the cap of {}",
            bucket_entries(max_order),
            limits.max_bucket_entries
        )));
    }

    let mut wheel = Vec::new();
    let mut dense = vec![Vec::new(); DENSE_MAX_MARKS as usize];
    let mut large = Vec::new();
    for &p in odd {
        match classify_prime(p, l) {
            PrimeClass::Small => {}
            PrimeClass::WheelMedium => {
                let (q, s) = wheel_align(p, first_offset(p, l, f), l, f);
                wheel.push(WheelPair::new(p as u32, q as u32, s));
            }
            PrimeClass::DenseMedium { k } => {
                dense[k as usize]
                    .push(PrimeOffsetPair::new(p as u32, first_offset(p, l, f) as u32));
            }
            PrimeClass::Large { .. } => large.push(p),
        }
    }
    let circles = init_circles(&large, params, max_order as usize);
    Ok(BaseTable {
        masks: small_prime_masks(params),
        wheel,
        dense,
        circles,
        prime_count: odd.len(),
        max_prime,
    })
}

/// Lays out the large primes in the state for segment 0.
///
/// `large` must be ascending. Each prime's first offset `q' < p` is split as
/// `q' = d*2^l + q`; the pair `(p, q)` goes into bucket `d` of its circle.
pub fn init_circles(large: &[u64], params: &SieveParams, max_order: usize) -> CircleSet {
    let l = params.log_segment();
    let f = params.first_segment();
    let low_mask = (1u64 << l) - 1;
    let mut circles = Vec::with_capacity(max_order + 1);
    let mut buckets = vec![0u32; bucket_entries(max_order as u64) as usize];
    let mut pairs = Vec::with_capacity(large.len());
    let mut keyed: Vec<(u64, u64)> = Vec::new();
    let mut rest = large;
    for k in 0..=max_order {
        let split = rest.partition_point(|&p| p >> l == k as u64);
        let (members, tail) = rest.split_at(split);
        rest = tail;
        debug_assert!(k > 0 || members.is_empty());
        let start = pairs.len();
        keyed.clear();
        keyed.extend(members.iter().map(|&p| (first_offset(p, l, f), p)));
        keyed.sort_unstable_by_key(|&(q, _)| q);
        let base = bucket_base(k);
        let mut next = 0;
        for d in 0..=k {
            while next < keyed.len() && keyed[next].0 >> l < d as u64 {
                next += 1;
            }
            buckets[base + d] = (start + next) as u32;
        }
        pairs.extend(
            keyed
                .iter()
                .map(|&(q, p)| PrimeOffsetPair::new(p as u32, (q & low_mask) as u32)),
        );
        circles.push(Circle {
            end: pairs.len() as u32,
            current: 0,
            broken: k as u32,
        });
    }
    debug_assert!(rest.is_empty());
    CircleSet {
        l,
        circles,
        buckets,
        pairs,
    }
}
