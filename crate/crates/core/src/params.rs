//! Sieve parameters and the mapping between table bits and odd numbers.
//!
//! A run is described by `(l, f, n)`: segments hold `2^l` bits, the first
//! segment has index `f` and `n` segments are sieved. Only odd numbers are
//! represented, so bit `j` of the table stands for `2(f*2^l + j) + 1` and the
//! covered interval is `[f*2^(l+1) + 1, (f+n)*2^(l+1)]`.

use crate::error::{Result, SieveError};

pub const MIN_LOG_SEGMENT: u32 = 10;
pub const MIN_LOG_SEGMENT_TEST: u32 = 4;
pub const MAX_LOG_SEGMENT: u32 = 30;
/// Default segment size: 2^21 bits, i.e. 256 KiB.
pub const DEFAULT_LOG_SEGMENT: u32 = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SieveParams {
    l: u32,
    f: u64,
    n: u64,
    u: u64,
    v: u64,
    test_mode: bool,
}

impl SieveParams {
    pub fn new(l: u32, f: u64, n: u64) -> Result<Self> {
        validate_params(l, f, n, false)
    }

    pub fn new_test(l: u32, f: u64, n: u64) -> Result<Self> {
        validate_params(l, f, n, true)
    }

    pub fn log_segment(&self) -> u32 {
        self.l
    }

    pub fn first_segment(&self) -> u64 {
        self.f
    }

    pub fn segments(&self) -> u64 {
        self.n
    }

    /// First represented number.
    pub fn u(&self) -> u64 {
        self.u
    }

    /// Upper end of the interval (even, never represented itself).
    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn test_mode(&self) -> bool {
        self.test_mode
    }

    pub fn segment_bits(&self) -> u64 {
        1 << self.l
    }

    pub fn segment_bytes(&self) -> usize {
        (self.segment_bits() as usize).div_ceil(8)
    }

    pub fn table_bits(&self) -> u64 {
        self.n << self.l
    }

    pub fn table_bytes(&self) -> u64 {
        self.table_bits().div_ceil(8)
    }

    /// floor(sqrt(v)); every base prime is at most this.
    pub fn sqrt_v(&self) -> u64 {
        isqrt(self.v)
    }

    /// Global bit index (relative to the number 1) of bit 0 of segment `t`.
    pub fn segment_origin(&self, t: u64) -> u64 {
        (self.f + t) << self.l
    }

    pub fn index_to_number(&self, j: u64) -> Result<u64> {
        if j >= self.table_bits() {
            return Err(SieveError::IndexOutOfRange(format!(
                "bit {j} outside table of {} bits",
                self.table_bits()
            )));
        }
        Ok(2 * ((self.f << self.l) + j) + 1)
    }

    pub fn number_to_index(&self, x: u64) -> Result<u64> {
        if x.is_multiple_of(2) {
            return Err(SieveError::IndexOutOfRange(format!(
                "{x} is even and has no table bit"
            )));
        }
        if x < self.u || x > self.v {
            return Err(SieveError::IndexOutOfRange(format!(
                "{x} outside [{}, {}]",
                self.u, self.v
            )));
        }
        Ok((x - 1) / 2 - (self.f << self.l))
    }
}

/// Checks `(l, f, n)` and derives the interval.
///
/// Besides the range of `l`, the interval must lie strictly above its own
/// base (`u^2 > v`) and fit in 64 bits.
pub fn validate_params(l: u32, f: u64, n: u64, test_mode: bool) -> Result<SieveParams> {
    let min = if test_mode {
        MIN_LOG_SEGMENT_TEST
    } else {
        MIN_LOG_SEGMENT
    };
    if !(min..=MAX_LOG_SEGMENT).contains(&l) {
        return Err(SieveError::LOutOfRange {
            l,
            min,
            max: MAX_LOG_SEGMENT,
        });
    }
    if n == 0 {
        return Err(SieveError::FZeroOrOverlap(
            "segment count must be at least 1".into(),
        ));
    }
    let numbers_per_segment = 1u128 << (l + 1);
    let u = f as u128 * numbers_per_segment + 1;
    let v = (f as u128 + n as u128) * numbers_per_segment;
    if v >= 1u128 << 64 {
        return Err(SieveError::Overflow(format!(
            "upper end (f+n)*2^(l+1) = {v} does not fit in 64 bits"
        )));
    }
    if f == 0 || u * u <= v {
        return Err(SieveError::FZeroOrOverlap(format!(
            "interval [{u}, {v}] must lie above its square root (u^2 > v)"
        )));
    }
    let u = u as u64;
    let v = v as u64;
    debug_assert!(isqrt(v) < 1 << 32);
    Ok(SieveParams {
        l,
        f,
        n,
        u,
        v,
        test_mode,
    })
}

/// First segment index whose interval is centred near `10^e` for a run of
/// `n` segments of `2^l` bits.
pub fn params_from_midpoint(e: u32, l: u32, n: u64) -> Result<u64> {
    if e > 19 {
        return Err(SieveError::Overflow(format!(
            "10^{e} does not fit in 64 bits"
        )));
    }
    let mid = 10u128.pow(e);
    let centre = (mid >> (l.min(126) + 1)) as u64;
    let f = centre
        .checked_sub(n / 2)
        .filter(|&f| f > 0)
        .ok_or_else(|| {
            SieveError::FZeroOrOverlap(format!(
                "midpoint 10^{e} is too small for {n} segments of 2^{l} bits"
            ))
        })?;
    Ok(f)
}

/// Integer square root, exact for all u64 inputs.
pub fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    r
}
