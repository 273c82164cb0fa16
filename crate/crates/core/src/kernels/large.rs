//! Large primes: sieving the current bucket of every circle in place.
//!
//! After marking bit `q`, a pair's next mark is `k` or `k+1` segments ahead.
//! Pairs due in `k` segments move into the previous bucket, which physically
//! ends where the current bucket begins, so they are written at the low end
//! of the bucket and the bucket's lower boundary moves up. Pairs due in
//! `k+1` segments stay and are written at the high end.

use super::SegmentBuffer;
use crate::circle::{bucket_base, CircleSet, PrimeOffsetPair};

/// Batches of `2^UNROLL_LOG2` steps run without termination or wrap checks.
pub const UNROLL_LOG2: u32 = 4;
const UNROLL: usize = 1 << UNROLL_LOG2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LargeStrategy {
    /// One pair in flight, every step checked.
    SingleEnded,
    /// Two pairs in flight, one from each end of the bucket.
    Interleaved,
    /// Interleaved, with batched steps; broken buckets are batched over
    /// the distance to the nearer circle boundary until one side wraps.
    #[default]
    Unrolled,
}

/// Receives every mark made by the large-prime path.
pub trait LargeMarkObserver {
    fn mark(&mut self, p: u32, q: u32);
}

impl<F: FnMut(u32, u32)> LargeMarkObserver for F {
    #[inline]
    fn mark(&mut self, p: u32, q: u32) {
        self(p, q)
    }
}

struct Silent;

impl LargeMarkObserver for Silent {
    #[inline(always)]
    fn mark(&mut self, _: u32, _: u32) {}
}

/// Next mark of a large prime in circle `k` after marking offset `q`:
/// returns how many segments ahead it is and its offset there.
pub fn advance_pair_large(p: u64, q: u64, k: u64, l: u32) -> (u64, u64) {
    let next = q + p - (k << l);
    if next < 1 << l {
        (k, next)
    } else {
        (k + 1, next - (1 << l))
    }
}

pub fn sieve_large(segment: &mut SegmentBuffer, circles: &mut CircleSet, strategy: LargeStrategy) {
    sieve_large_observed(segment, circles, strategy, &mut Silent)
}

/// Sieves the current bucket of every circle and moves every circle to its
/// next state.
pub fn sieve_large_observed<O: LargeMarkObserver>(
    segment: &mut SegmentBuffer,
    circles: &mut CircleSet,
    strategy: LargeStrategy,
    observer: &mut O,
) {
    let l = circles.l;
    debug_assert_eq!(segment.log_segment(), l);
    let CircleSet {
        circles: ring,
        buckets,
        pairs,
        ..
    } = circles;
    for k in 1..ring.len() {
        let start = ring[k - 1].end as usize;
        let circle = &mut ring[k];
        let end = circle.end as usize;
        let order = k + 1;
        let b = circle.current as usize;
        let next = (b + 1) % order;
        circle.current = next as u32;
        if start == end {
            continue;
        }
        let base = bucket_base(k);
        let prev = (b + k) % order;
        let slice = &mut pairs[start..end];
        let len = slice.len();
        let mut lo = buckets[base + b] as usize - start;
        let mut hi = buckets[base + next] as usize - start;
        let broken = circle.broken as usize == b;
        let m = if broken { len - lo + hi } else { hi - lo };
        if m == 0 {
            continue;
        }
        let mut wrapped = false;
        if broken {
            if lo == len {
                lo = 0;
                wrapped = true;
            }
            if hi == 0 {
                hi = len;
            }
        }
        let mut step = Step {
            words: segment.words_mut(),
            span: (k as u64) << l,
            seg: 1 << l,
            observer: &mut *observer,
        };
        let (lo, w) = match strategy {
            LargeStrategy::SingleEnded => single_ended(slice, lo, hi, m, &mut step),
            LargeStrategy::Interleaved => interleaved(slice, lo, hi, m, &mut step),
            LargeStrategy::Unrolled => unrolled(slice, lo, hi, m, &mut step),
        };
        buckets[base + b] = (start + lo) as u32;
        if wrapped || w {
            circle.broken = prev as u32;
        }
    }
}

struct Step<'a, O> {
    words: &'a mut [u64],
    span: u64,
    seg: u64,
    observer: &'a mut O,
}

impl<O: LargeMarkObserver> Step<'_, O> {
    /// Marks the pair's bit and returns the advanced pair and whether it
    /// belongs to the previous bucket.
    #[inline(always)]
    fn run(&mut self, pair: PrimeOffsetPair) -> (PrimeOffsetPair, bool) {
        let q = pair.q as u64;
        self.words[(q >> 6) as usize] |= 1 << (q & 63);
        self.observer.mark(pair.p, pair.q);
        let next = q + pair.p as u64 - self.span;
        let to_prev = next < self.seg;
        let q = if to_prev { next } else { next - self.seg };
        (PrimeOffsetPair::new(pair.p, q as u32), to_prev)
    }
}

// All three walkers take circle-local indices: `lo` is the first pair of the
// bucket, `hi` one past its last, `m >= 1` its size. When `lo >= hi` the
// bucket wraps around the end of the circle. They return the new lower
// boundary and whether it wrapped to the start of the circle.

fn single_ended<O: LargeMarkObserver>(
    pairs: &mut [PrimeOffsetPair],
    mut lo: usize,
    mut hi: usize,
    mut m: usize,
    step: &mut Step<'_, O>,
) -> (usize, bool) {
    let len = pairs.len();
    let mut wrapped = false;
    let mut cur = pairs[lo];
    loop {
        let (pair, to_prev) = step.run(cur);
        m -= 1;
        if to_prev {
            pairs[lo] = pair;
            lo += 1;
            if m == 0 {
                break;
            }
            if lo == len {
                lo = 0;
                wrapped = true;
            }
            cur = pairs[lo];
        } else {
            if hi == 0 {
                hi = len;
            }
            hi -= 1;
            if m == 0 {
                debug_assert_eq!(hi, lo);
                pairs[hi] = pair;
                break;
            }
            cur = std::mem::replace(&mut pairs[hi], pair);
        }
    }
    (lo, wrapped)
}

fn interleaved<O: LargeMarkObserver>(
    pairs: &mut [PrimeOffsetPair],
    mut lo: usize,
    hi: usize,
    m: usize,
    step: &mut Step<'_, O>,
) -> (usize, bool) {
    let len = pairs.len();
    let mut wrapped = false;
    let mut top = if hi == 0 { len - 1 } else { hi - 1 };
    // slots `lo` and `top` are free: their pairs are held in x and y
    let mut x = pairs[lo];
    let mut y = pairs[top];
    for _ in 1..m {
        let (pair, to_prev) = step.run(x);
        if to_prev {
            pairs[lo] = pair;
            lo += 1;
            if lo == len {
                lo = 0;
                wrapped = true;
            }
            x = pairs[lo];
        } else {
            pairs[top] = pair;
            top = if top == 0 { len - 1 } else { top - 1 };
            x = y;
            y = pairs[top];
        }
    }
    finish(pairs, lo, x, step, wrapped)
}

#[inline(always)]
fn finish<O: LargeMarkObserver>(
    pairs: &mut [PrimeOffsetPair],
    mut lo: usize,
    x: PrimeOffsetPair,
    step: &mut Step<'_, O>,
    wrapped: bool,
) -> (usize, bool) {
    let (pair, to_prev) = step.run(x);
    pairs[lo] = pair;
    lo += to_prev as usize;
    (lo, wrapped)
}

fn unrolled<O: LargeMarkObserver>(
    pairs: &mut [PrimeOffsetPair],
    lo: usize,
    hi: usize,
    m: usize,
    step: &mut Step<'_, O>,
) -> (usize, bool) {
    let len = pairs.len();
    let mut st = Walk {
        lo,
        top: if hi == 0 { len - 1 } else { hi - 1 },
        x: pairs[lo],
        y: pairs[if hi == 0 { len - 1 } else { hi - 1 }],
        wrapped: false,
    };
    let mut left = m - 1;
    // broken bucket: batch over the distance to the nearer circle boundary
    while left > 0 && st.lo > st.top {
        let safe = (len - 1 - st.lo).min(st.top).min(left);
        if safe == 0 {
            st.checked(pairs, step);
            left -= 1;
        } else {
            st.batched(pairs, step, safe);
            left -= safe;
        }
    }
    st.batched(pairs, step, left);
    finish(pairs, st.lo, st.x, step, st.wrapped)
}

struct Walk {
    lo: usize,
    top: usize,
    x: PrimeOffsetPair,
    y: PrimeOffsetPair,
    wrapped: bool,
}

impl Walk {
    fn checked<O: LargeMarkObserver>(
        &mut self,
        pairs: &mut [PrimeOffsetPair],
        step: &mut Step<'_, O>,
    ) {
        let len = pairs.len();
        let (pair, to_prev) = step.run(self.x);
        if to_prev {
            pairs[self.lo] = pair;
            self.lo += 1;
            if self.lo == len {
                self.lo = 0;
                self.wrapped = true;
            }
            self.x = pairs[self.lo];
        } else {
            pairs[self.top] = pair;
            self.top = if self.top == 0 { len - 1 } else { self.top - 1 };
            self.x = self.y;
            self.y = pairs[self.top];
        }
    }

    #[inline(always)]
    fn unchecked<O: LargeMarkObserver>(
        &mut self,
        pairs: &mut [PrimeOffsetPair],
        step: &mut Step<'_, O>,
    ) {
        let (pair, to_prev) = step.run(self.x);
        if to_prev {
            pairs[self.lo] = pair;
            self.lo += 1;
            self.x = pairs[self.lo];
        } else {
            pairs[self.top] = pair;
            self.top -= 1;
            self.x = self.y;
            self.y = pairs[self.top];
        }
    }

    /// `count` steps, none of which may cross a circle boundary.
    fn batched<O: LargeMarkObserver>(
        &mut self,
        pairs: &mut [PrimeOffsetPair],
        step: &mut Step<'_, O>,
        count: usize,
    ) {
        for _ in 0..count >> UNROLL_LOG2 {
            for _ in 0..UNROLL {
                self.unchecked(pairs, step);
            }
        }
        for _ in 0..count & (UNROLL - 1) {
            self.unchecked(pairs, step);
        }
    }
}
