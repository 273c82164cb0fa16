//! Starting offsets, the mod-15 wheel and small-prime bit masks.
//!
//! Because only odd numbers are stored, the wheel built from {2, 3, 5} works
//! on table indices modulo 15: index `i` stands for `2i + 1`, which is coprime
//! to 15 exactly when `i mod 15` is one of the eight admissible residues.

use crate::error::{Result, SieveError};
use crate::params::SieveParams;

/// Smallest `q` with `p | 2(f*2^l + q) + 1`; always `q < p`.
pub fn first_offset(p: u64, l: u32, f: u64) -> u64 {
    debug_assert!(p % 2 == 1 && p >= 3);
    let r = ((f % p) as u128 * ((1u128 << (l + 1)) % p as u128) % p as u128) as u64;
    if r.is_multiple_of(2) {
        (p - r - 1) / 2
    } else {
        (2 * p - r - 1) / 2
    }
}

pub const WHEEL_MODULUS: u64 = 15;
pub const WHEEL_PHI: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WheelTables {
    pub residues: [u8; WHEEL_PHI],
    pub deltas: [u8; WHEEL_PHI],
    /// `inverse[x]` is the inverse of `x` mod 15, or 0 when none exists.
    pub inverse: [u8; 15],
    /// `slot[x]` is the position of `x` in `residues`, or `NONE`.
    pub slot: [u8; 15],
}

impl WheelTables {
    pub const NONE: u8 = u8::MAX;

    const fn build() -> Self {
        let mut residues = [0u8; WHEEL_PHI];
        let mut slot = [Self::NONE; 15];
        let mut inverse = [0u8; 15];
        let mut count = 0;
        let mut i = 0;
        while i < 15 {
            let odd = 2 * i + 1;
            if odd % 3 != 0 && odd % 5 != 0 {
                residues[count] = i as u8;
                slot[i] = count as u8;
                count += 1;
            }
            let mut y = 1;
            while y < 15 {
                if (i * y) % 15 == 1 {
                    inverse[i] = y as u8;
                }
                y += 1;
            }
            i += 1;
        }
        let mut deltas = [0u8; WHEEL_PHI];
        let mut s = 0;
        while s < WHEEL_PHI {
            let next = residues[(s + 1) % WHEEL_PHI];
            deltas[s] = ((15 + next as usize - residues[s] as usize) % 15) as u8;
            s += 1;
        }
        WheelTables {
            residues,
            deltas,
            inverse,
            slot,
        }
    }

    pub fn is_admissible(&self, i: u64) -> bool {
        self.slot[(i % WHEEL_MODULUS) as usize] != Self::NONE
    }
}

pub const WHEEL: WheelTables = WheelTables::build();

/// Position `s` in the wheel of the multiple of `p` at global index `i`.
///
/// After marking `i`, the next index to mark is `i + deltas[s] * p`.
pub fn wheel_index(p: u64, i: u64) -> Result<u8> {
    debug_assert!(!p.is_multiple_of(3) && !p.is_multiple_of(5));
    let residue = i % WHEEL_MODULUS;
    if !WHEEL.is_admissible(i) {
        return Err(SieveError::NotAdmissible { index: i, residue });
    }
    let inv = WHEEL.inverse[(p % WHEEL_MODULUS) as usize] as u64;
    // x steps of size p reach the class of 15 (index residue 7)
    let x = (7 + WHEEL_MODULUS - residue) * inv % WHEEL_MODULUS;
    let y = (7 + WHEEL_MODULUS - x) % WHEEL_MODULUS;
    Ok(WHEEL.slot[y as usize])
}

/// Moves a starting offset forward by whole multiples of `p` until it lands
/// on a wheel-admissible index, returning the offset and its wheel position.
pub fn wheel_align(p: u64, q0: u64, l: u32, f: u64) -> (u64, u8) {
    let origin = ((f as u128) << l) % WHEEL_MODULUS as u128;
    let mut q = q0;
    while !WHEEL.is_admissible((origin as u64 + q % WHEEL_MODULUS) % WHEEL_MODULUS) {
        q += p;
    }
    let s =
        wheel_index(p, (origin as u64 + q) % WHEEL_MODULUS).expect("aligned offset is admissible");
    (q, s)
}

/// Largest prime handled by the small-prime masks.
pub const SMALL_PRIME_LIMIT: u64 = 64;
pub const SMALL_PRIMES: [u64; 17] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

/// A periodic composite pattern for one prime or a merged pair of primes.
///
/// `patterns[ph]` is the 64-bit word whose bit `x` is set iff global index
/// `ph + x` (taken mod `modulus`) is a multiple-position of a generating prime.
#[derive(Debug, Clone)]
pub struct SmallPrimeMask {
    modulus: u64,
    primes: Vec<u64>,
    patterns: Vec<u64>,
    phase: u64,
    advance: u64,
}

impl SmallPrimeMask {
    pub fn new(primes: &[u64], params: &SieveParams) -> Self {
        let modulus: u64 = primes.iter().product();
        let patterns = (0..modulus)
            .map(|ph| {
                (0..64u64).fold(0u64, |word, x| {
                    let i = ph + x;
                    if primes.iter().any(|&p| i % p == (p - 1) / 2) {
                        word | 1 << x
                    } else {
                        word
                    }
                })
            })
            .collect();
        let phase = (params.segment_origin(0) as u128 % modulus as u128) as u64;
        SmallPrimeMask {
            modulus,
            primes: primes.to_vec(),
            patterns,
            phase,
            advance: params.segment_bits() % modulus,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Rotation for the segment about to be sieved.
    pub fn phase(&self) -> u64 {
        self.phase
    }

    pub(crate) fn patterns(&self) -> &[u64] {
        &self.patterns
    }

    pub(crate) fn advance_segment(&mut self) {
        self.phase = (self.phase + self.advance) % self.modulus;
    }
}

/// Primes below `min(64, 2^l)`; these are marked with masks instead of offsets.
pub fn small_primes(l: u32) -> impl Iterator<Item = u64> {
    let limit = SMALL_PRIME_LIMIT.min(1 << l);
    SMALL_PRIMES.into_iter().filter(move |&p| p < limit)
}

/// Masks for every small prime, with 3*11 and 5*7 merged into one pattern each.
pub fn small_prime_masks(params: &SieveParams) -> Vec<SmallPrimeMask> {
    let small: Vec<u64> = small_primes(params.log_segment()).collect();
    let mut masks = Vec::new();
    let mut used = Vec::new();
    for pair in [[3, 11], [5, 7]] {
        if pair.iter().all(|p| small.contains(p)) {
            masks.push(SmallPrimeMask::new(&pair, params));
            used.extend(pair);
        }
    }
    for &p in &small {
        if !used.contains(&p) {
            masks.push(SmallPrimeMask::new(&[p], params));
        }
    }
    masks
}
