//! Plain reference sieves. Nothing here uses circles, buckets, wheels or
//! masks; the optimized path is checked against these.

use crate::error::{Result, SieveError};
use crate::params::SieveParams;

pub const SIMPLE_SIEVE_MAX: u64 = 1 << 32;
pub const PRIME_COUNT_MAX: u64 = 1 << 40;

/// All primes `<= limit`, ascending.
pub fn simple_sieve(limit: u64) -> Result<Vec<u64>> {
    if limit > SIMPLE_SIEVE_MAX {
        return Err(SieveError::LimitTooLarge(limit));
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    // composite[i] covers the odd number 2i + 1
    let len = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; len];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < len {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    Ok(primes)
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.26 * x / x.ln().max(1.0)) as usize + 8
}

/// The sieve table for `params`, produced by marking every odd multiple of
/// every base prime one at a time. Same LSB-first layout as the table file.
pub fn oracle_bit_table(params: &SieveParams) -> Result<Vec<u8>> {
    let u = params.u();
    let v = params.v();
    let origin = params.first_segment() << params.log_segment();
    let mut table = vec![0u8; params.table_bytes() as usize];
    for p in simple_sieve(params.sqrt_v())?.into_iter().skip(1) {
        // smallest odd multiple of p that is >= u
        let mut m = u.div_ceil(p) * p;
        if m % 2 == 0 {
            m += p;
        }
        while m <= v {
            let j = ((m - 1) / 2 - origin) as usize;
            table[j / 8] |= 1 << (j % 8);
            m += 2 * p;
        }
    }
    Ok(table)
}

/// Number of primes in `[a, b]`.
pub fn prime_count(a: u64, b: u64) -> Result<u64> {
    if b > PRIME_COUNT_MAX {
        return Err(SieveError::RangeTooLarge(b));
    }
    if b < a || b < 2 {
        return Ok(0);
    }
    let a = a.max(2);
    let root = crate::params::isqrt(b);
    let base = simple_sieve(root)?;
    const WINDOW: u64 = 1 << 20;
    let mut count = 0;
    let mut lo = a;
    let mut is_prime = vec![true; WINDOW as usize];
    while lo <= b {
        let hi = (lo + WINDOW - 1).min(b);
        let len = (hi - lo + 1) as usize;
        is_prime[..len].fill(true);
        for &p in &base {
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                is_prime[(m - lo) as usize] = false;
                m += p;
            }
        }
        count += is_prime[..len].iter().filter(|&&x| x).count() as u64;
        lo = hi + 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_limits() {
        assert_eq!(simple_sieve(0).unwrap(), Vec::<u64>::new());
        assert_eq!(simple_sieve(2).unwrap(), vec![2]);
        assert_eq!(simple_sieve(3).unwrap(), vec![2, 3]);
        let p100 = simple_sieve(100).unwrap();
        assert_eq!(p100.len(), 25);
        assert_eq!(*p100.last().unwrap(), 97);
        let trial: Vec<u64> = (0..=100).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(p100, trial);
        assert!(matches!(
            simple_sieve((1 << 32) + 1),
            Err(SieveError::LimitTooLarge(_))
        ));
    }

    #[test]
    fn pi_of_a_million() {
        let primes = simple_sieve(1_000_000).unwrap();
        assert_eq!(primes.len(), 78498);
        // spot check against trial division
        for n in (0..1_000_000u64).step_by(97) {
            assert_eq!(primes.binary_search(&n).is_ok(), is_prime_trial(n), "{n}");
        }
    }

    #[test]
    fn counts() {
        assert_eq!(prime_count(2, 100).unwrap(), 25);
        assert_eq!(prime_count(0, 1).unwrap(), 0);
        assert_eq!(prime_count(91, 91).unwrap(), 0);
        assert_eq!(prime_count(97, 97).unwrap(), 1);
        assert_eq!(prime_count(1, 1_000_000).unwrap(), 78498);
        assert!(matches!(
            prime_count(0, (1 << 40) + 1),
            Err(SieveError::RangeTooLarge(_))
        ));
    }

    #[test]
    fn oracle_table_zero_bits_are_primes() {
        let params = SieveParams::new(10, 2048, 4).unwrap();
        let table = oracle_bit_table(&params).unwrap();
        assert_eq!(table.len(), 512);
        let primes: Vec<u64> = (0..params.table_bits())
            .filter(|&j| table[j as usize / 8] >> (j % 8) & 1 == 0)
            .map(|j| params.index_to_number(j).unwrap())
            .collect();
        let expected: Vec<u64> = simple_sieve(params.v())
            .unwrap()
            .into_iter()
            .filter(|&p| p >= params.u())
            .collect();
        assert_eq!(primes, expected);
        assert_eq!(
            prime_count(params.u(), params.v()).unwrap(),
            expected.len() as u64
        );
    }

    #[test]
    fn oracle_table_l4() {
        let params = SieveParams::new_test(4, 1, 2).unwrap();
        let table = oracle_bit_table(&params).unwrap();
        assert_eq!(table.len(), 4);
        for j in 0..params.table_bits() {
            let x = params.index_to_number(j).unwrap();
            assert_eq!(
                table[j as usize / 8] >> (j % 8) & 1 == 0,
                is_prime_trial(x),
                "{x}"
            );
        }
    }
}
