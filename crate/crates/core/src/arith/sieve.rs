//! Segmented sieve of Eratosthenes.
//!
//! Segments hold 2^20 odd candidates each so the working set stays cache
//! resident even near the 2^32 limit.

use super::ArithError;

const SEGMENT_BITS: usize = 1 << 20;
const SIEVE_CAP: u64 = 1 << 32;

/// All primes up to a fixed limit, sorted increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// pi(x): the number of primes <= x. Requires x <= limit.
    pub fn pi(&self, x: u64) -> usize {
        assert!(x <= self.limit, "pi({x}) beyond table limit {}", self.limit);
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn contains(&self, p: u64) -> bool {
        p <= self.limit && self.primes.binary_search(&p).is_ok()
    }

    pub fn iter_up_to(&self, x: u64) -> &[u64] {
        &self.primes[..self.pi(x.min(self.limit))]
    }
}

/// Generate every prime <= x.
///
/// x must be at least 2; the segmented implementation is capped at 2^32.
pub fn primes_up_to(x: u64) -> Result<PrimeTable, ArithError> {
    if x < 2 {
        return Err(ArithError::EmptyDomain(x));
    }
    if x > SIEVE_CAP {
        return Err(ArithError::LimitTooLarge(x));
    }

    // Base primes up to sqrt(x) by a plain odd-only sieve.
    let root = (x as f64).sqrt() as u64 + 1;
    let base = small_odd_sieve(root.max(3));

    let mut primes: Vec<u64> = Vec::with_capacity(prime_count_estimate(x));
    primes.push(2);

    // Sieve odd numbers in [3, x] segment by segment. Bit i of a segment
    // starting at `lo` represents lo + 2i.
    let mut composite = vec![false; SEGMENT_BITS];
    let top_odd = if x % 2 == 0 { x - 1 } else { x };
    let mut lo = 3u64;
    while lo <= top_odd {
        let hi = (lo + 2 * SEGMENT_BITS as u64 - 2).min(top_odd);
        let len = ((hi - lo) / 2 + 1) as usize;
        composite[..len].fill(false);

        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                let k = (lo - start).div_ceil(2 * p);
                start += k * 2 * p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < len {
                composite[idx] = true;
                idx += p as usize;
            }
        }

        for (i, &c) in composite[..len].iter().enumerate() {
            if !c {
                primes.push(lo + 2 * i as u64);
            }
        }
        lo = hi + 2;
    }

    Ok(PrimeTable { limit: x, primes })
}

/// Odd-only sieve for the base primes (3, 5, ..., <= limit).
fn small_odd_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n / 2 + 1]; // index i <-> 2i + 3
    let mut out = Vec::new();
    let mut i = 0usize;
    while 2 * i + 3 <= n {
        if !composite[i] {
            let p = 2 * i + 3;
            out.push(p as u64);
            let mut j = (p * p - 3) / 2;
            while j < composite.len() {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    out
}

fn prime_count_estimate(x: u64) -> usize {
    if x < 10 {
        return 8;
    }
    let xf = x as f64;
    (1.2 * xf / xf.ln()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_limits() {
        assert_eq!(primes_up_to(2).unwrap().primes(), &[2]);
        assert_eq!(primes_up_to(3).unwrap().primes(), &[2, 3]);
        assert_eq!(primes_up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(
            primes_up_to(30).unwrap().primes(),
            &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn below_two_is_an_error() {
        assert_eq!(primes_up_to(1), Err(ArithError::EmptyDomain(1)));
        assert_eq!(primes_up_to(0), Err(ArithError::EmptyDomain(0)));
    }

    #[test]
    fn known_prime_counts() {
        assert_eq!(primes_up_to(100).unwrap().primes().len(), 25);
        assert_eq!(primes_up_to(1_000).unwrap().primes().len(), 168);
        assert_eq!(primes_up_to(10_000).unwrap().primes().len(), 1_229);
    }

    #[test]
    fn segment_boundaries() {
        // Limits falling just around a segment edge (2 * 2^20 odd span).
        let span = 2 * SEGMENT_BITS as u64;
        for x in [span + 1, span + 2, span + 3, 2 * span - 1, 2 * span + 3] {
            let table = primes_up_to(x).unwrap();
            assert!(table.primes().windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*table.primes().last().unwrap() <= x, true);
        }
    }

    #[test]
    fn pi_matches_partition() {
        let t = primes_up_to(100).unwrap();
        assert_eq!(t.pi(100), 25);
        assert_eq!(t.pi(97), 25);
        assert_eq!(t.pi(96), 24);
        assert_eq!(t.pi(2), 1);
        assert_eq!(t.pi(1), 0);
        assert!(t.contains(97));
        assert!(!t.contains(91));
    }
}
