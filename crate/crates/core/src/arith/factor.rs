//! Complete factorization of signed integers with |n| < 2^127.
//!
//! Trial division by every prime up to 10^5 first (coefficient sums are
//! usually tiny), then Brent-cycle Pollard rho with a fixed-seed generator
//! on whatever cofactor survives. Every reported prime passes [`is_prime`].

use std::sync::OnceLock;

use super::primality::{is_prime, mul_mod};
use super::sieve::primes_up_to;
use super::{ArithError, MAX_MAGNITUDE};

const TRIAL_DIVISION_LIMIT: u64 = 100_000;

/// Fixed seed for the rho polynomial constants; factorizations are
/// reproducible across runs and threads.
const RHO_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// The factorization of a nonzero signed integer.
///
/// `factors` lists (prime, exponent) with primes strictly increasing; the
/// product of the prime powers equals |value|. Units (±1) have an empty
/// factor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: i128,
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    /// Largest prime dividing |value|, or `None` for units.
    pub fn largest_prime(&self) -> Option<u128> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// Rebuild |value| from the factor list.
    pub fn recompose(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * p.pow(e))
    }
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            primes_up_to(TRIAL_DIVISION_LIMIT)
                .expect("static limit is valid")
                .primes()
                .to_vec()
        })
        .as_slice()
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, bound: u128) -> u128 {
        (((self.next() as u128) << 64) | self.next() as u128) % bound
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of n.
/// n must be odd, composite, and coprime to the trial-division primes.
fn brent_rho(n: u128, rng: &mut SplitMix64) -> u128 {
    loop {
        let c = 1 + rng.below(n - 1);
        let mut y = 1 + rng.below(n - 1);
        let m = 128u128;
        let (mut g, mut r, mut q) = (1u128, 1u128, 1u128);
        let (mut x, mut ys) = (y, y);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = (mul_mod(y, y, n) + c) % n;
            }
            let mut k = 0u128;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = (mul_mod(y, y, n) + c) % n;
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time from the last checkpoint.
            g = 1;
            while g == 1 {
                ys = (mul_mod(ys, ys, n) + c) % n;
                g = gcd(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return g;
        }
        // Cycle collapsed onto n itself; retry with fresh constants.
    }
}

/// Factor a nonzero integer with |n| < 2^127 into certified primes.
pub fn factorize(n: i128) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::UndefinedInput);
    }
    let magnitude = n.unsigned_abs();
    if magnitude >= MAX_MAGNITUDE {
        return Err(ArithError::OutOfRange);
    }

    let mut factors: Vec<(u128, u32)> = Vec::new();
    let mut m = magnitude;

    for &p in small_primes() {
        let p = p as u128;
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }

    if m > 1 {
        // Cofactor survived trial division: either prime or a product of
        // primes above the trial limit.
        let mut rng = SplitMix64(RHO_SEED ^ (m as u64) ^ ((m >> 64) as u64));
        let mut stack = vec![m];
        let mut large: Vec<u128> = Vec::new();
        while let Some(v) = stack.pop() {
            if is_prime(v) {
                large.push(v);
                continue;
            }
            let d = brent_rho(v, &mut rng);
            stack.push(d);
            stack.push(v / d);
        }
        large.sort_unstable();
        let mut i = 0;
        while i < large.len() {
            let p = large[i];
            let mut e = 0u32;
            while i < large.len() && large[i] == p {
                e += 1;
                i += 1;
            }
            factors.push((p, e));
        }
    }

    factors.sort_unstable_by_key(|&(p, _)| p);
    debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));

    Ok(Factorization {
        value: n,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(-12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(factorize(-1).unwrap().factors(), &[]);
        assert_eq!(factorize(2).unwrap().factors(), &[(2, 1)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert_eq!(
            factorize(4830).unwrap().factors(),
            &[(2, 1), (3, 1), (5, 1), (7, 1), (23, 1)]
        );
    }

    #[test]
    fn zero_and_min_are_rejected() {
        assert_eq!(factorize(0), Err(ArithError::UndefinedInput));
        assert_eq!(factorize(i128::MIN), Err(ArithError::OutOfRange));
    }

    #[test]
    fn rho_path_semiprime() {
        // Both factors above the trial-division limit.
        let p = 1_000_003u128;
        let q = 1_000_033u128;
        let f = factorize((p * q) as i128).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
    }

    #[test]
    fn rho_path_large() {
        // (2^61 - 1) * (2^31 - 1): a 92-bit semiprime of two Mersenne primes.
        let a = (1u128 << 61) - 1;
        let b = (1u128 << 31) - 1;
        let f = factorize((a * b) as i128).unwrap();
        assert_eq!(f.factors(), &[(b, 1), (a, 1)]);
        assert_eq!(f.recompose(), a * b);
    }

    #[test]
    fn prime_power_of_large_prime() {
        let p = 1_000_003u128;
        let f = factorize((p * p * p) as i128).unwrap();
        assert_eq!(f.factors(), &[(p, 3)]);
    }

    #[test]
    fn recompose_is_exact() {
        for n in [-720i128, 720, 123_456_789, -97, 2, 1, -1] {
            let f = factorize(n).unwrap();
            assert_eq!(f.recompose(), n.unsigned_abs(), "n = {n}");
        }
    }

    #[test]
    fn deterministic_across_calls() {
        let n = ((1u128 << 61) - 1) as i128 * 2_147_483_647;
        assert_eq!(factorize(n).unwrap(), factorize(n).unwrap());
    }
}
