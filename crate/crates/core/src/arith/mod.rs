//! Prime generation, integer factorization, and the arithmetic functions
//! built on them: largest prime factor, distinct-prime-divisor counts, and
//! `ell`-adic valuations.
//!
//! Everything here is exact integer arithmetic on magnitudes below 2^127.
//! All functions are pure and safe to call concurrently; [`PrimeTable`] is
//! immutable after construction.

mod factor;
mod primality;
mod sieve;

pub use factor::{factorize, Factorization};
pub use primality::is_prime;
pub use sieve::{primes_up_to, PrimeTable};

use thiserror::Error;

/// Largest magnitude accepted by [`factorize`]: |n| must be < 2^127.
pub const MAX_MAGNITUDE: u128 = 1 << 127;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("prime generation needs x >= 2 (got {0})")]
    EmptyDomain(u64),
    #[error("sieve limit {0} exceeds the 2^32 segmented cap")]
    LimitTooLarge(u64),
    #[error("0 has no prime factorization")]
    UndefinedInput,
    #[error("magnitude 2^127 exceeds the supported factorization range")]
    OutOfRange,
    #[error("{0} is not prime")]
    NotPrime(u128),
}

/// Largest prime factor of |n|, or `None` for the units n = ±1.
pub fn largest_prime_factor(n: i128) -> Result<Option<u128>, ArithError> {
    Ok(factorize(n)?.largest_prime())
}

/// Number of distinct prime divisors of n.
pub fn omega(n: i128) -> Result<usize, ArithError> {
    Ok(factorize(n)?.factors().len())
}

/// Number of distinct prime divisors of n that are <= u.
///
/// Returns 0 for u < 2 (there are no primes below 2); the degenerate case
/// shows up when callers derive u from a power x^eta at small x.
pub fn omega_up_to(n: i128, u: u128) -> Result<usize, ArithError> {
    let f = factorize(n)?;
    Ok(f.factors().iter().filter(|(p, _)| *p <= u).count())
}

/// The ell-adic valuation of n: the exponent of the prime ell in n.
pub fn valuation(n: i128, ell: u128) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::UndefinedInput);
    }
    if !is_prime(ell) {
        return Err(ArithError::NotPrime(ell));
    }
    let mut m = n.unsigned_abs();
    let mut v = 0u32;
    while m % ell == 0 {
        m /= ell;
        v += 1;
    }
    Ok(v)
}
