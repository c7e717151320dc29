//! Exact counts for the product mod-h matrix-image model.
//!
//! The admissible set for a modulus h and weight k is
//!
//! ```text
//!   A_h = { (A, B) in GL2(Z/hZ)^2 : det A = det B in ((Z/hZ)^x)^(k-1) }
//! ```
//!
//! and C_h is its subset with tr(A) + tr(B) = 0. The density delta(h) =
//! |C_h| / |A_h| is computed three independent ways that must agree exactly:
//!
//! - brute-force enumeration of GL2(Z/hZ) bucketed by (det, trace),
//! - closed-form trace-determinant fiber counting for odd primes, and
//! - CRT composition over squarefree moduli.
//!
//! All arithmetic is exact integer / rational; no floats enter the counts.
//! These are model values for the full admissible image: actual newform
//! pairs can have smaller images at exceptional primes, so callers decide
//! which moduli the model applies to.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::arith::is_prime;

/// Largest modulus accepted by [`enumerate_counts`]. The bucketing pass
/// walks all h^4 matrices, so 30 keeps it under a second.
pub const ENUMERATION_CAP: u64 = 30;

/// Largest prime sweep accepted by [`asymptotic_report`].
pub const ASYMPTOTIC_CAP: u64 = 10_000;

/// Prime powers supported by enumeration (the model admits no closed form
/// there, only an unspecified-constant asymptotic).
pub const SUPPORTED_PRIME_POWERS: [u64; 3] = [4, 8, 9];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("determinant {det} is not a unit mod {ell}")]
    NonUnitDeterminant { ell: u64, det: u64 },
    #[error("modulus {0} is outside the enumeration range 2..={ENUMERATION_CAP}")]
    CapacityRange(u64),
    #[error("no closed form at ell = 2; use enumeration instead")]
    UseEnumeration,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is unsupported: prime powers only via enumeration at 4, 8, 9")]
    UnsupportedModulus(u64),
    #[error("weight must be an even integer >= 2 (got {0})")]
    InvalidWeight(u64),
    #[error("count overflow beyond 128 bits")]
    CountOverflow,
    #[error("sweep limit {0} exceeds the cap {ASYMPTOTIC_CAP}")]
    SweepTooLarge(u64),
}

/// Exact nonnegative rational, always in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    num: u128,
    den: u128,
}

impl Rational {
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: u128, den: u128) -> Rational {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    pub fn checked_mul(&self, other: &Rational) -> Option<Rational> {
        // Cross-reduce before multiplying to keep intermediates small.
        let g1 = gcd(self.num, other.den);
        let g2 = gcd(other.num, self.den);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Rational::new(num, den))
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a.max(1)
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// How a [`GaloisCounts`] record was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Enumeration,
    ClosedForm,
    Crt,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::Enumeration => "enumeration",
            CountMethod::ClosedForm => "closed-form",
            CountMethod::Crt => "crt",
        }
    }
}

/// Exact record of (|A_h|, |C_h|, delta) for one modulus and weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisCounts {
    pub h: u64,
    pub weight: u64,
    #[serde(serialize_with = "ser_u128")]
    pub size_a: u128,
    #[serde(serialize_with = "ser_u128")]
    pub size_c: u128,
    pub delta: Rational,
    pub method: CountMethod,
}

fn ser_u128<S: serde::Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    // Counts can exceed u64; JSON carries them as decimal strings.
    s.serialize_str(&v.to_string())
}

impl GaloisCounts {
    pub const CSV_HEADER: &'static str = "h,k,sizeA,sizeC,delta_num,delta_den,method";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.h,
            self.weight,
            self.size_a,
            self.size_c,
            self.delta.numer(),
            self.delta.denom(),
            self.method.as_str()
        )
    }
}

fn check_weight(k: u64) -> Result<(), GaloisError> {
    if k < 2 || k % 2 != 0 {
        return Err(GaloisError::InvalidWeight(k));
    }
    Ok(())
}

/// The set of (k-1)-th powers of units mod h: the admissible determinants.
fn admissible_determinants(h: u64, k: u64) -> BTreeSet<u64> {
    let mut set = BTreeSet::new();
    for u in 1..h.max(2) {
        if gcd64(u, h) == 1 {
            set.insert(pow_mod64(u, k - 1, h));
        }
    }
    set
}

fn pow_mod64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        exp >>= 1;
        base = (base as u128 * base as u128 % m as u128) as u64;
    }
    acc
}

/// Number of matrices in GL2(F_ell) with the given trace and determinant.
///
/// For odd ell the count depends only on the discriminant t^2 - 4d:
/// ell^2 + ell when it is a nonzero square, ell^2 - ell when a nonsquare,
/// ell^2 when zero. ell = 2 is handled by direct enumeration.
pub fn count_matrices_trace_det(ell: u64, t: u64, d: u64) -> Result<u128, GaloisError> {
    if !is_prime(ell as u128) {
        return Err(GaloisError::NotPrime(ell));
    }
    let (t, d) = (t % ell, d % ell);
    if d == 0 {
        return Err(GaloisError::NonUnitDeterminant { ell, det: d });
    }
    if ell == 2 {
        let mut count = 0u128;
        for bits in 0..16u32 {
            let (a, b, c, dd) = (bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1);
            let det = (a * dd + b * c) % 2; // -1 = 1 mod 2
            let tr = (a + dd) % 2;
            if det == d as u32 && tr == t as u32 {
                count += 1;
            }
        }
        return Ok(count);
    }
    let l = ell as u128;
    let disc = ((t as u128 * t as u128) + 4 * l - (4 * d as u128 % l)) % l;
    if disc == 0 {
        Ok(l * l)
    } else if is_square_mod(disc as u64, ell) {
        Ok(l * l + l)
    } else {
        Ok(l * l - l)
    }
}

fn is_square_mod(a: u64, ell: u64) -> bool {
    // Euler's criterion; a != 0 mod ell, ell odd prime.
    pow_mod64(a, (ell - 1) / 2, ell) == 1
}

/// Exhaustive count over GL2(Z/hZ), bucketed by (det, trace).
///
/// Pair totals follow exactly from the buckets: matrices with the same
/// admissible determinant pair freely, and the trace-sum-zero condition
/// picks the bucket of the opposite trace.
pub fn enumerate_counts(h: u64, k: u64) -> Result<GaloisCounts, GaloisError> {
    check_weight(k)?;
    if !(2..=ENUMERATION_CAP).contains(&h) {
        return Err(GaloisError::CapacityRange(h));
    }
    let hs = h as usize;
    let mut bucket = vec![vec![0u128; hs]; hs]; // [det][trace]
    for a in 0..h {
        for b in 0..h {
            for c in 0..h {
                for d in 0..h {
                    let det =
                        ((a as i64 * d as i64 - b as i64 * c as i64).rem_euclid(h as i64)) as u64;
                    if gcd64(det, h) != 1 {
                        continue;
                    }
                    let tr = (a + d) % h;
                    bucket[det as usize][tr as usize] += 1;
                }
            }
        }
    }

    let dets = admissible_determinants(h, k);
    let mut size_a = 0u128;
    let mut size_c = 0u128;
    for &d in &dets {
        let row = &bucket[d as usize];
        let total: u128 = row.iter().sum();
        size_a = size_a
            .checked_add(total.checked_mul(total).ok_or(GaloisError::CountOverflow)?)
            .ok_or(GaloisError::CountOverflow)?;
        for t in 0..hs {
            let opp = (hs - t) % hs;
            size_c = size_c
                .checked_add(
                    row[t]
                        .checked_mul(row[opp])
                        .ok_or(GaloisError::CountOverflow)?,
                )
                .ok_or(GaloisError::CountOverflow)?;
        }
    }

    Ok(GaloisCounts {
        h,
        weight: k,
        size_a,
        size_c,
        delta: Rational::new(size_c, size_a),
        method: CountMethod::Enumeration,
    })
}

/// Closed-form fiber counting for an odd prime ell.
///
/// For each admissible determinant d the traces split by discriminant
/// class: s0 traces with t^2 = 4d, and of the rest exactly
/// (ell - 1 - s0) / 2 carry a square discriminant (pairs (t, u) with
/// t^2 - 4d = u^2, u != 0 biject with factorizations ab = 4d, a != b).
/// Since t and -t share a discriminant, sum_t N(t,d) N(-t,d) = sum_t N(t,d)^2.
pub fn counts_closed_form(ell: u64, k: u64) -> Result<GaloisCounts, GaloisError> {
    check_weight(k)?;
    if ell == 2 {
        return Err(GaloisError::UseEnumeration);
    }
    if !is_prime(ell as u128) {
        return Err(GaloisError::NotPrime(ell));
    }
    let l = ell as u128;
    let fiber_total = l * l * l - l; // all of GL2 with one fixed determinant
    let n_zero = l * l;
    let n_plus = l * l + l;
    let n_minus = l * l - l;

    let dets = admissible_determinants(ell, k);
    let mut size_a = 0u128;
    let mut size_c = 0u128;
    for &d in &dets {
        let s0: u128 = if is_square_mod(d, ell) { 2 } else { 0 };
        let s_plus = (l - 1 - s0) / 2;
        let s_minus = l - s0 - s_plus;
        size_a = size_a
            .checked_add(
                fiber_total
                    .checked_mul(fiber_total)
                    .ok_or(GaloisError::CountOverflow)?,
            )
            .ok_or(GaloisError::CountOverflow)?;
        let c_d = s0
            .checked_mul(n_zero * n_zero)
            .and_then(|v| v.checked_add(s_plus.checked_mul(n_plus * n_plus)?))
            .and_then(|v| v.checked_add(s_minus.checked_mul(n_minus * n_minus)?))
            .ok_or(GaloisError::CountOverflow)?;
        size_c = size_c.checked_add(c_d).ok_or(GaloisError::CountOverflow)?;
    }

    Ok(GaloisCounts {
        h: ell,
        weight: k,
        size_a,
        size_c,
        delta: Rational::new(size_c, size_a),
        method: CountMethod::ClosedForm,
    })
}

/// delta over a squarefree modulus by CRT: sizes multiply prime by prime.
///
/// delta(1) = 1 by convention. Odd prime factors go through the closed
/// form; the factor 2 through enumeration.
pub fn delta_squarefree(h: u64, k: u64) -> Result<GaloisCounts, GaloisError> {
    check_weight(k)?;
    if h == 0 {
        return Err(GaloisError::UnsupportedModulus(0));
    }
    if h == 1 {
        return Ok(GaloisCounts {
            h: 1,
            weight: k,
            size_a: 1,
            size_c: 1,
            delta: Rational::ONE,
            method: CountMethod::Crt,
        });
    }
    let factors = factor_u64(h);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(GaloisError::UnsupportedModulus(h));
    }
    let mut size_a = 1u128;
    let mut size_c = 1u128;
    let mut delta = Rational::ONE;
    for &(ell, _) in &factors {
        let part = if ell == 2 {
            enumerate_counts(2, k)?
        } else {
            counts_closed_form(ell, k)?
        };
        size_a = size_a
            .checked_mul(part.size_a)
            .ok_or(GaloisError::CountOverflow)?;
        size_c = size_c
            .checked_mul(part.size_c)
            .ok_or(GaloisError::CountOverflow)?;
        delta = delta
            .checked_mul(&part.delta)
            .ok_or(GaloisError::CountOverflow)?;
    }
    Ok(GaloisCounts {
        h,
        weight: k,
        size_a,
        size_c,
        delta,
        method: CountMethod::Crt,
    })
}

/// Model counts for any supported modulus: primes via closed form (2 via
/// enumeration), the prime powers 4, 8, 9 via enumeration, squarefree
/// composites via CRT. Everything else is refused.
pub fn counts_for_modulus(h: u64, k: u64) -> Result<GaloisCounts, GaloisError> {
    check_weight(k)?;
    match h {
        0 => Err(GaloisError::UnsupportedModulus(0)),
        1 => delta_squarefree(1, k),
        2 => enumerate_counts(2, k),
        _ if is_prime(h as u128) => {
            if h <= ASYMPTOTIC_CAP {
                counts_closed_form(h, k)
            } else {
                Err(GaloisError::SweepTooLarge(h))
            }
        }
        _ if SUPPORTED_PRIME_POWERS.contains(&h) => enumerate_counts(h, k),
        _ => {
            let factors = factor_u64(h);
            if factors.iter().all(|&(_, e)| e == 1) {
                delta_squarefree(h, k)
            } else {
                Err(GaloisError::UnsupportedModulus(h))
            }
        }
    }
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// One row of the convergence diagnostics for delta(ell) = 1/ell + O(1/ell^2).
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub ell: u64,
    pub delta: Rational,
    /// ell * delta(ell); tends to 1.
    pub ell_delta: f64,
    /// |C_ell| * gcd(ell - 1, k - 1) / ell^6; tends to 1.
    pub normalized_c: f64,
}

/// Convergence sweep over all primes ell <= lmax.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub weight: u64,
    pub rows: Vec<AsymptoticRow>,
    /// Smallest C with |ell * delta(ell) - 1| <= C / ell over the sweep.
    pub fitted_c: f64,
}

pub fn asymptotic_report(lmax: u64, k: u64) -> Result<AsymptoticReport, GaloisError> {
    use rayon::prelude::*;

    check_weight(k)?;
    if lmax > ASYMPTOTIC_CAP {
        return Err(GaloisError::SweepTooLarge(lmax));
    }
    let primes: Vec<u64> = crate::arith::primes_up_to(lmax.max(2))
        .expect("lmax >= 2 after clamp")
        .primes()
        .to_vec();
    let rows: Vec<AsymptoticRow> = primes
        .par_iter()
        .map(|&ell| {
            let counts = if ell == 2 {
                enumerate_counts(2, k)
            } else {
                counts_closed_form(ell, k)
            }?;
            let delta = counts.delta;
            let ell_delta = ell as f64 * delta.as_f64();
            let g = gcd64(ell - 1, k - 1) as f64;
            let normalized_c = counts.size_c as f64 * g / (ell as f64).powi(6);
            Ok(AsymptoticRow {
                ell,
                delta,
                ell_delta,
                normalized_c,
            })
        })
        .collect::<Result<_, GaloisError>>()?;
    let fitted_c = rows
        .iter()
        .map(|r| (r.ell_delta - 1.0).abs() * r.ell as f64)
        .fold(0.0f64, f64::max);
    Ok(AsymptoticReport {
        weight: k,
        rows,
        fitted_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal pair loop: the independent oracle for the bucketed counts.
    fn pair_enumeration_oracle(h: u64, k: u64) -> (u128, u128) {
        let mut mats: Vec<(u64, u64)> = Vec::new();
        for a in 0..h {
            for b in 0..h {
                for c in 0..h {
                    for d in 0..h {
                        let det = ((a as i64 * d as i64 - b as i64 * c as i64)
                            .rem_euclid(h as i64)) as u64;
                        if gcd64(det, h) == 1 {
                            mats.push((det, (a + d) % h));
                        }
                    }
                }
            }
        }
        let dets = admissible_determinants(h, k);
        let mut size_a = 0u128;
        let mut size_c = 0u128;
        for &(d1, t1) in &mats {
            if !dets.contains(&d1) {
                continue;
            }
            for &(d2, t2) in &mats {
                if d1 == d2 {
                    size_a += 1;
                    if (t1 + t2) % h == 0 {
                        size_c += 1;
                    }
                }
            }
        }
        (size_a, size_c)
    }

    /// Direct GL2(F_ell) fiber enumeration: oracle for the formula.
    fn fiber_oracle(ell: u64, t: u64, d: u64) -> u128 {
        let mut count = 0u128;
        for a in 0..ell {
            for b in 0..ell {
                for c in 0..ell {
                    for dd in 0..ell {
                        let det = ((a as i64 * dd as i64 - b as i64 * c as i64)
                            .rem_euclid(ell as i64)) as u64;
                        let tr = (a + dd) % ell;
                        if det == d && tr == t {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn fiber_counts_match_spec_values() {
        // disc = 0 case and square-disc case at ell = 3.
        assert_eq!(count_matrices_trace_det(3, 1, 1).unwrap(), 9);
        assert_eq!(count_matrices_trace_det(3, 0, 2).unwrap(), 12);
        assert_eq!(fiber_oracle(3, 1, 1), 9);
        assert_eq!(fiber_oracle(3, 0, 2), 12);
    }

    #[test]
    fn fiber_counts_match_enumeration() {
        for ell in [2u64, 3, 5, 7] {
            for d in 1..ell {
                for t in 0..ell {
                    assert_eq!(
                        count_matrices_trace_det(ell, t, d).unwrap(),
                        fiber_oracle(ell, t, d),
                        "ell={ell} t={t} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn fiber_counts_sum_to_det_class() {
        // sum_t N(t, d) = ell^3 - ell for every unit d, odd ell <= 100.
        for ell in [3u64, 5, 7, 11, 13, 31, 61, 97] {
            let expect = (ell as u128).pow(3) - ell as u128;
            for d in 1..ell {
                let total: u128 = (0..ell)
                    .map(|t| count_matrices_trace_det(ell, t, d).unwrap())
                    .sum();
                assert_eq!(total, expect, "ell={ell} d={d}");
            }
        }
    }

    #[test]
    fn non_unit_determinant_is_rejected() {
        assert_eq!(
            count_matrices_trace_det(5, 1, 0),
            Err(GaloisError::NonUnitDeterminant { ell: 5, det: 0 })
        );
    }

    #[test]
    fn enumeration_matches_spec_pinned_values() {
        let h2 = enumerate_counts(2, 2).unwrap();
        assert_eq!((h2.size_a, h2.size_c), (36, 20));
        assert_eq!(h2.delta, Rational::new(5, 9));

        let h3 = enumerate_counts(3, 2).unwrap();
        assert_eq!((h3.size_a, h3.size_c), (1152, 414));
        assert_eq!(h3.delta, Rational::new(23, 64));
    }

    #[test]
    fn enumeration_matches_pair_loop_oracle() {
        for h in [2u64, 3, 4, 5, 6] {
            for k in [2u64, 12] {
                let fast = enumerate_counts(h, k).unwrap();
                let (size_a, size_c) = pair_enumeration_oracle(h, k);
                assert_eq!((fast.size_a, fast.size_c), (size_a, size_c), "h={h} k={k}");
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_enumeration() {
        for ell in [3u64, 5, 7, 11] {
            for k in [2u64, 12] {
                let cf = counts_closed_form(ell, k).unwrap();
                let en = enumerate_counts(ell, k).unwrap();
                assert_eq!(
                    (cf.size_a, cf.size_c),
                    (en.size_a, en.size_c),
                    "ell={ell} k={k}"
                );
            }
        }
    }

    #[test]
    fn closed_form_redirects_ell_two() {
        assert_eq!(counts_closed_form(2, 2), Err(GaloisError::UseEnumeration));
    }

    #[test]
    fn delta_positive_and_bounded() {
        for h in 2..=12u64 {
            for k in [2u64, 12] {
                match counts_for_modulus(h, k) {
                    Ok(c) => {
                        assert!(c.size_c > 0, "h={h}");
                        assert!(c.size_c <= c.size_a, "h={h}");
                    }
                    Err(GaloisError::UnsupportedModulus(m)) => {
                        assert_eq!(m, 12, "only 12 = 2^2*3 is unsupported below 13");
                    }
                    Err(e) => panic!("h={h}: {e}"),
                }
            }
        }
    }

    #[test]
    fn crt_multiplicativity() {
        let d6 = delta_squarefree(6, 2).unwrap();
        assert_eq!(d6.delta, Rational::new(115, 576)); // (5/9)(23/64)
        let direct = enumerate_counts(6, 2).unwrap();
        assert_eq!((d6.size_a, d6.size_c), (direct.size_a, direct.size_c));

        let one = delta_squarefree(1, 2).unwrap();
        assert_eq!(one.delta, Rational::ONE);

        assert_eq!(
            delta_squarefree(4, 2),
            Err(GaloisError::UnsupportedModulus(4))
        );
    }

    #[test]
    fn closed_form_k2_formula() {
        // For k = 2 the sweep reduces to delta = (l^3 - l - 1) / (l^2 - 1)^2.
        for ell in [3u64, 5, 7, 11, 13] {
            let c = counts_closed_form(ell, 2).unwrap();
            let l = ell as u128;
            assert_eq!(c.size_a, (l - 1) * (l * l * l - l).pow(2));
            let expect = Rational::new(l * l * l - l - 1, (l * l - 1) * (l * l - 1));
            assert_eq!(c.delta, expect, "ell={ell}");
        }
    }

    #[test]
    fn asymptotic_rows() {
        let report = asymptotic_report(50, 2).unwrap();
        let row3 = report.rows.iter().find(|r| r.ell == 3).unwrap();
        assert!((row3.ell_delta - 69.0 / 64.0).abs() < 1e-12);
        // gcd(l-1, 1) = 1 at k = 2, so the C diagnostic is sizeC / ell^6.
        let c3 = counts_closed_form(3, 2).unwrap();
        assert!((row3.normalized_c - c3.size_c as f64 / 729.0).abs() < 1e-12);
        assert!(report.fitted_c > 0.0);
        for r in &report.rows {
            assert!((r.ell_delta - 1.0).abs() <= report.fitted_c / r.ell as f64 + 1e-12);
        }
    }

    #[test]
    fn csv_row_shape() {
        let c = enumerate_counts(2, 2).unwrap();
        assert_eq!(c.csv_row(), "2,2,36,20,5,9,enumeration");
    }

    #[test]
    fn weight_validation() {
        assert_eq!(enumerate_counts(3, 3), Err(GaloisError::InvalidWeight(3)));
        assert_eq!(enumerate_counts(3, 0), Err(GaloisError::InvalidWeight(0)));
        assert!(enumerate_counts(3, 12).is_ok());
    }
}
