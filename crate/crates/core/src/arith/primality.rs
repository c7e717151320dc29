//! Primality testing for magnitudes below 2^127.
//!
//! Below 2^64 the test is fully deterministic Miller-Rabin with the seven
//! witnesses from <http://miller-rabin.appspot.com/>. Above 2^64 it is
//! Miller-Rabin over the first twelve prime bases plus a strong Lucas test
//! with Selfridge parameters (the Baillie-PSW combination, which has no
//! known counterexample).

/// Modular addition for moduli below 2^127.
#[inline]
pub(crate) fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

/// Modular multiplication for moduli below 2^127.
///
/// Uses native 128-bit products when they cannot overflow, otherwise a
/// shift-and-add chain (sound because 2a < 2^128 whenever a < m < 2^127).
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = (a % m, b % m);
    if a == 0 || b == 0 {
        return 0;
    }
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    if a < b {
        core::mem::swap(&mut a, &mut b);
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        exp >>= 1;
        if exp > 0 {
            base = mul_mod(base, base, m);
        }
    }
    acc
}

/// One strong-pseudoprime round: n odd, n - 1 = d * 2^s.
fn sprp(n: u128, base: u128, d: u128, s: u32) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let mut x = pow_mod(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

const WITNESSES_64: [u128; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
const WITNESSES_128: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Jacobi symbol (a / n) for odd n > 0.
fn jacobi(mut a: i128, mut n: u128) -> i32 {
    debug_assert!(n & 1 == 1);
    a %= n as i128;
    if a < 0 {
        a += n as i128;
    }
    let mut a = a as u128;
    let mut sign = 1i32;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's method-A parameters.
fn strong_lucas(n: u128) -> bool {
    // A perfect square makes the Selfridge search below run forever.
    let r = n.isqrt();
    if r * r == n {
        return false;
    }
    // Find D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d: i128 = 5;
    loop {
        match jacobi(d, n) {
            -1 => break,
            0 => {
                // gcd(|D|, n) > 1; composite unless n is that small prime.
                return n == d.unsigned_abs();
            }
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -(d - 2) };
    }
    // P = 1, Q = (1 - D) / 4.
    let q_mod: u128 = {
        let q = (1 - d) / 4; // exact: D = 1 mod 4 by construction
        q.rem_euclid(n as i128) as u128
    };

    let mut delta = n + 1;
    let s = delta.trailing_zeros();
    delta >>= s;

    // Compute U_delta, V_delta by the binary double-and-add chain.
    let (mut u, mut v, mut qk) = (1u128, 1u128, q_mod); // U_1, V_1, Q^1
    let d_mod = {
        let r = d.rem_euclid(n as i128) as u128;
        r
    };
    let inv2 = (n + 1) / 2; // 2^{-1} mod n for odd n
    let bits = 128 - delta.leading_zeros();
    for i in (0..bits - 1).rev() {
        // (U, V, Q^k) -> (U_{2k}, V_{2k}, Q^{2k})
        u = mul_mod(u, v, n);
        v = {
            let v2 = mul_mod(v, v, n);
            add_mod(v2, n - add_mod(qk, qk, n) % n, n)
        };
        qk = mul_mod(qk, qk, n);
        if (delta >> i) & 1 == 1 {
            // (U, V) -> (U_{k+1}, V_{k+1}) with P = 1
            let new_u = mul_mod(add_mod(u, v, n), inv2, n);
            let dv = mul_mod(d_mod, u, n);
            let new_v = mul_mod(add_mod(v, dv, n), inv2, n);
            u = new_u;
            v = new_v;
            qk = mul_mod(qk, q_mod, n);
        }
    }

    // n is a strong Lucas probable prime if U_delta = 0, or V_{delta 2^r} = 0
    // for some 0 <= r < s.
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = {
            let v2 = mul_mod(v, v, n);
            add_mod(v2, n - add_mod(qk, qk, n) % n, n)
        };
        qk = mul_mod(qk, qk, n);
        if v == 0 {
            return true;
        }
    }
    false
}

/// Deterministic below 2^64; Baillie-PSW style above.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    if n < (1 << 64) {
        WITNESSES_64.iter().all(|&w| sprp(n, w, d, s))
    } else {
        WITNESSES_128.iter().all(|&w| sprp(n, w, d, s)) && strong_lucas(n)
    }
}
