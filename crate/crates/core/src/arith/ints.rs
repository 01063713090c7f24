//! Integer helpers shared across the crate: extended gcd, integer square
//! roots, square-part extraction, deterministic primality, and the Kronecker
//! symbol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Extended gcd: returns (g, x, y) with a*x + b*y = g and g = gcd(a, b) >= 0.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Extended gcd over i128: returns (g, x, y) with a*x + b*y = g >= 0.
pub(crate) fn xgcd128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Nonnegative gcd over i128.
pub(crate) fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// Floor of the square root of a nonnegative i64.
pub fn isqrt64(n: i64) -> i64 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |s| s <= n) {
        r += 1;
    }
    r
}

/// Floor of the square root of a u128.
pub fn isqrt128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |s| s <= n) {
        r += 1;
    }
    r
}

pub fn is_square64(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt64(n);
        r * r == n
    }
}

pub fn is_square128(n: u128) -> bool {
    let r = isqrt128(n);
    r * r == n
}

/// Floor of the square root of a nonnegative BigInt.
pub fn isqrt_big(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square_big(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Writes n = s^2 * k with k squarefree and returns (s, k).
///
/// Factors by trial division, so n must stay desk-scale (roughly 10^12).
pub fn square_part(n: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Ok((0, 0));
    }
    if n > 1_000_000_000_000 {
        return Err(Error::invalid_input(format!(
            "radicand {n} too large to factor by trial division"
        )));
    }
    let mut rem = n;
    let mut s = 1u64;
    let mut k = 1u64;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            s *= p.pow(e / 2);
            if e % 2 == 1 {
                k *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    k *= rem;
    Ok((s, k))
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(square_part(n)?.0 == 1)
}

/// Distinct prime factors of n in increasing order, by trial division.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rem = n;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            out.push(p);
            while rem % p == 0 {
                rem /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        out.push(rem);
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 using the standard 12-base set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Kronecker symbol (a|n), defined for every pair of integers with n != 0.
///
/// Extends the Jacobi symbol by (a|2) = 0, 1, -1 for a even, a = +-1 (mod 8),
/// a = +-3 (mod 8), and by (a|-1) = sign of a (with (0|-1) = 1).
pub fn kronecker(a: i64, n: i64) -> Result<i64> {
    if n == 0 {
        return Err(Error::invalid_input("kronecker symbol (a|0) is undefined"));
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1i64;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n.is_even() {
        if a.is_even() {
            return Ok(0);
        }
        let tz = n.trailing_zeros();
        n >>= tz;
        // (a|2) for odd a depends on a mod 8.
        if tz % 2 == 1 {
            let m = a.rem_euclid(8);
            if m == 3 || m == 5 {
                result = -result;
            }
        }
    }
    // Jacobi loop on odd n > 0.
    a = a.rem_euclid(n);
    while a != 0 {
        while a.is_even() {
            a >>= 1;
            let m = n.rem_euclid(8);
            if m == 3 || m == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        Ok(result)
    } else {
        Ok(0)
    }
}

/// Floor division for BigInt pairs, with q > 0 or q < 0 both handled.
pub fn div_floor_big(p: &BigInt, q: &BigInt) -> BigInt {
    debug_assert!(!q.is_zero());
    p.div_floor(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xgcd_bezout() {
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                let (g, x, y) = xgcd(a, b);
                assert_eq!(g, a.gcd(&b));
                assert_eq!(a * x + b * y, g, "bezout failed for {a},{b}");
            }
        }
    }

    #[test]
    fn isqrt_exact_boundaries() {
        for n in 0i64..=10_000 {
            let r = isqrt64(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt64(i64::MAX), 3_037_000_499);
    }

    #[test]
    fn square_part_examples() {
        assert_eq!(square_part(12).unwrap(), (2, 3));
        assert_eq!(square_part(1).unwrap(), (1, 1));
        assert_eq!(square_part(49).unwrap(), (7, 1));
        assert_eq!(square_part(360).unwrap(), (6, 10));
        assert!(is_squarefree(10).unwrap());
        assert!(!is_squarefree(18).unwrap());
    }

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (2..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
    }

    #[test]
    fn kronecker_named_values() {
        assert_eq!(kronecker(2, 7).unwrap(), 1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert_eq!(kronecker(1, 3).unwrap(), 1);
        assert!(kronecker(5, 0).is_err());
    }

    #[test]
    fn kronecker_euler_criterion() {
        // Against a^((p-1)/2) mod p for odd primes p < 1000.
        for p in (3u64..1000).filter(|&p| is_prime(p)) {
            for a in 0..p {
                let e = powmod(a, (p - 1) / 2, p);
                let expect = if e == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    assert_eq!(e, p - 1);
                    -1
                };
                assert_eq!(
                    kronecker(a as i64, p as i64).unwrap(),
                    expect,
                    "({a}|{p})"
                );
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_top() {
        for n in [3i64, 5, 9, 15, -7, 2, 8].iter().copied() {
            for a in -20i64..=20 {
                for b in -20i64..=20 {
                    let lhs = kronecker(a * b, n).unwrap();
                    let rhs = kronecker(a, n).unwrap() * kronecker(b, n).unwrap();
                    assert_eq!(lhs, rhs, "(({a}*{b})|{n})");
                }
            }
        }
    }
}
