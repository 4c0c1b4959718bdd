//! Integer helpers: primality, factorization, modular arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Default trial-division bound for bounded factorization.
pub const DEFAULT_FACTOR_BOUND: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_FACTOR_BOUND`].
pub const FACTOR_BOUND_ENV: &str = "OTHOM_FACTOR_BOUND";

/// Trial-division bound taken from `OTHOM_FACTOR_BOUND`, falling back to the default.
pub fn factor_bound_from_env() -> u64 {
    std::env::var(FACTOR_BOUND_ENV)
        .ok()
        .and_then(|s| s.trim().replace('_', "").parse::<u64>().ok())
        .filter(|&b| b >= 2)
        .unwrap_or(DEFAULT_FACTOR_BOUND)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_brent(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Complete factorization of a `u64` (trial division by small primes, then Pollard-Brent).
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut out = BTreeMap::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    factor_u64_into(n, &mut out);
    out.into_iter().collect()
}

/// Complete factorization of an arbitrary positive integer.
///
/// Values that fit in a `u64` go through [`factor_u64`]; larger values use
/// unbounded trial division, which is only sensible for smooth inputs.
pub fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "cannot factor zero");
    if let Some(small) = n.to_u64() {
        return factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    loop {
        if let Some(small) = rest.to_u64() {
            for (p, e) in factor_u64(small) {
                let p = BigUint::from(p);
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some(entry) => entry.1 += e,
                    None => out.push((p, e)),
                }
            }
            break;
        }
        let db = BigUint::from(d);
        if &db * &db > rest {
            out.push((rest, 1));
            break;
        }
        let mut e = 0;
        while (&rest % &db).is_zero() {
            rest /= &db;
            e += 1;
        }
        if e > 0 {
            out.push((db, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out.sort();
    out
}

/// A factorization attempt that ran out of trial-division budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub found: Vec<(BigUint, u32)>,
    pub cofactor: BigUint,
    pub bound: u64,
}

impl std::fmt::Display for PartialFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .found
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(
            f,
            "found [{}], unfactored cofactor {} (trial bound {})",
            parts.join(" * "),
            self.cofactor,
            self.bound
        )
    }
}

/// Trial division up to `bound`, then a primality test on the cofactor.
///
/// Fails with the partial result if the remaining cofactor is neither 1 nor provably prime.
pub fn factor_bounded(n: &BigUint, bound: u64) -> Result<Vec<(BigUint, u32)>, PartialFactorization> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut found = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    while d <= bound {
        let db = BigUint::from(d);
        if &db * &db > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &db).is_zero() {
            rest /= &db;
            e += 1;
        }
        if e > 0 {
            found.push((db, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(found);
    }
    let db = BigUint::from(d);
    // every prime below d has been divided out
    let certainly_prime = &db * &db > rest || rest.to_u64().is_some_and(is_prime_u64);
    if certainly_prime {
        found.push((rest, 1));
        found.sort();
        return Ok(found);
    }
    Err(PartialFactorization { found, cofactor: rest, bound })
}

/// All positive divisors, ascending.
pub fn divisors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Multiplicatively merge two factorizations.
pub fn merge_factors(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut map: BTreeMap<u64, u32> = BTreeMap::new();
    for &(p, e) in a.iter().chain(b) {
        *map.entry(p).or_insert(0) += e;
    }
    map.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_composites() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(9369319));
        assert!(is_prime_u64(15607));
        assert!(!is_prime_u64(1607521));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime_u64(18446744073709551557));
    }

    #[test]
    fn factor_small_and_large() {
        assert_eq!(factor_u64(47321), vec![(79, 1), (599, 1)]);
        assert_eq!(factor_u64(7 * 31 * 31 * 41), vec![(7, 1), (31, 2), (41, 1)]);
        assert_eq!(factor_u64(1), vec![]);
        let n = 4294967291u64 * 4294967279u64;
        assert_eq!(factor_u64(n), vec![(4294967279, 1), (4294967291, 1)]);
    }

    #[test]
    fn bounded_factorization_reports_partial() {
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64) * 12u32;
        let err = factor_bounded(&n, 1000).unwrap_err();
        assert_eq!(err.found, vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]);
        let ok = factor_bounded(&n, 2_000_000).unwrap();
        assert_eq!(ok.len(), 4);
        // a prime cofactor passes the primality test without a large bound
        let ok = factor_bounded(&BigUint::from(2u32 * 9369319), 10).unwrap();
        assert_eq!(ok, vec![(BigUint::from(2u32), 1), (BigUint::from(9369319u32), 1)]);
    }

    #[test]
    fn big_factorization() {
        let n = BigUint::from(u64::MAX) * 6u32;
        let f = factor_biguint(&n);
        let back = f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        assert_eq!(back, n);
    }

    #[test]
    fn divisor_listing() {
        assert_eq!(divisors(&[(2, 3), (3, 1)]), vec![1, 2, 3, 4, 6, 8, 12, 24]);
        assert_eq!(divisors(&[]), vec![1]);
    }
}
