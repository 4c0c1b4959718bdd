//! Finitely generated abelian groups in canonical form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::factor_biguint;

use super::LinalgError;

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with `2 <= d_1 | d_2 | ... | d_k`.
///
/// Construction always canonicalizes, so `==` is group isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

/// One cyclic summand `Z/p^e` repeated `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    pub prime: BigUint,
    pub exponent: u32,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PrimaryDecomposition {
    pub free_rank: usize,
    /// Sorted by (prime, exponent); no zero multiplicities.
    pub parts: Vec<PrimePower>,
}

impl PrimaryDecomposition {
    /// The prime powers as a flat ascending multiset, e.g. `[2, 2, 7]`.
    pub fn prime_powers(&self) -> Vec<BigUint> {
        self.parts
            .iter()
            .flat_map(|pp| std::iter::repeat_n(pp.prime.pow(pp.exponent), pp.multiplicity))
            .collect()
    }

    /// Recombines the primary parts into invariant-factor form.
    pub fn to_group(&self) -> AbelianGroup {
        // per prime, exponents in descending order; the i-th largest powers multiply
        // together into the i-th largest invariant factor
        let mut by_prime: BTreeMap<&BigUint, Vec<u32>> = BTreeMap::new();
        for pp in &self.parts {
            by_prime
                .entry(&pp.prime)
                .or_default()
                .extend(std::iter::repeat_n(pp.exponent, pp.multiplicity));
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![BigUint::one(); len];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, e) in exps.into_iter().enumerate() {
                factors[i] *= p.pow(e);
            }
        }
        factors.reverse();
        AbelianGroup {
            free_rank: self.free_rank,
            invariant_factors: factors.into_iter().map(|f| BigInt::from_biguint(Sign::Plus, f)).collect(),
        }
    }
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, invariant_factors: Vec::new() }
    }

    /// Canonical form of `Z^free_rank ⊕ ⊕_i Z/orders[i]`.
    ///
    /// Orders need not form a divisibility chain; `1` and `-1` are dropped,
    /// `0` contributes a free summand and signs are ignored.
    pub fn from_cyclic_orders<I>(free_rank: usize, orders: I) -> Self
    where
        I: IntoIterator<Item = BigInt>,
    {
        let mut free_rank = free_rank;
        let mut torsion = Vec::new();
        for o in orders {
            if o.is_zero() {
                free_rank += 1;
            } else if o.abs() != BigInt::one() {
                torsion.push(o.abs());
            }
        }
        let chain_ok = torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if chain_ok {
            return Self { free_rank, invariant_factors: torsion };
        }
        let mut parts: BTreeMap<(BigUint, u32), usize> = BTreeMap::new();
        for t in &torsion {
            for (p, e) in factor_biguint(t.magnitude()) {
                *parts.entry((p, e)).or_insert(0) += 1;
            }
        }
        PrimaryDecomposition {
            free_rank,
            parts: parts
                .into_iter()
                .map(|((prime, exponent), multiplicity)| PrimePower { prime, exponent, multiplicity })
                .collect(),
        }
        .to_group()
    }

    /// Builds from an invariant-factor chain, rejecting non-canonical input.
    pub fn from_invariant_factors(free_rank: usize, factors: Vec<BigInt>) -> Result<Self, LinalgError> {
        if factors.iter().any(|d| *d < BigInt::from(2)) {
            return Err(LinalgError::NotCanonical("invariant factors must be >= 2".into()));
        }
        if !factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])) {
            return Err(LinalgError::NotCanonical("invariant factors must form a divisibility chain".into()));
        }
        Ok(Self { free_rank, invariant_factors: factors })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn torsion(&self) -> AbelianGroup {
        Self { free_rank: 0, invariant_factors: self.invariant_factors.clone() }
    }

    pub fn with_free_rank(&self, free_rank: usize) -> AbelianGroup {
        Self { free_rank, invariant_factors: self.invariant_factors.clone() }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        Self::from_cyclic_orders(
            self.free_rank + other.free_rank,
            self.invariant_factors.iter().chain(&other.invariant_factors).cloned(),
        )
    }

    pub fn primary_decomposition(&self) -> PrimaryDecomposition {
        let mut parts: BTreeMap<(BigUint, u32), usize> = BTreeMap::new();
        for d in &self.invariant_factors {
            for (p, e) in factor_biguint(d.magnitude()) {
                *parts.entry((p, e)).or_insert(0) += 1;
            }
        }
        PrimaryDecomposition {
            free_rank: self.free_rank,
            parts: parts
                .into_iter()
                .map(|((prime, exponent), multiplicity)| PrimePower { prime, exponent, multiplicity })
                .collect(),
        }
    }

    /// Invariant-factor rendering, e.g. `Z/2 + Z/14 + Z^2`.
    pub fn invariant_string(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.invariant_factors.len() {
            let d = &self.invariant_factors[i];
            let run = self.invariant_factors[i..].iter().take_while(|x| *x == d).count();
            parts.push(if run == 1 { format!("Z/{d}") } else { format!("(Z/{d})^{run}") });
            i += run;
        }
        push_free(&mut parts, self.free_rank);
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn push_free(parts: &mut Vec<String>, rank: usize) {
    match rank {
        0 => {}
        1 => parts.push("Z".into()),
        r => parts.push(format!("Z^{r}")),
    }
}

/// Primary form, e.g. `Z/2^2 + Z/4^2 + Z`: `Z/q^k` is `k` copies of `Z/q`.
impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pd = self.primary_decomposition();
        let mut parts: Vec<String> = pd
            .parts
            .iter()
            .map(|pp| {
                let q = pp.prime.pow(pp.exponent);
                if pp.multiplicity == 1 {
                    format!("Z/{q}")
                } else {
                    format!("Z/{q}^{}", pp.multiplicity)
                }
            })
            .collect();
        push_free(&mut parts, pd.free_rank);
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Parses sums of `Z`, `Z^k`, `Z/q`, `Z/q^k` and `(Z/q)^k`; `0` is the trivial group.
impl FromStr for AbelianGroup {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinalgError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" || compact.is_empty() {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut orders = Vec::new();
        for term in compact.split(['+', '⊕']) {
            let term = term.replace("ℤ", "Z");
            let (body, mult) = match term.rsplit_once('^') {
                Some((b, k)) => (b.to_string(), k.parse::<usize>().map_err(|_| bad())?),
                None => (term.clone(), 1),
            };
            let body = body.trim_start_matches('(').trim_end_matches(')');
            if body == "Z" {
                free += mult;
            } else if let Some(q) = body.strip_prefix("Z/") {
                let q: BigInt = q.parse().map_err(|_| bad())?;
                if q.is_negative() {
                    return Err(bad());
                }
                orders.extend(std::iter::repeat_n(q, mult));
            } else {
                return Err(bad());
            }
        }
        Ok(Self::from_cyclic_orders(free, orders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    fn big(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn canonicalizes_orders() {
        let a = AbelianGroup::from_cyclic_orders(2, big(&[2, 2, 7]));
        let b = AbelianGroup::from_cyclic_orders(2, big(&[2, 14]));
        assert_eq!(a, b);
        assert_eq!(a.invariant_factors(), big(&[2, 14]).as_slice());
        let c = AbelianGroup::from_cyclic_orders(0, big(&[1, 0, 6, 4]));
        assert_eq!(c.free_rank(), 1);
        assert_eq!(c.invariant_factors(), big(&[2, 12]).as_slice());
    }

    #[test]
    fn primary_parts() {
        let pd = AbelianGroup::from_cyclic_orders(0, big(&[2, 14])).primary_decomposition();
        assert_eq!(pd.prime_powers(), vec![BigUint::from(2u32), BigUint::from(2u32), BigUint::from(7u32)]);
        let pd = AbelianGroup::from_cyclic_orders(2, big(&[2, 2])).primary_decomposition();
        assert_eq!(pd.free_rank, 2);
        assert_eq!(pd.prime_powers(), vec![BigUint::from(2u32); 2]);
        let pd = AbelianGroup::from_cyclic_orders(0, big(&[14, 14])).primary_decomposition();
        let pp: Vec<u32> = pd.prime_powers().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(pp, vec![2, 2, 7, 7]);
    }

    #[test]
    fn primary_roundtrip() {
        for s in ["Z/2^4 + Z/4^2 + Z/3^2 + Z", "Z/8 + Z/16 + Z/9^2 + Z/43^2", "0", "Z^3"] {
            let a = g(s);
            assert_eq!(a.primary_decomposition().to_group(), a);
            assert_eq!(g(&a.to_string()), a);
            assert_eq!(g(&a.invariant_string()), a);
        }
    }

    #[test]
    fn display_forms() {
        let a = g("(Z/2)^4 + (Z/4)^2 + Z");
        assert_eq!(a.to_string(), "Z/2^4 + Z/4^2 + Z");
        assert_eq!(a.invariant_string(), "(Z/2)^4 + (Z/4)^2 + Z");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(g("Z/2 + Z/14 + Z^2"), g("Z/2^2 + Z/7 + Z^2"));
    }

    #[test]
    fn rejects_garbage() {
        assert!("Q/2".parse::<AbelianGroup>().is_err());
        assert!("Z/x".parse::<AbelianGroup>().is_err());
        assert!(AbelianGroup::from_invariant_factors(0, big(&[2, 3])).is_err());
        assert!(AbelianGroup::from_invariant_factors(0, big(&[1])).is_err());
    }
}
