//! First homology through the abelianization of `Z^4 ⋊ Z^2`, and the invariant
//! `β(m, n)` for odd `m`: gcd definition, prime-by-prime closed form, periods `n(p)`,
//! and modular divisibility checks for very large `n`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, PartialFactorization};
use crate::linalg::{cokernel, AbelianGroup, IntMatrix};
use crate::ot::{seq_a, seq_b, ActionSpec, OtError, QuarticFieldData};

/// Candidates tried one by one when the divisor scan for `n(p)` finds nothing.
pub const PERIOD_FALLBACK_CAP: u64 = 5_000_000;

#[derive(Debug, Error)]
pub enum H1Error {
    #[error("β(m, n) is only defined for odd m, got m = {0}")]
    EvenM(u64),
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("{p} does not divide -a_{m}")]
    NotAFactor { m: u64, p: u64 },
    #[error("no n ≤ {searched} with {p} | β({m}, n)")]
    PeriodNotFound { m: u64, p: u64, searched: u64 },
    #[error("factorization too large: {0}")]
    FactorizationTooLarge(PartialFactorization),
    #[error("prime {0} exceeds 2^32; p^2 - 1 does not fit the period search")]
    PrimeTooLarge(BigUint),
    #[error(transparent)]
    Ot(#[from] OtError),
}

/// The `8 × 4` matrix of abelianized conjugation relations: `A(1,0)^T − I` stacked over
/// `A(0,1)^T − I`. Row `k` is the relation `Σ_l R[k][l] f̄_l = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationMatrix {
    m: u64,
    n: u64,
    matrix: IntMatrix,
}

impl RelationMatrix {
    pub fn new(spec: &ActionSpec) -> Self {
        let id = IntMatrix::identity(4);
        let block = |a: IntMatrix| a.transpose().checked_sub(&id).expect("4x4");
        let upper = block(spec.action_matrix(1, 0));
        let lower = block(spec.action_matrix(0, 1));
        RelationMatrix { m: spec.m(), n: spec.n(), matrix: upper.vstack(&lower).expect("4 columns") }
    }

    pub fn preset(m: u64, n: u64) -> Result<Self, H1Error> {
        Ok(Self::new(&ActionSpec::preset(m, n)?))
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `Z^4 / ⟨rows⟩`: the image of the fiber in `H_1`.
    pub fn fiber_quotient(&self) -> AbelianGroup {
        cokernel(&self.matrix.transpose())
    }
}

/// `H_1(X)` for an arbitrary action: `Z^2 ⊕ Z^4 / ⟨relations⟩`.
pub fn h1_of(spec: &ActionSpec) -> AbelianGroup {
    RelationMatrix::new(spec).fiber_quotient().direct_sum(&AbelianGroup::free(2))
}

/// `H_1(X_{m,n})` for the `p = 2` preset.
pub fn h1(m: u64, n: u64) -> Result<AbelianGroup, H1Error> {
    Ok(h1_of(&ActionSpec::preset(m, n)?))
}

/// Closed form for `n = 1`: `(Z/2)^2 ⊕ Z/7 ⊕ Z^2` when `6 | m`, otherwise `(Z/2)^2 ⊕ Z^2`.
pub fn h1_x_m1(m: u64) -> Result<AbelianGroup, H1Error> {
    if m == 0 {
        return Err(OtError::NonPositive("m").into());
    }
    let mut orders = vec![2u64, 2];
    if m.is_multiple_of(6) {
        orders.push(7);
    }
    Ok(AbelianGroup::from_cyclic_orders(2, orders.into_iter().map(BigInt::from)))
}

fn require_odd(m: u64) -> Result<(), H1Error> {
    if m == 0 {
        return Err(OtError::NonPositive("m").into());
    }
    if m.is_multiple_of(2) {
        return Err(H1Error::EvenM(m));
    }
    Ok(())
}

/// `-a_m`, positive for odd `m`.
pub fn norm_factor(m: u64) -> BigUint {
    (-seq_a(m)).to_biguint().expect("-a_m > 0 for odd m")
}

/// `-a_m` after checking that `m` is odd.
pub fn norm_factor_checked(m: u64) -> Result<BigUint, H1Error> {
    require_odd(m)?;
    Ok(norm_factor(m))
}

/// `(c0 + c1 w + c2 w^2 + c3 w^3)(d0 + ...)` in `(Z/q)[w] / (w^4 − 2)`.
fn quartic_mul(x: &[BigInt; 4], y: &[BigInt; 4], q: &BigInt) -> [BigInt; 4] {
    let mut full: [BigInt; 7] = Default::default();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            full[i + j] += xi * yj;
        }
    }
    let mut out: [BigInt; 4] = Default::default();
    for k in 0..4 {
        let mut c = full[k].clone();
        if k + 4 < 7 {
            c += &full[k + 4] * 2;
        }
        out[k] = c.mod_floor(q);
    }
    out
}

/// `(e_n, f_n, g_n, h_n) mod q` by square-and-multiply on `(1 + w)^2`.
pub fn efgh_mod(n: u64, q: &BigInt) -> [BigInt; 4] {
    let mut acc: [BigInt; 4] = [BigInt::one().mod_floor(q), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    let mut base = step_unit(q);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = quartic_mul(&acc, &base, q);
        }
        base = quartic_mul(&base, &base, q);
        e >>= 1;
    }
    acc
}

fn step_unit(q: &BigInt) -> [BigInt; 4] {
    [1, 2, 1, 0].map(|c| BigInt::from(c).mod_floor(q))
}

/// gcd of `-a_m` with the four reduced relation entries in the last column.
fn beta_from_efgh(q: &BigInt, s: &BigInt, efgh: &[BigInt; 4]) -> BigUint {
    let [e, f, g, h] = efgh;
    let one = BigInt::one();
    let entries = [
        -(f * s) - h,
        (&one - e) * s - g,
        -(h * s * BigInt::from(2)) - f,
        -(g * s * BigInt::from(2)) + &one - e,
    ];
    let mut acc = q.clone();
    for x in entries {
        acc = acc.gcd(&x);
    }
    acc.to_biguint().expect("gcd is non-negative")
}

/// `β(m, n)` as the gcd of the reduced relation-matrix entries; exact.
pub fn beta_gcd(m: u64, n: u64) -> Result<BigUint, H1Error> {
    require_odd(m)?;
    if n == 0 {
        return Err(OtError::NonPositive("n").into());
    }
    let q = BigInt::from(norm_factor(m));
    let s = seq_a(m) + seq_b(m);
    Ok(beta_from_efgh(&q, &s, &efgh_mod(n, &q)))
}

/// `β(m, 1), …, β(m, n_max)`, stepping `(1 + w)^{2n}` incrementally.
pub fn beta_gcd_sweep(m: u64, n_max: u64) -> Result<Vec<BigUint>, H1Error> {
    require_odd(m)?;
    let q = BigInt::from(norm_factor(m));
    let s = seq_a(m) + seq_b(m);
    let step = step_unit(&q);
    let mut cur = step.clone();
    let mut out = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        out.push(beta_from_efgh(&q, &s, &cur));
        cur = quartic_mul(&cur, &step, &q);
    }
    Ok(out)
}

type Mat4p = [[u64; 4]; 4];

fn mat_mod(a: &IntMatrix, p: u64) -> Mat4p {
    let pb = BigInt::from(p);
    let mut out = [[0u64; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[(i, j)].mod_floor(&pb).to_u64().expect("reduced");
        }
    }
    out
}

fn mat_mul_mod(a: &Mat4p, b: &Mat4p, p: u64) -> Mat4p {
    let mut out = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0u64;
            for k in 0..4 {
                acc = (acc + arith::mul_mod(a[i][k], b[k][j], p)) % p;
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_pow_mod(a: &Mat4p, mut e: u128, p: u64) -> Mat4p {
    let mut acc = [[0u64; 4]; 4];
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = 1 % p;
    }
    let mut base = *a;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul_mod(&acc, &base, p);
        }
        base = mat_mul_mod(&base, &base, p);
        e >>= 1;
    }
    acc
}

fn rank_mod(rows: &mut [[u64; 4]], p: u64) -> usize {
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = arith::pow_mod(rows[rank][col], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = arith::mul_mod(rows[r][col], inv, p);
                let pivot_row = rows[rank];
                for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                    *x = (*x + p - arith::mul_mod(factor, y, p)) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `p | β(m, n)`, decided by the rank of the relation matrix over `F_p`; the cost
/// is logarithmic in `m` and `n`.
///
/// Over `F_p` the `(Z/2)^2` part has full rank 2 and the rest is `Z/β ⊕ Z/δ` with `β | δ`,
/// so `p | β` exactly when the rank is at most 2. Rank below 4 would only say `p | δ`:
/// at `(m, n) = (11, 8)` the group is `(Z/2)^2 ⊕ Z/353 ⊕ Z^2` while `β = 1`.
pub fn divides_beta_mod_p(m: u64, n: u64, p: u64) -> Result<bool, H1Error> {
    require_odd(m)?;
    if n == 0 {
        return Err(OtError::NonPositive("n").into());
    }
    if p == 2 || !arith::is_prime_u64(p) {
        return Err(H1Error::BadPrime(p));
    }
    let field = QuarticFieldData::preset_p2();
    let u = mat_pow_mod(&mat_mod(field.unit_u(), p), field.i() as u128 * m as u128, p);
    let v = mat_pow_mod(&mat_mod(field.unit_v(), p), field.j() as u128 * n as u128, p);
    let mut rows = [[0u64; 4]; 8];
    for (block, a) in [u, v].iter().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let diag = u64::from(i == j);
                rows[4 * block + i][j] = (a[j][i] + p - diag) % p;
            }
        }
    }
    Ok(rank_mod(&mut rows, p) <= 2)
}

fn factor_u64_bounded(n: u64, bound: u64) -> Result<Vec<(u64, u32)>, H1Error> {
    let factors = arith::factor_bounded(&BigUint::from(n), bound).map_err(H1Error::FactorizationTooLarge)?;
    Ok(factors.into_iter().map(|(p, e)| (p.to_u64().expect("divides a u64"), e)).collect())
}

/// `n(p)`: the least `n ≥ 1` with `p | β(m, n)`, searched among the divisors of `p^2 − 1`.
pub fn find_period(m: u64, p: u64) -> Result<u64, H1Error> {
    find_period_with_bound(m, p, arith::factor_bound_from_env())
}

pub fn find_period_with_bound(m: u64, p: u64, bound: u64) -> Result<u64, H1Error> {
    require_odd(m)?;
    if p == 2 || !arith::is_prime_u64(p) {
        return Err(H1Error::BadPrime(p));
    }
    if !(norm_factor(m) % p).is_zero() {
        return Err(H1Error::NotAFactor { m, p });
    }
    if p > u32::MAX as u64 {
        return Err(H1Error::PrimeTooLarge(BigUint::from(p)));
    }
    let factors = arith::merge_factors(&factor_u64_bounded(p - 1, bound)?, &factor_u64_bounded(p + 1, bound)?);
    for d in arith::divisors(&factors) {
        if divides_beta_mod_p(m, d, p)? {
            return Ok(d);
        }
    }
    let searched = (p * p - 1).min(PERIOD_FALLBACK_CAP);
    for d in 1..=searched {
        if divides_beta_mod_p(m, d, p)? {
            return Ok(d);
        }
    }
    Err(H1Error::PeriodNotFound { m, p, searched })
}

/// One prime of `-a_m = Π p_i^{s_i}` with its period `n(p_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeDatum {
    pub p: u64,
    pub s: u32,
    pub period: u64,
}

/// Prime data of `-a_m` driving the closed form for `β(m, ·)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaFactorization {
    m: u64,
    prime_data: Vec<PrimeDatum>,
}

impl BetaFactorization {
    pub fn new(m: u64) -> Result<Self, H1Error> {
        Self::with_bound(m, arith::factor_bound_from_env())
    }

    pub fn with_bound(m: u64, bound: u64) -> Result<Self, H1Error> {
        require_odd(m)?;
        let factors = arith::factor_bounded(&norm_factor(m), bound).map_err(H1Error::FactorizationTooLarge)?;
        let mut prime_data = Vec::with_capacity(factors.len());
        for (p, s) in factors {
            let p = p.to_u64().ok_or_else(|| H1Error::PrimeTooLarge(p.clone()))?;
            prime_data.push(PrimeDatum { p, s, period: find_period_with_bound(m, p, bound)? });
        }
        Ok(BetaFactorization { m, prime_data })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn prime_data(&self) -> &[PrimeDatum] {
        &self.prime_data
    }

    /// `Π p_i^{v_i}` with `v_i = min(s_i, t_i)` and `t_i` the number of `ℓ ≥ 0` such that
    /// `p_i^ℓ · n(p_i)` divides `n`.
    pub fn closed_form(&self, n: u64) -> BigUint {
        let n = BigUint::from(n);
        let mut out = BigUint::one();
        for d in &self.prime_data {
            let p = BigUint::from(d.p);
            let mut modulus = BigUint::from(d.period);
            let mut t = 0u32;
            while t < d.s && (&n % &modulus).is_zero() {
                t += 1;
                modulus *= &p;
            }
            out *= p.pow(t);
        }
        out
    }

    /// `lcm_i(p_i^{s_i − 1} · n(p_i))`.
    pub fn period(&self) -> BigUint {
        self.prime_data.iter().fold(BigUint::one(), |acc, d| {
            acc.lcm(&(BigUint::from(d.p).pow(d.s - 1) * d.period))
        })
    }
}

pub fn beta_closed_form(m: u64, n: u64) -> Result<BigUint, H1Error> {
    Ok(BetaFactorization::new(m)?.closed_form(n))
}

pub fn beta_period(m: u64) -> Result<BigUint, H1Error> {
    Ok(BetaFactorization::new(m)?.period())
}

/// Whether `g` is `(Z/2)^2 ⊕ (Z/β)^2 ⊕ Z^2`.
pub fn has_beta_shape(g: &AbelianGroup, beta: &BigUint) -> bool {
    let b = BigInt::from_biguint(Sign::Plus, beta.clone());
    let expected = AbelianGroup::from_cyclic_orders(2, [BigInt::from(2), BigInt::from(2), b.clone(), b]);
    g.primary_decomposition() == expected.primary_decomposition()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::seq_efgh;
    use proptest::prelude::*;

    fn group(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    /// `β` straight from the full-size binomial sums, no modular reduction.
    fn beta_exact(m: u64, n: u64) -> BigUint {
        let (a, b) = (seq_a(m), seq_b(m));
        let s = &a + &b;
        let [e, f, g, h] = seq_efgh(n);
        let one = BigInt::one();
        let entries = [
            -a,
            -(&f * &s) - &h,
            (&one - &e) * &s - &g,
            -(&h * &s * BigInt::from(2)) - &f,
            -(&g * &s * BigInt::from(2)) + &one - &e,
        ];
        entries.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).to_biguint().unwrap()
    }

    #[test]
    fn relation_matrix_for_n1_matches_hand_derivation() {
        for m in 1..6u64 {
            let r = RelationMatrix::preset(m, 1).unwrap();
            let (a, b) = (seq_a(m), seq_b(m));
            let am1: BigInt = &a - 1;
            let z = BigInt::zero();
            let top = vec![
                vec![am1.clone(), z.clone(), b.clone(), z.clone()],
                vec![z.clone(), am1.clone(), z.clone(), b.clone()],
                vec![&b * 2, z.clone(), am1.clone(), z.clone()],
                vec![z.clone(), &b * 2, z.clone(), am1.clone()],
            ];
            let bottom: Vec<Vec<BigInt>> = [[0, 2, 1, 0], [0, 0, 2, 1], [2, 0, 0, 2], [4, 2, 0, 0]]
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let expected = IntMatrix::from_big_rows(top.into_iter().chain(bottom).collect()).unwrap();
            assert_eq!(r.matrix(), &expected, "m = {m}");
        }
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1(1, 1).unwrap(), group("Z/2^2 + Z^2"));
        assert_eq!(h1(6, 3).unwrap(), group("Z/2^2 + Z/7^2 + Z^2"));
        assert_eq!(h1(4, 4).unwrap(), group("Z/4^2 + Z/8^2 + Z^2"));
        assert_eq!(h1(8, 4).unwrap(), group("Z/3^4 + Z/4^2 + Z/8^2 + Z^2"));
    }

    #[test]
    fn identity_action_gives_free_abelianization() {
        let spec = ActionSpec::new(QuarticFieldData::identity_action(), 1, 1).unwrap();
        assert_eq!(h1_of(&spec), AbelianGroup::free(6));
    }

    #[test]
    fn n1_dichotomy_agrees_with_relation_matrix() {
        for m in 1..=18 {
            assert_eq!(h1_x_m1(m).unwrap(), h1(m, 1).unwrap(), "m = {m}");
        }
        // Z/2 + Z/14 is the same group
        assert_eq!(h1_x_m1(6).unwrap(), group("Z/2 + Z/14 + Z^2"));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_gcd(3, 24).unwrap(), BigUint::from(7u32));
        assert_eq!(beta_gcd(3, 23).unwrap(), BigUint::one());
        assert_eq!(beta_gcd(15, 465).unwrap(), BigUint::from(961u32));
        for n in 1..50 {
            assert!(beta_gcd(1, n).unwrap().is_one());
        }
        assert!(matches!(beta_gcd(4, 1), Err(H1Error::EvenM(4))));
    }

    #[test]
    fn modular_gcd_matches_full_size_entries() {
        for m in [1u64, 3, 5, 7, 9, 11] {
            for n in 1..=60 {
                assert_eq!(beta_gcd(m, n).unwrap(), beta_exact(m, n), "({m}, {n})");
            }
        }
        assert_eq!(beta_gcd(9, 1800).unwrap(), beta_exact(9, 1800));
    }

    #[test]
    fn sweep_matches_pointwise() {
        let sweep = beta_gcd_sweep(9, 200).unwrap();
        for (k, b) in sweep.iter().enumerate() {
            assert_eq!(b, &beta_gcd(9, k as u64 + 1).unwrap());
        }
    }

    #[test]
    fn h1_has_beta_shape_for_odd_m() {
        for m in (1..=9).step_by(2) {
            let sweep = beta_gcd_sweep(m, 60).unwrap();
            for n in 1..=60u64 {
                let g = h1(m, n).unwrap();
                assert!(has_beta_shape(&g, &sweep[n as usize - 1]), "({m}, {n}): {g}");
            }
        }
    }

    #[test]
    fn odd_block_need_not_be_square() {
        let g = h1(11, 8).unwrap();
        assert_eq!(g, group("Z/2^2 + Z/353 + Z^2"));
        assert!(beta_gcd(11, 8).unwrap().is_one());
        assert!(!divides_beta_mod_p(11, 8, 353).unwrap());
        assert!(divides_beta_mod_p(11, 88, 353).unwrap());
    }

    #[test]
    fn modular_check_matches_gcd() {
        for m in (3..=15).step_by(2) {
            let sweep = beta_gcd_sweep(m, 200).unwrap();
            let primes: Vec<u64> = arith::factor_u64(norm_factor(m).to_u64().unwrap()).iter().map(|f| f.0).collect();
            assert!(!primes.is_empty());
            for n in 1..=200u64 {
                for &p in &primes {
                    let by_gcd = (&sweep[n as usize - 1] % p).is_zero();
                    assert_eq!(divides_beta_mod_p(m, n, p).unwrap(), by_gcd, "({m}, {n}, {p})");
                }
            }
        }
        assert!(divides_beta_mod_p(19, 178017080, 9369319).unwrap());
        assert!(matches!(divides_beta_mod_p(3, 24, 9), Err(H1Error::BadPrime(9))));
        assert!(matches!(divides_beta_mod_p(3, 24, 2), Err(H1Error::BadPrime(2))));
    }

    #[test]
    fn periods() {
        assert_eq!(find_period(3, 7).unwrap(), 24);
        assert_eq!(find_period(5, 41).unwrap(), 210);
        assert_eq!(find_period(9, 199).unwrap(), 1800);
        assert!(matches!(find_period(3, 5), Err(H1Error::NotAFactor { .. })));
        // the divisor scan returns the global minimum
        for (m, p) in [(3u64, 7u64), (5, 41), (9, 7), (11, 23)] {
            let n_p = find_period(m, p).unwrap();
            assert!((1..n_p).all(|d| !divides_beta_mod_p(m, d, p).unwrap()));
            assert_eq!((p * p - 1) % n_p, 0);
        }
    }

    #[test]
    fn closed_form_and_period_examples() {
        assert_eq!(beta_closed_form(9, 1800).unwrap(), BigUint::from(1393u32));
        assert_eq!(beta_closed_form(15, 26040).unwrap(), BigUint::from(7u64 * 31 * 31 * 41));
        assert_eq!(beta_closed_form(13, 39).unwrap(), BigUint::from(79u32));
        assert_eq!(beta_period(3).unwrap(), BigUint::from(24u32));
        assert_eq!(beta_period(15).unwrap(), BigUint::from(26040u32));
        assert_eq!(beta_period(1).unwrap(), BigUint::one());
        let f = BetaFactorization::new(15).unwrap();
        let data: Vec<(u64, u32, u64)> = f.prime_data().iter().map(|d| (d.p, d.s, d.period)).collect();
        assert_eq!(data, vec![(7, 1, 24), (31, 2, 15), (41, 1, 210)]);
    }

    #[test]
    fn closed_form_matches_gcd() {
        for m in (1..=15).step_by(2) {
            let f = BetaFactorization::new(m).unwrap();
            let sweep = beta_gcd_sweep(m, 1000).unwrap();
            for n in 1..=1000u64 {
                assert_eq!(f.closed_form(n), sweep[n as usize - 1], "({m}, {n})");
            }
        }
    }

    #[test]
    fn periodicity() {
        for m in (1..=9).step_by(2) {
            let period = beta_period(m).unwrap().to_u64().unwrap();
            let span = (2 * period).min(4000);
            let sweep = beta_gcd_sweep(m, span + period).unwrap();
            for n in 0..span as usize {
                assert_eq!(sweep[n], sweep[n + period as usize], "m = {m}, n = {}", n + 1);
            }
        }
    }

    #[test]
    fn tiny_factor_bound_is_reported() {
        // -a_17 = 103 * 15607 needs trial division past 2
        let err = BetaFactorization::with_bound(17, 2).unwrap_err();
        assert!(matches!(err, H1Error::FactorizationTooLarge(_)), "{err}");
    }

    proptest! {
        #[test]
        fn multiples_of_the_period_are_divisible(k in 1u64..40, idx in 0usize..4) {
            let (m, p) = [(3u64, 7u64), (5, 41), (7, 239), (11, 353)][idx];
            let n_p = find_period(m, p).unwrap();
            prop_assert!(divides_beta_mod_p(m, k * n_p, p).unwrap());
        }

        #[test]
        fn beta_divides_norm(m in (0u64..8).prop_map(|k| 2 * k + 1), n in 1u64..500) {
            let b = beta_gcd(m, n).unwrap();
            prop_assert!((norm_factor(m) % b).is_zero());
        }
    }
}
