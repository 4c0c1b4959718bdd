//! Group rings: Laurent polynomials `Z[Z^k]` and the twisted ring `Z[Z^4 ⋊ Z^2]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::ot::ActionSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("arity mismatch: expected {expected} exponents, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("acting matrix is not unimodular (det = {det})")]
    NotUnimodular { det: BigInt },
    #[error("acting matrix must be {arity}x{arity}, got {rows}x{cols}")]
    MatrixShape { arity: usize, rows: usize, cols: usize },
    #[error("twisted elements belong to different actions")]
    ActionMismatch,
    #[error("exponent overflow")]
    ExponentOverflow,
}

/// An integer 4x4 matrix small enough to act on exponent vectors directly.
pub type Mat4 = [[i64; 4]; 4];

pub(crate) fn mat4_from(m: &IntMatrix) -> Option<Mat4> {
    let rows = m.to_i64_rows()?;
    let mut out = [[0i64; 4]; 4];
    for (r, row) in rows.iter().enumerate() {
        out[r].copy_from_slice(row);
    }
    Some(out)
}

#[inline]
pub(crate) fn mat4_apply(m: &Mat4, v: &[i64; 4]) -> Option<[i64; 4]> {
    let mut out = [0i64; 4];
    for (r, row) in m.iter().enumerate() {
        let mut acc = 0i64;
        for c in 0..4 {
            acc = acc.checked_add(row[c].checked_mul(v[c])?)?;
        }
        out[r] = acc;
    }
    Some(out)
}

#[inline]
fn add_exponents<const K: usize>(a: &[i64; K], b: &[i64; K]) -> [i64; K] {
    let mut out = [0i64; K];
    for i in 0..K {
        out[i] = a[i].checked_add(b[i]).expect("exponent overflow");
    }
    out
}

fn variable_name(k: usize, i: usize) -> String {
    const SHORT: [&str; 4] = ["x", "y", "z", "t"];
    if k <= 4 {
        SHORT[i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Element of `Z[Z^K]`: finitely many monomials `x^e` with nonzero integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentElement<const K: usize> {
    terms: BTreeMap<[i64; K], BigInt>,
}

impl<const K: usize> Default for LaurentElement<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const K: usize> LaurentElement<K> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial([0; K], 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial([0; K], c)
    }

    pub fn monomial(exponent: [i64; K], coeff: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(exponent, coeff.into());
        out
    }

    /// The generator `x_i` (0-based).
    pub fn var(i: usize) -> Self {
        assert!(i < K, "variable index {i} out of range for arity {K}");
        let mut e = [0; K];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    /// Builds an element from dynamically sized exponent vectors.
    pub fn from_terms<I, C>(terms: I) -> Result<Self, GroupRingError>
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (exp, c) in terms {
            let exp: [i64; K] = exp
                .as_slice()
                .try_into()
                .map_err(|_| GroupRingError::ArityMismatch { expected: K, got: exp.len() })?;
            out.add_term(exp, c.into());
        }
        Ok(out)
    }

    /// `Σ_{i=from}^{to} x_c^i` (empty when `to < from`).
    pub fn geometric_run(c: usize, from: i64, to: i64) -> Self {
        let mut out = Self::zero();
        for i in from..=to {
            let mut e = [0; K];
            e[c] = i;
            out.terms.insert(e, BigInt::one());
        }
        out
    }

    pub fn arity(&self) -> usize {
        K
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64; K], &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponent: &[i64; K]) -> BigInt {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exponent: [i64; K], coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Multiplication by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64; K]) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| (add_exponents(e, shift), v.clone())).collect() }
    }

    /// Ring homomorphism `Z[Z^K] → Z` sending every group element to 1.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// The automorphism `x^v ↦ x^{A v}` induced by a unimodular `A`.
    pub fn act_by_matrix(&self, a: &IntMatrix) -> Result<Self, GroupRingError> {
        if a.rows() != K || a.cols() != K {
            return Err(GroupRingError::MatrixShape { arity: K, rows: a.rows(), cols: a.cols() });
        }
        let det = a.determinant().expect("square");
        if det.abs() != BigInt::one() {
            return Err(GroupRingError::NotUnimodular { det });
        }
        let rows = a.to_i64_rows().ok_or(GroupRingError::ExponentOverflow)?;
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut image = [0i64; K];
            for (r, row) in rows.iter().enumerate() {
                let mut acc = 0i64;
                for (x, y) in row.iter().zip(e) {
                    acc = x
                        .checked_mul(*y)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(GroupRingError::ExponentOverflow)?;
                }
                image[r] = acc;
            }
            out.add_term(image, c.clone());
        }
        Ok(out)
    }
}

impl<const K: usize> Add<&LaurentElement<K>> for &LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn add(self, rhs: &LaurentElement<K>) -> LaurentElement<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<const K: usize> Add for LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn add(mut self, rhs: LaurentElement<K>) -> LaurentElement<K> {
        self += &rhs;
        self
    }
}

impl<const K: usize> AddAssign<&LaurentElement<K>> for LaurentElement<K> {
    fn add_assign(&mut self, rhs: &LaurentElement<K>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<const K: usize> SubAssign<&LaurentElement<K>> for LaurentElement<K> {
    fn sub_assign(&mut self, rhs: &LaurentElement<K>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl<const K: usize> Sub<&LaurentElement<K>> for &LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn sub(self, rhs: &LaurentElement<K>) -> LaurentElement<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<const K: usize> Sub for LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn sub(mut self, rhs: LaurentElement<K>) -> LaurentElement<K> {
        self -= &rhs;
        self
    }
}

impl<const K: usize> Neg for &LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn neg(self) -> LaurentElement<K> {
        LaurentElement { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl<const K: usize> Neg for LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn neg(self) -> LaurentElement<K> {
        -&self
    }
}

impl<const K: usize> Mul<&LaurentElement<K>> for &LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn mul(self, rhs: &LaurentElement<K>) -> LaurentElement<K> {
        let mut out = LaurentElement::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(add_exponents(e1, e2), c1 * c2);
            }
        }
        out
    }
}

impl<const K: usize> Mul for LaurentElement<K> {
    type Output = LaurentElement<K>;
    fn mul(self, rhs: LaurentElement<K>) -> LaurentElement<K> {
        &self * &rhs
    }
}

/// Convolution product; arity agreement is enforced by the type.
pub fn laurent_multiply<const K: usize>(a: &LaurentElement<K>, b: &LaurentElement<K>) -> LaurentElement<K> {
    a * b
}

fn write_monomial(f: &mut fmt::Formatter<'_>, k: usize, e: &[i64], c: &BigInt, first: bool) -> fmt::Result {
    let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
    if first {
        if sign == "-" {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    let factors: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| {
            let name = variable_name(k, i);
            if x == 1 {
                name
            } else {
                format!("{name}^{x}")
            }
        })
        .collect();
    match (factors.is_empty(), abs.is_one()) {
        (true, _) => write!(f, "{abs}"),
        (false, true) => write!(f, "{}", factors.join("*")),
        (false, false) => write!(f, "{abs}*{}", factors.join("*")),
    }
}

impl<const K: usize> fmt::Display for LaurentElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            write_monomial(f, K, e, c, i == 0)?;
        }
        Ok(())
    }
}

impl<const K: usize> fmt::Debug for LaurentElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent<{K}>({self})")
    }
}

/// Shared action data for [`TwistedElement`]s: the spec plus a cache of `A(g)`.
pub struct TwistedRing {
    spec: ActionSpec,
    cache: Mutex<HashMap<[i64; 2], Mat4>>,
}

impl fmt::Debug for TwistedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedRing").field("m", &self.spec.m()).field("n", &self.spec.n()).finish()
    }
}

impl TwistedRing {
    pub fn new(spec: ActionSpec) -> Arc<Self> {
        Arc::new(Self { spec, cache: Mutex::new(HashMap::new()) })
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    /// `A(g)` as a machine-integer matrix, memoized.
    pub fn matrix(&self, g: [i64; 2]) -> Result<Mat4, GroupRingError> {
        if let Some(m) = self.cache.lock().expect("cache poisoned").get(&g) {
            return Ok(*m);
        }
        let m = mat4_from(&self.spec.action_matrix(g[0], g[1])).ok_or(GroupRingError::ExponentOverflow)?;
        self.cache.lock().expect("cache poisoned").insert(g, m);
        Ok(m)
    }

    fn same_action(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.spec == other.spec
    }
}

/// Key of a twisted term: `(v, g)` denotes the group element with normal part `v ∈ Z^4`
/// and quotient part `g ∈ Z^2`.
pub type TwistedKey = ([i64; 4], [i64; 2]);

/// Element of `Z[Z^4 ⋊ Z^2]` with `(v1, g1)(v2, g2) = (v1 + A(g1) v2, g1 + g2)`.
#[derive(Clone)]
pub struct TwistedElement {
    ring: Arc<TwistedRing>,
    terms: BTreeMap<TwistedKey, BigInt>,
}

impl PartialEq for TwistedElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_action(&other.ring) && self.terms == other.terms
    }
}

impl Eq for TwistedElement {}

impl fmt::Debug for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Twisted({self})")
    }
}

impl fmt::Display for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((v, g), c)) in self.terms.iter().enumerate() {
            let e = [v[0], v[1], v[2], v[3], g[0], g[1]];
            write_monomial(f, 6, &e, c, i == 0)?;
        }
        Ok(())
    }
}

impl TwistedElement {
    pub fn zero(ring: &Arc<TwistedRing>) -> Self {
        Self { ring: Arc::clone(ring), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<TwistedRing>) -> Self {
        Self::monomial(ring, [0; 4], [0; 2], 1)
    }

    pub fn monomial(ring: &Arc<TwistedRing>, v: [i64; 4], g: [i64; 2], coeff: impl Into<BigInt>) -> Self {
        let mut out = Self::zero(ring);
        out.add_term((v, g), coeff.into());
        out
    }

    pub fn from_terms<I, C>(ring: &Arc<TwistedRing>, terms: I) -> Self
    where
        I: IntoIterator<Item = (TwistedKey, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero(ring);
        for (key, c) in terms {
            out.add_term(key, c.into());
        }
        out
    }

    pub fn ring(&self) -> &Arc<TwistedRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TwistedKey, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TwistedKey) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, key: TwistedKey, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    fn check_ring(&self, other: &Self) -> Result<(), GroupRingError> {
        if self.ring.same_action(&other.ring) {
            Ok(())
        } else {
            Err(GroupRingError::ActionMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, -c);
        }
        Ok(out)
    }

    pub fn negated(&self) -> Self {
        Self { ring: Arc::clone(&self.ring), terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GroupRingError> {
        twisted_multiply(self, other)
    }
}

/// Bilinear extension of the semidirect product.
pub fn twisted_multiply(a: &TwistedElement, b: &TwistedElement) -> Result<TwistedElement, GroupRingError> {
    a.check_ring(b)?;
    let mut out = TwistedElement::zero(&a.ring);
    let mut by_g: BTreeMap<[i64; 2], Vec<(&TwistedKey, &BigInt)>> = BTreeMap::new();
    for (k, c) in &a.terms {
        by_g.entry(k.1).or_default().push((k, c));
    }
    for (g1, left) in by_g {
        let a_g1 = a.ring.matrix(g1)?;
        for ((v2, g2), c2) in &b.terms {
            let moved = mat4_apply(&a_g1, v2).ok_or(GroupRingError::ExponentOverflow)?;
            for ((v1, _), c1) in &left {
                let mut v = [0i64; 4];
                for i in 0..4 {
                    v[i] = v1[i].checked_add(moved[i]).ok_or(GroupRingError::ExponentOverflow)?;
                }
                let g = [
                    g1[0].checked_add(g2[0]).ok_or(GroupRingError::ExponentOverflow)?,
                    g1[1].checked_add(g2[1]).ok_or(GroupRingError::ExponentOverflow)?,
                ];
                out.add_term((v, g), *c1 * c2);
            }
        }
    }
    Ok(out)
}
