//! Koszul free resolution of `Z` over `Z[Z^K]` with its contracting homotopy.
//!
//! Cells `e_S` are indexed by subsets `S ⊆ {1, …, K}`; the boundary is
//! `∂ e_S = Σ_j (-1)^{j-1} (x_{i_j} - 1) e_{S \ i_j}` and the homotopy is the
//! coordinate-by-coordinate telescoping operator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::group_ring::LaurentElement;
use crate::linalg::{IntChainComplex, IntMatrix};

/// Largest supported rank of the free abelian group.
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("the boundary of a degree-0 element is the augmentation, not a chain")]
    DegreeZero,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("invalid cell {indices:?} for arity {arity}")]
    InvalidCell { indices: Vec<usize>, arity: usize },
}

/// A subset of coordinates, stored as a bit mask (bit `c` is coordinate `c + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Cell(u16);

impl Cell {
    pub const EMPTY: Cell = Cell(0);

    /// From 1-based, strictly increasing indices within `1..=arity`.
    pub fn new(arity: usize, indices: &[usize]) -> Result<Self, ResolutionError> {
        let invalid = || ResolutionError::InvalidCell { indices: indices.to_vec(), arity };
        if arity > MAX_ARITY {
            return Err(invalid());
        }
        let mut bits = 0u16;
        let mut last = 0usize;
        for &i in indices {
            if i <= last || i > arity {
                return Err(invalid());
            }
            bits |= 1 << (i - 1);
            last = i;
        }
        Ok(Cell(bits))
    }

    pub fn from_bits(bits: u16) -> Self {
        Cell(bits)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 0-based coordinate membership.
    #[inline]
    pub fn contains(self, c: usize) -> bool {
        self.0 >> c & 1 == 1
    }

    /// 1-based indices, ascending.
    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|&c| self.contains(c)).map(|c| c + 1).collect()
    }

    /// Smallest 0-based coordinate, if any.
    #[inline]
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    #[inline]
    pub fn with(self, c: usize) -> Cell {
        Cell(self.0 | 1 << c)
    }

    #[inline]
    pub fn without(self, c: usize) -> Cell {
        Cell(self.0 & !(1 << c))
    }

    /// Faces of `∂ e_S`: `(coordinate, sign, S \ coordinate)` in index order.
    pub fn faces(self) -> impl Iterator<Item = (usize, i64, Cell)> {
        (0..16usize).filter(move |&c| self.contains(c)).enumerate().map(move |(j, c)| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            (c, sign, self.without(c))
        })
    }

    /// All cells of a degree in lexicographic order of their index lists.
    pub fn all_of_degree(arity: usize, degree: usize) -> Vec<Cell> {
        let mut out: Vec<Cell> = (0u32..1 << arity)
            .map(|b| Cell(b as u16))
            .filter(|c| c.degree() == degree)
            .collect();
        out.sort_by_key(|c| c.indices());
        out
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    /// Degree first, then lexicographic on index lists.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "e{}[{}]", self.degree(), idx.join(""))
    }
}

/// Contracting homotopy on a single monomial `x^m e_S`, reported term by term.
///
/// For each coordinate `c ∉ S` below `min S` (every coordinate when `S = ∅`) emits
/// `sign(m_c) · x_c^i · Π_{c' > c} x_{c'}^{m_{c'}} · e_{{c} ∪ S}` for
/// `i ∈ [m̄_c, m_c - 1 - m̄_c]`, where `m̄ = min(m, 0)`.
pub(crate) fn homotopy_monomial<const K: usize>(
    m: &[i64; K],
    cell: Cell,
    mut emit: impl FnMut([i64; K], Cell, i64),
) {
    let upper = cell.min().unwrap_or(K);
    for c in 0..upper {
        let mc = m[c];
        if mc == 0 {
            continue;
        }
        let (from, to, sign) = if mc > 0 { (0, mc - 1, 1) } else { (mc, -1, -1) };
        let target = cell.with(c);
        let mut e = *m;
        e[..c].fill(0);
        for i in from..=to {
            e[c] = i;
            emit(e, target, sign);
        }
    }
}

/// Formal `Z[Z^K]`-combination of Koszul cells.
#[derive(Clone, PartialEq, Eq)]
pub struct ResolutionElement<const K: usize> {
    terms: BTreeMap<Cell, LaurentElement<K>>,
}

impl<const K: usize> Default for ResolutionElement<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const K: usize> fmt::Debug for ResolutionElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<const K: usize> fmt::Display for ResolutionElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(c, l)| format!("({l})·{c}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<const K: usize> ResolutionElement<K> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    /// The basis element `e_S`.
    pub fn basis(cell: Cell) -> Self {
        Self::term(cell, LaurentElement::one())
    }

    pub fn term(cell: Cell, coeff: LaurentElement<K>) -> Self {
        let mut out = Self::zero();
        out.add_term(cell, &coeff);
        out
    }

    /// `c · x^exponent · e_S`.
    pub fn monomial(exponent: [i64; K], cell: Cell, c: impl Into<BigInt>) -> Self {
        Self::term(cell, LaurentElement::monomial(exponent, c))
    }

    pub fn add_term(&mut self, cell: Cell, coeff: &LaurentElement<K>) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(cell).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&cell);
        }
    }

    pub(crate) fn add_monomial(&mut self, exponent: [i64; K], cell: Cell, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(cell).or_default();
        slot.add_term(exponent, c);
        if slot.is_zero() {
            self.terms.remove(&cell);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Cell, &LaurentElement<K>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, cell: Cell) -> LaurentElement<K> {
        self.terms.get(&cell).cloned().unwrap_or_default()
    }

    /// Common degree of all terms; `None` for zero, error if mixed.
    pub fn degree(&self) -> Result<Option<usize>, ResolutionError> {
        let mut degrees = self.terms.keys().map(|c| c.degree());
        let Some(first) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(ResolutionError::NotHomogeneous)
        }
    }

    /// Left multiplication by a ring element.
    pub fn scale(&self, by: &LaurentElement<K>) -> Self {
        let mut out = Self::zero();
        for (cell, c) in &self.terms {
            out.add_term(*cell, &(by * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (cell, c) in &other.terms {
            out.add_term(*cell, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (cell, c) in &other.terms {
            out.add_term(*cell, &-c);
        }
        out
    }

    /// Augmentation of the `e_∅` coefficient.
    pub fn augment(&self) -> BigInt {
        self.terms.get(&Cell::EMPTY).map(|c| c.augment()).unwrap_or_default()
    }

    /// Expansion into `(exponent, cell, coefficient)` monomials.
    pub fn monomials(&self) -> impl Iterator<Item = ([i64; K], Cell, &BigInt)> {
        self.terms.iter().flat_map(|(cell, l)| l.terms().map(move |(e, c)| (*e, *cell, c)))
    }
}

/// `∂` extended `Z[Z^K]`-linearly; requires a homogeneous element of degree ≥ 1.
pub fn boundary<const K: usize>(e: &ResolutionElement<K>) -> Result<ResolutionElement<K>, ResolutionError> {
    match e.degree()? {
        None => return Ok(ResolutionElement::zero()),
        Some(0) => return Err(ResolutionError::DegreeZero),
        Some(_) => {}
    }
    let mut out = ResolutionElement::zero();
    for (cell, coeff) in e.terms() {
        for (c, sign, face) in cell.faces() {
            // sign · (x_c - 1) · coeff
            let mut unit = [0i64; K];
            unit[c] = 1;
            let shifted = coeff.shift(&unit);
            if sign > 0 {
                out.add_term(face, &shifted);
                out.add_term(face, &-coeff);
            } else {
                out.add_term(face, &-&shifted);
                out.add_term(face, coeff);
            }
        }
    }
    Ok(out)
}

/// Contracting homotopy, extended additively over the monomial expansion.
pub fn homotopy<const K: usize>(e: &ResolutionElement<K>) -> ResolutionElement<K> {
    let mut out = ResolutionElement::zero();
    for (m, cell, c) in e.monomials() {
        homotopy_monomial(&m, cell, |exp, target, sign| {
            out.add_monomial(exp, target, if sign > 0 { c.clone() } else { -c });
        });
    }
    out
}

/// Checks `∂h + h∂ = id` (degree ≥ 1) or `∂h = id - ε·e_∅` (degree 0) on `e`.
pub fn homotopy_identity_check<const K: usize>(e: &ResolutionElement<K>) -> bool {
    let Ok(degree) = e.degree() else {
        return false;
    };
    let h = homotopy(e);
    let Ok(dh) = boundary(&h) else {
        return false;
    };
    match degree {
        None => dh.is_zero(),
        Some(0) => {
            let expected = e.sub(&ResolutionElement::monomial([0; K], Cell::EMPTY, e.augment()));
            dh == expected
        }
        Some(_) => {
            let Ok(d) = boundary(e) else {
                return false;
            };
            dh.add(&homotopy(&d)) == *e
        }
    }
}

/// The Koszul resolution of `Z` over `Z[Z^K]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct KoszulResolution<const K: usize>;

impl<const K: usize> KoszulResolution<K> {
    pub fn new() -> Self {
        assert!(K <= MAX_ARITY, "arity {K} exceeds {MAX_ARITY}");
        Self
    }

    /// `C(K, r)` for `r = 0..=K`.
    pub fn ranks(&self) -> Vec<usize> {
        (0..=K).map(|r| Cell::all_of_degree(K, r).len()).collect()
    }

    pub fn cells(&self, degree: usize) -> Vec<Cell> {
        Cell::all_of_degree(K, degree)
    }

    /// Matrix of `∂_r : C_r → C_{r-1}` with column `j` holding `∂` of the `j`-th cell.
    pub fn boundary_matrix(&self, r: usize) -> Vec<Vec<LaurentElement<K>>> {
        assert!((1..=K).contains(&r), "boundary degree {r} outside 1..={K}");
        let rows = self.cells(r - 1);
        let cols = self.cells(r);
        let mut out = vec![vec![LaurentElement::zero(); cols.len()]; rows.len()];
        for (j, cell) in cols.iter().enumerate() {
            let d = boundary(&ResolutionElement::basis(*cell)).expect("degree ≥ 1");
            for (i, row) in rows.iter().enumerate() {
                out[i][j] = d.coefficient(*row);
            }
        }
        out
    }

    /// `Z ⊗ ` the resolution: the cellular complex of the `K`-torus.
    pub fn augmented_complex(&self) -> IntChainComplex {
        let differentials = (1..=K)
            .map(|r| {
                let m = self.boundary_matrix(r);
                let rows = m.len();
                let cols = m.first().map_or(self.cells(r).len(), Vec::len);
                let entries = m.into_iter().flatten().map(|l| l.augment()).collect();
                IntMatrix::new(rows, cols, entries).expect("shape")
            })
            .collect();
        IntChainComplex::new(self.ranks(), differentials).expect("Koszul complex is a complex")
    }
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
