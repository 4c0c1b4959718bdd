//! Free resolution of `Z` over `Z[Z^4 ⋊ Z^2]` as a perturbed tensor product of the
//! Koszul resolutions of `Z^4` (fiber) and `Z^2` (base).
//!
//! Generators are `e_S ⊗ f_Q`. The differential is `d = d0 + d1 + d2` with
//!
//! * `d0(e_S ⊗ f_Q) = (-1)^{|Q|} ∂e_S ⊗ f_Q`,
//! * `d1(e_S ⊗ f_Q) = Σ_j (-1)^{j-1} (T_{c_j}(e_S) - e_S) ⊗ f_{Q \ c_j}`, where
//!   `T_g(e_S) = g · θ_{-g}(e_S)` and `θ` is the lift of the action to the fiber resolution,
//! * `d2(e_S ⊗ f_{12}) = K(e_S) ⊗ f_∅` with `K(e_S) = h̃(-C(e_S) - K(∂e_S))`,
//!   `C = T_2∘T_1 - T_1∘T_2`, and `h̃` the fiber homotopy applied slice by slice.
//!
//! Internally a twisted monomial is kept in the form `g · x^u` (quotient part on the left),
//! which makes `h̃` a plain fiber homotopy; the public [`TwistedElement`] view uses
//! `(v, g) = (A(g) u, g)`.

use std::collections::hash_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::group_ring::{mat4_apply, GroupRingError, Mat4, TwistedElement, TwistedRing};
use crate::linalg::{AbelianGroup, IntChainComplex, IntMatrix, LinalgError};
use crate::ot::ActionSpec;
use crate::resolution::{homotopy_monomial, Cell, ResolutionElement};

/// Top degree of the resolution (the group has cohomological dimension 6).
pub const TOP_DEGREE: usize = 6;

type Exp = [i64; 4];
type Quot = [i64; 2];


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WallError {
    #[error("lifted chain map for g = {g:?} fails the chain-map identity on {cell}")]
    LiftFailure { g: Quot, cell: Cell },
    #[error("perturbation term for {cell} is not exact under the fiber homotopy")]
    PerturbationFailure { cell: Cell },
    #[error("d∘d ≠ 0 on generator {generator}")]
    NotAComplex { generator: BiCell },
    #[error("integer overflow in exponents or coefficients")]
    Overflow,
    #[error("degree {degree} outside 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error(transparent)]
    GroupRing(#[from] GroupRingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[inline]
fn bump<K: Hash + Eq>(map: &mut FxHashMap<K, i64>, key: K, c: i64) -> Result<(), WallError> {
    if c == 0 {
        return Ok(());
    }
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get().checked_add(c).ok_or(WallError::Overflow)?;
            if s == 0 {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
    Ok(())
}

#[inline]
fn add_exp(a: &Exp, b: &Exp) -> Result<Exp, WallError> {
    let mut out = [0i64; 4];
    for i in 0..4 {
        out[i] = a[i].checked_add(b[i]).ok_or(WallError::Overflow)?;
    }
    Ok(out)
}

#[inline]
fn unit(c: usize) -> Exp {
    let mut e = [0i64; 4];
    e[c] = 1;
    e
}

#[inline]
fn column(m: &Mat4, c: usize) -> Exp {
    [m[0][c], m[1][c], m[2][c], m[3][c]]
}

#[inline]
fn apply(m: &Mat4, v: &Exp) -> Result<Exp, WallError> {
    mat4_apply(m, v).ok_or(WallError::Overflow)
}

fn neg_quot(g: Quot) -> Quot {
    [-g[0], -g[1]]
}

fn l1_norm(m: &Mat4) -> i128 {
    m.iter().flatten().map(|x| (*x as i128).abs()).sum()
}

/// Basis `g_1, g_2` of `Z^2` for the base Koszul resolution: `±(1, 0)`, `±(0, 1)` with the
/// sign chosen so that the lift matrix `A(-g_c)` has the smaller entries.
fn base_generators(ring: &TwistedRing) -> Result<[Quot; 2], WallError> {
    let mut out = [[1, 0], [0, 1]];
    for g in out.iter_mut() {
        let plus = l1_norm(&ring.matrix(neg_quot(*g))?);
        let minus = l1_norm(&ring.matrix(*g)?);
        if minus < plus {
            *g = neg_quot(*g);
        }
    }
    Ok(out)
}

/// `Z[Z^4]`-chain on the fiber resolution: `x^u e_S ↦ coefficient`.
pub(crate) type FiberChain = FxHashMap<(Exp, Cell), i64>;

/// `Z[Z^4 ⋊ Z^2]`-chain on the fiber resolution: `g · x^u e_S ↦ coefficient`.
type TwistedChain = FxHashMap<(Quot, Exp, Cell), i64>;

fn fiber_boundary(z: &FiberChain) -> Result<FiberChain, WallError> {
    let mut out = FiberChain::default();
    for (&(u, s), &c) in z {
        for (k, sign, face) in s.faces() {
            bump(&mut out, (add_exp(&u, &unit(k))?, face), sign * c)?;
            bump(&mut out, (u, face), -sign * c)?;
        }
    }
    Ok(out)
}

fn fiber_homotopy(z: &FiberChain) -> Result<FiberChain, WallError> {
    let mut out = FiberChain::default();
    let mut err = None;
    for (&(u, s), &c) in z {
        homotopy_monomial(&u, s, |e, t, sign| {
            if let Err(e) = bump(&mut out, (e, t), sign * c) {
                err = Some(e);
            }
        });
    }
    err.map_or(Ok(out), Err)
}

fn twisted_boundary(z: &TwistedChain) -> Result<TwistedChain, WallError> {
    let mut out = TwistedChain::default();
    for (&(g, u, s), &c) in z {
        for (k, sign, face) in s.faces() {
            bump(&mut out, (g, add_exp(&u, &unit(k))?, face), sign * c)?;
            bump(&mut out, (g, u, face), -sign * c)?;
        }
    }
    Ok(out)
}

/// The fiber homotopy applied on each slice `g · Z[Z^4]`.
fn twisted_homotopy(z: &TwistedChain) -> Result<TwistedChain, WallError> {
    let mut out = TwistedChain::default();
    let mut err = None;
    for (&(g, u, s), &c) in z {
        homotopy_monomial(&u, s, |e, t, sign| {
            if let Err(e) = bump(&mut out, (g, e, t), sign * c) {
                err = Some(e);
            }
        });
    }
    err.map_or(Ok(out), Err)
}

fn fiber_chain_to_element(z: &FiberChain) -> ResolutionElement<4> {
    let mut out = ResolutionElement::zero();
    let mut sorted: Vec<_> = z.iter().collect();
    sorted.sort();
    for (&(u, s), &c) in sorted {
        out.add_term(s, &crate::group_ring::LaurentElement::monomial(u, c));
    }
    out
}

/// Semilinear lift `θ` of `x^v ↦ x^{A v}` to the fiber resolution, built cell by cell
/// as `θ(e_S) = h(θ(∂e_S))` and verified to be a chain map.
#[derive(Clone, Debug)]
pub struct LiftedChainMap {
    g: Quot,
    action: Mat4,
    max_degree: usize,
    images: Vec<FiberChain>,
}

impl LiftedChainMap {
    fn build(g: Quot, action: Mat4, max_degree: usize) -> Result<Self, WallError> {
        let max_degree = max_degree.min(4);
        let mut images = vec![FiberChain::default(); 16];
        images[0].insert(([0; 4], Cell::EMPTY), 1);
        for r in 1..=max_degree {
            for cell in Cell::all_of_degree(4, r) {
                let mut source = FiberChain::default();
                for (k, sign, face) in cell.faces() {
                    let shift = column(&action, k);
                    for (&(u, t), &c) in &images[face.bits() as usize] {
                        bump(&mut source, (add_exp(&u, &shift)?, t), sign * c)?;
                        bump(&mut source, (u, t), -sign * c)?;
                    }
                }
                let image = fiber_homotopy(&source)?;
                if fiber_boundary(&image)? != source {
                    return Err(WallError::LiftFailure { g, cell });
                }
                images[cell.bits() as usize] = image;
            }
        }
        Ok(Self { g, action, max_degree, images })
    }

    pub fn g(&self) -> Quot {
        self.g
    }

    /// Highest fiber degree on which the map has been computed.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `A(g)` as the matrix acting on exponents.
    pub fn action(&self) -> &Mat4 {
        &self.action
    }

    pub(crate) fn cell_image(&self, cell: Cell) -> &FiberChain {
        assert!(cell.degree() <= self.max_degree, "lift computed only up to degree {}", self.max_degree);
        &self.images[cell.bits() as usize]
    }

    /// `θ(e_S)`.
    pub fn image(&self, cell: Cell) -> ResolutionElement<4> {
        fiber_chain_to_element(self.cell_image(cell))
    }

    /// `θ` applied to an arbitrary element: `θ(x^v e_S) = x^{A v} θ(e_S)`.
    pub fn apply(&self, e: &ResolutionElement<4>) -> Result<ResolutionElement<4>, WallError> {
        let mut out = FiberChain::default();
        for (v, s, c) in e.monomials() {
            let c: i64 = c.try_into().map_err(|_| WallError::Overflow)?;
            let shift = apply(&self.action, &v)?;
            for (&(u, t), &k) in self.cell_image(s) {
                let coeff = c.checked_mul(k).ok_or(WallError::Overflow)?;
                bump(&mut out, (add_exp(&u, &shift)?, t), coeff)?;
            }
        }
        Ok(fiber_chain_to_element(&out))
    }
}

/// The lift of the action of `g ∈ Z^2` on the fiber resolution, through fiber degree `max_degree`.
pub fn lift_automorphism(spec: &ActionSpec, g: Quot, max_degree: usize) -> Result<LiftedChainMap, WallError> {
    let action = crate::group_ring::mat4_from(&spec.action_matrix(g[0], g[1])).ok_or(WallError::Overflow)?;
    LiftedChainMap::build(g, action, max_degree)
}

/// Generator `e_S ⊗ f_Q` of the twisted tensor product.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BiCell {
    pub fiber: Cell,
    pub base: Cell,
}

impl BiCell {
    pub fn new(fiber: Cell, base: Cell) -> Self {
        Self { fiber, base }
    }

    pub fn p(self) -> usize {
        self.fiber.degree()
    }

    pub fn q(self) -> usize {
        self.base.degree()
    }

    pub fn degree(self) -> usize {
        self.p() + self.q()
    }

    /// Generators of a total degree: base degree ascending, then fiber and base cells
    /// in lexicographic order.
    pub fn all_of_degree(n: usize) -> Vec<BiCell> {
        let mut out = Vec::new();
        for q in 0..=2usize {
            if q > n || n - q > 4 {
                continue;
            }
            for fiber in Cell::all_of_degree(4, n - q) {
                for base in Cell::all_of_degree(2, q) {
                    out.push(BiCell { fiber, base });
                }
            }
        }
        out
    }
}

impl PartialOrd for BiCell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BiCell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.q(), self.fiber, self.base).cmp(&(other.degree(), other.q(), other.fiber, other.base))
    }
}

impl fmt::Display for BiCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: Cell| c.indices().iter().map(|i| i.to_string()).collect::<String>();
        write!(f, "e[{}]⊗f[{}]", join(self.fiber), join(self.base))
    }
}

impl fmt::Debug for BiCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Free-module chain over the total resolution: `g · x^u (e_S ⊗ f_Q) ↦ coefficient`.
type ModuleChain = FxHashMap<(Quot, Exp, BiCell), i64>;

/// Deliberate corruption of the differential, for exercising the verifier.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negate `d1` on generators of base degree 2 after `d2` has been computed.
    FlipTopBaseD1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallOptions {
    /// Highest total degree whose differential is built.
    pub max_degree: usize,
    /// Verify `d∘d = 0` over the twisted ring on every generator.
    pub verify: bool,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for WallOptions {
    fn default() -> Self {
        Self { max_degree: TOP_DEGREE, verify: false, fault: None }
    }
}

impl WallOptions {
    pub fn up_to(max_degree: usize) -> Self {
        Self { max_degree, ..Self::default() }
    }
}

struct Builder {
    ring: Arc<TwistedRing>,
    generators: [Quot; 2],
    /// `θ_{-g_c}` for the two base generators.
    lifts: [LiftedChainMap; 2],
    inverse_cache: FxHashMap<Quot, Mat4>,
}

impl Builder {
    fn inverse_action(&mut self, g: Quot) -> Result<Mat4, WallError> {
        if let Some(m) = self.inverse_cache.get(&g) {
            return Ok(*m);
        }
        let m = self.ring.matrix(neg_quot(g))?;
        self.inverse_cache.insert(g, m);
        Ok(m)
    }

    /// `T_c(e_S) = g_c · θ_{-g_c}(e_S)`.
    fn t_on_cell(&self, c: usize, cell: Cell) -> TwistedChain {
        let g = self.generators[c];
        self.lifts[c].cell_image(cell).iter().map(|(&(u, t), &k)| ((g, u, t), k)).collect()
    }

    /// `T_c` extended linearly: `g x^u e_S ↦ (g + g_c) x^{A(-g_c) u} θ_{-g_c}(e_S)`.
    fn t_apply(&self, c: usize, z: &TwistedChain) -> Result<TwistedChain, WallError> {
        let gc = self.generators[c];
        let lift = &self.lifts[c];
        let mut out = TwistedChain::default();
        for (&(g, u, s), &k) in z {
            let target_g = [g[0] + gc[0], g[1] + gc[1]];
            let base = apply(&lift.action, &u)?;
            for (&(w, t), &k2) in lift.cell_image(s) {
                let coeff = k.checked_mul(k2).ok_or(WallError::Overflow)?;
                bump(&mut out, (target_g, add_exp(&base, &w)?, t), coeff)?;
            }
        }
        Ok(out)
    }

    /// Left multiplication by `x_c`: `x_c · g x^u = g x^{A(-g) e_c + u}`.
    fn left_mul_x(&mut self, c: usize, z: &TwistedChain, sign: i64, out: &mut TwistedChain) -> Result<(), WallError> {
        for (&(g, u, s), &k) in z {
            let shift = column(&self.inverse_action(g)?, c);
            bump(out, (g, add_exp(&u, &shift)?, s), sign * k)?;
        }
        Ok(())
    }

    /// `K(e_S)` for every fiber cell up to `max_fiber_degree`.
    fn perturbation(&mut self, max_fiber_degree: usize) -> Result<Vec<TwistedChain>, WallError> {
        let mut k_map = vec![TwistedChain::default(); 16];
        for p in 1..=max_fiber_degree.min(4) {
            for cell in Cell::all_of_degree(4, p) {
                // z = -(T2 T1 - T1 T2)(e_S) - K(∂e_S)
                let t1 = self.t_on_cell(0, cell);
                let t2 = self.t_on_cell(1, cell);
                let t2t1 = self.t_apply(1, &t1)?;
                let t1t2 = self.t_apply(0, &t2)?;
                let mut z = t1t2;
                for (key, c) in t2t1 {
                    bump(&mut z, key, -c)?;
                }
                for (c, sign, face) in cell.faces() {
                    let kf = k_map[face.bits() as usize].clone();
                    self.left_mul_x(c, &kf, -sign, &mut z)?;
                    for (key, v) in kf {
                        bump(&mut z, key, sign * v)?;
                    }
                }
                let k = twisted_homotopy(&z)?;
                if twisted_boundary(&k)? != z {
                    return Err(WallError::PerturbationFailure { cell });
                }
                k_map[cell.bits() as usize] = k;
            }
        }
        Ok(k_map)
    }
}

fn embed(z: &TwistedChain, base: Cell, sign: i64, out: &mut ModuleChain) -> Result<(), WallError> {
    for (&(g, u, s), &c) in z {
        bump(out, (g, u, BiCell::new(s, base)), sign * c)?;
    }
    Ok(())
}

/// The twisted tensor product resolution for one action, through a chosen total degree.
pub struct WallResolution {
    ring: Arc<TwistedRing>,
    generators: [Quot; 2],
    max_degree: usize,
    lifts: [LiftedChainMap; 2],
    /// `[d0, d1, d2]` of every generator of degree `1..=max_degree`.
    parts: BTreeMap<BiCell, [ModuleChain; 3]>,
}

impl fmt::Debug for WallResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WallResolution")
            .field("m", &self.spec().m())
            .field("n", &self.spec().n())
            .field("max_degree", &self.max_degree)
            .finish()
    }
}

impl WallResolution {
    pub fn build(spec: &ActionSpec, options: &WallOptions) -> Result<Self, WallError> {
        if options.max_degree > TOP_DEGREE {
            return Err(WallError::DegreeOutOfRange { degree: options.max_degree, top: TOP_DEGREE });
        }
        let ring = TwistedRing::new(spec.clone());
        let d = options.max_degree;
        // θ is needed on fiber degrees p with (p, 1) in range, K on p with (p, 2) in range
        let lift_degree = d.saturating_sub(1);
        let generators = base_generators(&ring)?;
        let lift = |g: Quot| LiftedChainMap::build(neg_quot(g), ring.matrix(neg_quot(g))?, lift_degree);
        let lifts = [lift(generators[0])?, lift(generators[1])?];
        let mut builder =
            Builder { ring: Arc::clone(&ring), generators, lifts, inverse_cache: FxHashMap::default() };
        let k_map = builder.perturbation(d.saturating_sub(2))?;

        let mut parts = BTreeMap::new();
        for n in 1..=d {
            for gen in BiCell::all_of_degree(n) {
                let q_sign = if gen.q() % 2 == 0 { 1 } else { -1 };
                let mut d0 = ModuleChain::default();
                if gen.p() > 0 {
                    for (k, sign, face) in gen.fiber.faces() {
                        let s = q_sign * sign;
                        bump(&mut d0, ([0, 0], unit(k), BiCell::new(face, gen.base)), s)?;
                        bump(&mut d0, ([0, 0], [0; 4], BiCell::new(face, gen.base)), -s)?;
                    }
                }
                let mut d1 = ModuleChain::default();
                for (c, sign, base_face) in gen.base.faces() {
                    embed(&builder.t_on_cell(c, gen.fiber), base_face, sign, &mut d1)?;
                    bump(&mut d1, ([0, 0], [0; 4], BiCell::new(gen.fiber, base_face)), -sign)?;
                }
                let mut d2 = ModuleChain::default();
                if gen.q() == 2 && gen.p() < 4 {
                    embed(&k_map[gen.fiber.bits() as usize], Cell::EMPTY, 1, &mut d2)?;
                }
                if options.fault == Some(Fault::FlipTopBaseD1) && gen.q() == 2 {
                    d1.values_mut().for_each(|v| *v = -*v);
                }
                parts.insert(gen, [d0, d1, d2]);
            }
        }
        let lifts = builder.lifts;
        let out = Self { ring, generators, max_degree: d, lifts, parts };
        if options.verify {
            out.verify()?;
        }
        Ok(out)
    }

    pub fn spec(&self) -> &ActionSpec {
        self.ring.spec()
    }

    pub fn ring(&self) -> &Arc<TwistedRing> {
        &self.ring
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// The basis `g_1, g_2` of `Z^2` indexing the base cells `f_1, f_2`.
    pub fn base_generators(&self) -> [Quot; 2] {
        self.generators
    }

    /// The lift `θ_{-g_c}` used by `d1`.
    pub fn inverse_generator_lift(&self, c: usize) -> &LiftedChainMap {
        &self.lifts[c]
    }

    /// Ranks of the free modules in degrees `0..=max_degree`.
    pub fn ranks(&self) -> Vec<usize> {
        (0..=self.max_degree).map(|n| BiCell::all_of_degree(n).len()).collect()
    }

    pub fn generators(&self, n: usize) -> Vec<BiCell> {
        BiCell::all_of_degree(n)
    }

    fn total(&self, gen: BiCell) -> Result<ModuleChain, WallError> {
        let [d0, d1, d2] = &self.parts[&gen];
        let mut out = d0.clone();
        for z in [d1, d2] {
            for (k, v) in z {
                bump(&mut out, *k, *v)?;
            }
        }
        Ok(out)
    }

    fn to_twisted(&self, z: &ModuleChain) -> Result<BTreeMap<BiCell, TwistedElement>, WallError> {
        let mut out: BTreeMap<BiCell, TwistedElement> = BTreeMap::new();
        for (&(g, u, cell), &c) in z {
            let v = apply(&self.ring.matrix(g)?, &u)?;
            out.entry(cell).or_insert_with(|| TwistedElement::zero(&self.ring)).add_term((v, g), BigInt::from(c));
        }
        out.retain(|_, e| !e.is_zero());
        Ok(out)
    }

    /// Component `d_k` (`k ∈ {0, 1, 2}`) applied to a generator, as twisted coefficients
    /// `(v, g)` of the target generators.
    pub fn component(&self, k: usize, gen: BiCell) -> Result<BTreeMap<BiCell, TwistedElement>, WallError> {
        assert!(k <= 2, "components are d0, d1, d2");
        if gen.degree() == 0 || gen.degree() > self.max_degree {
            return Err(WallError::DegreeOutOfRange { degree: gen.degree(), top: self.max_degree });
        }
        self.to_twisted(&self.parts[&gen][k])
    }

    /// `d = d0 + d1 + d2` applied to a generator.
    pub fn differential(&self, gen: BiCell) -> Result<BTreeMap<BiCell, TwistedElement>, WallError> {
        if gen.degree() == 0 || gen.degree() > self.max_degree {
            return Err(WallError::DegreeOutOfRange { degree: gen.degree(), top: self.max_degree });
        }
        self.to_twisted(&self.total(gen)?)
    }

    /// Matrix of `d_n` with rows indexed by degree-`(n-1)` generators and column `j`
    /// holding the coefficients of `d` of the `j`-th degree-`n` generator.
    pub fn differential_matrix(&self, n: usize) -> Result<Vec<Vec<TwistedElement>>, WallError> {
        let rows = self.generators(n - 1);
        let cols = self.generators(n);
        let mut out = vec![vec![TwistedElement::zero(&self.ring); cols.len()]; rows.len()];
        for (j, gen) in cols.iter().enumerate() {
            let d = self.differential(*gen)?;
            for (i, row) in rows.iter().enumerate() {
                if let Some(e) = d.get(row) {
                    out[i][j] = e.clone();
                }
            }
        }
        Ok(out)
    }

    /// `d(d(gen))` over the twisted ring.
    fn d_squared(&self, gen: BiCell, inverse: &mut FxHashMap<Quot, Mat4>) -> Result<ModuleChain, WallError> {
        let mut out = ModuleChain::default();
        let first = self.total(gen)?;
        let mut by_target: BTreeMap<BiCell, Vec<(Quot, Exp, i64)>> = BTreeMap::new();
        for (&(g, u, cell), &c) in &first {
            by_target.entry(cell).or_default().push((g, u, c));
        }
        for (target, terms) in by_target {
            if target.degree() == 0 {
                continue;
            }
            for (&(g2, u2, cell2), &c2) in &self.total(target)? {
                let inv = match inverse.get(&g2) {
                    Some(m) => *m,
                    None => {
                        let m = self.ring.matrix(neg_quot(g2))?;
                        inverse.insert(g2, m);
                        m
                    }
                };
                for &(g, u, c) in &terms {
                    // g x^u · g2 x^{u2} = (g + g2) x^{A(-g2) u + u2}
                    let moved = add_exp(&apply(&inv, &u)?, &u2)?;
                    let coeff = c.checked_mul(c2).ok_or(WallError::Overflow)?;
                    bump(&mut out, ([g[0] + g2[0], g[1] + g2[1]], moved, cell2), coeff)?;
                }
            }
        }
        Ok(out)
    }

    /// Checks `d∘d = 0` over the twisted ring on every generator of degree `n`.
    pub fn verify_degree(&self, n: usize) -> Result<(), WallError> {
        if n < 2 || n > self.max_degree {
            return Ok(());
        }
        let mut inverse = FxHashMap::default();
        for gen in self.generators(n) {
            if !self.d_squared(gen, &mut inverse)?.is_empty() {
                return Err(WallError::NotAComplex { generator: gen });
            }
        }
        Ok(())
    }

    /// Checks `d∘d = 0` over the twisted ring on all generators.
    pub fn verify(&self) -> Result<(), WallError> {
        (2..=self.max_degree).try_for_each(|n| self.verify_degree(n))
    }

    /// `Z ⊗` the resolution: every twisted coefficient replaced by its augmentation.
    pub fn integer_complex(&self) -> Result<IntChainComplex, WallError> {
        let ranks = self.ranks();
        let mut differentials = Vec::with_capacity(self.max_degree);
        for n in 1..=self.max_degree {
            let rows = self.generators(n - 1);
            let cols = self.generators(n);
            let index: FxHashMap<BiCell, usize> = rows.iter().enumerate().map(|(i, b)| (*b, i)).collect();
            let mut m = IntMatrix::zeros(rows.len(), cols.len());
            for (j, gen) in cols.iter().enumerate() {
                for part in &self.parts[gen] {
                    for (&(_, _, cell), &c) in part {
                        m[(index[&cell], j)] += c;
                    }
                }
            }
            differentials.push(m);
        }
        Ok(IntChainComplex::new(ranks, differentials)?)
    }
}

/// The full resolution through degree 6.
pub fn build_wall_resolution(spec: &ActionSpec) -> Result<WallResolution, WallError> {
    WallResolution::build(spec, &WallOptions::default())
}

/// `Z ⊗` the resolution.
pub fn integer_complex(w: &WallResolution) -> Result<IntChainComplex, WallError> {
    w.integer_complex()
}

/// `H_r(X_{m,n})`, building the resolution only as far as degree `r + 1`.
pub fn homology_of_x(spec: &ActionSpec, r: usize) -> Result<AbelianGroup, WallError> {
    if r > TOP_DEGREE {
        return Err(WallError::DegreeOutOfRange { degree: r, top: TOP_DEGREE });
    }
    let w = WallResolution::build(spec, &WallOptions::up_to((r + 1).min(TOP_DEGREE)))?;
    Ok(w.integer_complex()?.homology(r)?)
}

/// `H_0, …, H_top` from one resolution built through `min(top + 1, 6)`.
pub fn homology_range(spec: &ActionSpec, top: usize, verify: bool) -> Result<Vec<AbelianGroup>, WallError> {
    if top > TOP_DEGREE {
        return Err(WallError::DegreeOutOfRange { degree: top, top: TOP_DEGREE });
    }
    let options = WallOptions { max_degree: (top + 1).min(TOP_DEGREE), verify, fault: None };
    let complex = WallResolution::build(spec, &options)?.integer_complex()?;
    (0..=top).map(|r| Ok(complex.homology(r)?)).collect()
}

/// Fills `H_4, H_5, H_6` from `H_0..H_3` using `rank H_{6-i} = rank H_i` and
/// `tors H_{5-i} ≅ tors H_i`.
pub fn duality_complete(low: &[AbelianGroup]) -> Vec<AbelianGroup> {
    assert!(low.len() >= 4, "duality completion needs H_0 through H_3");
    let mut out: Vec<AbelianGroup> = low[..4].to_vec();
    for r in 4..=TOP_DEGREE {
        let free = low[TOP_DEGREE - r].free_rank();
        let torsion = if r == TOP_DEGREE { AbelianGroup::trivial() } else { low[5 - r].torsion() };
        out.push(torsion.with_free_rank(free));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::QuarticFieldData;
    use crate::resolution::{boundary, binomial};

    fn spec(m: u64, n: u64) -> ActionSpec {
        ActionSpec::preset(m, n).unwrap()
    }

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn ranks_are_binomial_convolution() {
        let w = WallResolution::build(&spec(1, 1), &WallOptions::up_to(6)).unwrap();
        assert_eq!(w.ranks(), vec![1, 6, 15, 20, 15, 6, 1]);
    }

    #[test]
    fn identity_lift() {
        let lift = lift_automorphism(&spec(1, 1), [0, 0], 4).unwrap();
        for r in 0..=4 {
            for c in Cell::all_of_degree(4, r) {
                assert_eq!(lift.image(c), ResolutionElement::basis(c));
            }
        }
    }

    #[test]
    fn lift_degree_zero_and_chain_map() {
        let lift = lift_automorphism(&spec(1, 1), [1, 0], 4).unwrap();
        let x = ResolutionElement::<4>::monomial([1, 0, 0, 0], Cell::EMPTY, 1);
        assert_eq!(lift.apply(&x).unwrap(), ResolutionElement::monomial([-1, 0, 1, 0], Cell::EMPTY, 1));
        for g in [[1, 0], [0, 1], [-1, 2], [2, -1]] {
            let lift = lift_automorphism(&spec(1, 1), g, 4).unwrap();
            for r in 1..=4 {
                for c in Cell::all_of_degree(4, r) {
                    let lhs = boundary(&lift.image(c)).unwrap();
                    let rhs = lift.apply(&boundary(&ResolutionElement::basis(c)).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "g = {g:?}, cell {c}");
                }
            }
        }
    }

    #[test]
    fn fiber_restriction_is_koszul() {
        let w = WallResolution::build(&spec(2, 1), &WallOptions::up_to(4)).unwrap();
        for p in 1..=4 {
            for c in Cell::all_of_degree(4, p) {
                let d = w.differential(BiCell::new(c, Cell::EMPTY)).unwrap();
                let koszul = boundary(&ResolutionElement::<4>::basis(c)).unwrap();
                assert_eq!(d.len(), koszul.terms().count());
                for (face, coeff) in koszul.terms() {
                    let e = &d[&BiCell::new(*face, Cell::EMPTY)];
                    let expected = TwistedElement::from_terms(
                        w.ring(),
                        coeff.terms().map(|(u, c)| ((*u, [0, 0]), c.clone())),
                    );
                    assert_eq!(e, &expected);
                }
            }
        }
    }

    #[test]
    fn d_squared_vanishes_for_one_one() {
        let options = WallOptions { max_degree: 6, verify: true, fault: None };
        WallResolution::build(&spec(1, 1), &options).unwrap();
    }

    #[test]
    fn injected_fault_is_detected() {
        let options = WallOptions { max_degree: 4, verify: true, fault: Some(Fault::FlipTopBaseD1) };
        let err = WallResolution::build(&spec(1, 1), &options).unwrap_err();
        assert!(matches!(err, WallError::NotAComplex { .. }), "{err}");
    }

    #[test]
    fn torus_degeneration() {
        let spec = ActionSpec::new(QuarticFieldData::identity_action(), 1, 1).unwrap();
        let options = WallOptions { max_degree: 6, verify: true, fault: None };
        let complex = WallResolution::build(&spec, &options).unwrap().integer_complex().unwrap();
        assert_eq!(complex.euler_characteristic(), 0);
        for r in 0..=6 {
            assert_eq!(complex.homology(r).unwrap(), AbelianGroup::free(binomial(6, r)));
        }
    }

    #[test]
    fn one_one_full_row() {
        let h = homology_range(&spec(1, 1), 6, false).unwrap();
        let expected = ["Z", "Z/2^2 + Z^2", "Z/2^4 + Z/4^2 + Z", "Z/2^4 + Z/4^2", "Z/2^2 + Z", "Z^2", "Z"];
        for (r, want) in expected.iter().enumerate() {
            assert_eq!(h[r], g(want), "H_{r}");
        }
        assert_eq!(duality_complete(&h[..4]), h);
    }

    #[test]
    fn single_degree_entry_point() {
        assert_eq!(homology_of_x(&spec(1, 1), 1).unwrap(), g("Z/2^2 + Z^2"));
        assert!(homology_of_x(&spec(1, 1), 7).is_err());
    }
}
