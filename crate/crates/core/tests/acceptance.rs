//! Acceptance criteria 1–8, one report line per criterion.
//!
//! Three criteria contain published values that independent computation contradicts:
//! `H_2(X_{3,3})` in criterion 2, `H_1(X_{2,4})` in criterion 3, and the divisibility at
//! `n = p^2 − 1` for `p ≡ 5 (mod 8)` in criterion 6. Those lines print FAIL with the evidence; the test itself asserts the
//! independently derived values, so any other deviation still fails the run.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use othom_core::h1::{self, BetaFactorization};
use othom_core::linalg::{cokernel, AbelianGroup, IntChainComplex, IntMatrix};
use othom_core::ot::{efgh_from_matrix, seq_efgh, ActionSpec, QuarticFieldData};
use othom_core::resolution::{binomial, boundary, homotopy_identity_check, Cell, ResolutionElement};
use othom_core::verify::{dd_cases, random_element};
use othom_core::wall::{duality_complete, homology_range, WallOptions, WallResolution};

fn g(s: &str) -> AbelianGroup {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn spec(m: u64, n: u64) -> ActionSpec {
    ActionSpec::preset(m, n).unwrap()
}

/// Outcome of one criterion: the printed line plus whether the run should fail.
struct Outcome {
    passed: bool,
    /// Deviations that are documented and independently confirmed.
    known: Vec<String>,
    /// Anything else that went wrong.
    unexpected: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new(detail: impl Into<String>) -> Self {
        Outcome { passed: true, known: Vec::new(), unexpected: Vec::new(), detail: detail.into() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            self.unexpected.push(what());
        }
    }

    fn known_deviation(&mut self, what: String) {
        self.passed = false;
        self.known.push(what);
    }

    fn report(&self, k: usize) {
        let status = if self.passed { "PASS" } else { "FAIL" };
        println!("criterion {k}: {status} — {}", self.detail);
        for d in &self.known {
            println!("    published value not reproduced (independently confirmed): {d}");
        }
        for d in &self.unexpected {
            println!("    unexpected: {d}");
        }
    }
}

// ---------------------------------------------------------------- published tables

const R1_COMMON: &str = "(Z/2)^2 + Z^2";

fn full_row(m: u64, n: u64) -> [&'static str; 7] {
    match (m, n) {
        (2, 1) => [
            "Z",
            R1_COMMON,
            "(Z/2)^4 + (Z/4)^2 + (Z/3)^2 + Z",
            "(Z/2)^4 + (Z/4)^2 + (Z/3)^2",
            "(Z/2)^2 + Z",
            "Z^2",
            "Z",
        ],
        _ => ["Z", R1_COMMON, "(Z/2)^4 + (Z/4)^2 + Z", "(Z/2)^4 + (Z/4)^2", "(Z/2)^2 + Z", "Z^2", "Z"],
    }
}

fn partial_rows() -> Vec<((u64, u64), &'static str, &'static str)> {
    vec![
        ((2, 2), "(Z/2)^4 + Z^2", "(Z/2)^6 + (Z/4)^2 + (Z/3)^2 + Z/8 + Z/16 + Z"),
        ((3, 2), R1_COMMON, "(Z/2)^4 + (Z/4)^2 + Z"),
        ((1, 3), R1_COMMON, "(Z/2)^4 + (Z/4)^2 + Z"),
        ((2, 3), R1_COMMON, "(Z/2)^4 + (Z/4)^2 + (Z/9)^2 + (Z/43)^2 + Z"),
        ((3, 3), R1_COMMON, "(Z/2)^5 + Z/4 + Z/7 + Z"),
    ]
}

fn grid_cell(m: u64, n: u64) -> &'static str {
    match (m, n) {
        (2 | 4 | 10, 2) | (10, 4) => "(Z/2)^4 + Z^2",
        (4, 4) => "(Z/4)^2 + (Z/8)^2 + Z^2",
        (8, 2) => "(Z/2)^4 + (Z/3)^2 + Z^2",
        (8, 4) => "(Z/3)^4 + (Z/4)^2 + (Z/8)^2 + Z^2",
        (6 | 12, 1 | 5) => "(Z/2)^2 + Z/7 + Z^2",
        (6 | 12, 2) | (6, 4) => "(Z/2)^4 + Z/7 + Z^2",
        (6 | 12, 3) => "(Z/2)^2 + (Z/7)^2 + Z^2",
        (12, 4) => "(Z/4)^2 + (Z/8)^2 + Z/7 + Z^2",
        _ => R1_COMMON,
    }
}

/// β(m, n) as described by the published table: the clause with the largest listed
/// modulus dividing `n` wins (the listed moduli are closed under lcm).
fn table_beta(m: u64, n: u64) -> u64 {
    let clauses: &[(u64, u64)] = match m {
        3 => &[(24, 7)],
        5 => &[(210, 41)],
        7 => &[(119, 239)],
        9 => &[(24, 7), (1800, 1393)],
        11 => &[(88, 353), (264, 8119)],
        13 => &[(39, 79), (2600, 599), (7800, 47321)],
        15 => &[
            (24, 7),
            (15, 31),
            (120, 7 * 31),
            (465, 31 * 31),
            (210, 31 * 41),
            (3720, 7 * 31 * 31),
            (840, 7 * 31 * 41),
            (6510, 31 * 31 * 41),
            (26040, 7 * 31 * 31 * 41),
        ],
        17 => &[(1768, 103), (265336, 15607)],
        19 => &[(178017080, 9369319)],
        _ => &[],
    };
    clauses.iter().filter(|(q, _)| n.is_multiple_of(*q)).max_by_key(|(q, _)| *q).map_or(1, |&(_, b)| b)
}

// ---------------------------------------------------------------- independent oracles

fn action_pair(m: u64, n: u64) -> (IntMatrix, IntMatrix) {
    let s = spec(m, n);
    (s.action_matrix(1, 0), s.action_matrix(0, 1))
}

fn exterior_square(a: &IntMatrix) -> IntMatrix {
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let rows: Vec<Vec<BigInt>> = pairs
        .iter()
        .map(|&(i, j)| {
            pairs
                .iter()
                .map(|&(k, l)| &a[(i, k)] * &a[(j, l)] - &a[(i, l)] * &a[(j, k)])
                .collect()
        })
        .collect();
    IntMatrix::from_big_rows(rows).unwrap()
}

fn hstack(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.transpose().vstack(&b.transpose()).unwrap().transpose()
}

fn minus_identity(a: &IntMatrix) -> IntMatrix {
    a.checked_sub(&IntMatrix::identity(a.rows())).unwrap()
}

/// `|tors H_2|` from the Lyndon–Hochschild–Serre spectral sequence of the split extension
/// `Z^4 → G → Z^2`. With no invariant vectors, `E_{2,1} = 0` and
/// `|tors H_2| = |H_0(Z^2; Λ^2 Z^4)| · |H_1(Z^2; Z^4)|`; no perturbation data enters.
fn lhs_torsion_order_h2(m: u64, n: u64) -> BigInt {
    let (a, b) = action_pair(m, n);
    let (a1, b1) = (minus_identity(&a), minus_identity(&b));
    // Koszul complex of Z^2 with coefficients in Z^4: V ← V ⊕ V ← V
    let d1 = hstack(&a1, &b1);
    let neg_a1 = IntMatrix::zeros(4, 4).checked_sub(&a1).unwrap();
    let d2 = b1.vstack(&neg_a1).unwrap();
    let koszul = IntChainComplex::new(vec![4, 8, 4], vec![d1, d2]).unwrap();
    let h1_coeff = koszul.homology(1).unwrap();
    let h2_coeff = koszul.homology(2).unwrap();
    assert!(h2_coeff.is_trivial(), "invariant vectors at ({m},{n})");
    let (wa, wb) = (exterior_square(&a), exterior_square(&b));
    let h0_wedge = cokernel(&hstack(&minus_identity(&wa), &minus_identity(&wb)));
    assert_eq!(h0_wedge.free_rank() + h1_coeff.free_rank(), 0);
    h0_wedge.torsion_order() * h1_coeff.torsion_order()
}

fn beta_full_size(m: u64, n: u64) -> BigUint {
    let (a, b) = (othom_core::ot::seq_a(m), othom_core::ot::seq_b(m));
    let s = &a + &b;
    let [e, f, gg, h] = seq_efgh(n);
    let one = BigInt::one();
    let two = BigInt::from(2);
    [
        -a,
        -(&f * &s) - &h,
        (&one - &e) * &s - &gg,
        -(&h * &s * &two) - &f,
        -(&gg * &s * &two) + &one - &e,
    ]
    .iter()
    .fold(BigInt::zero(), |acc, x| acc.gcd(x))
    .to_biguint()
    .unwrap()
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let mut o = Outcome::new("full rows (1,1) (2,1) (3,1) (1,2): Wall H_0..H_3 + duality; direct H_4..H_6 for (1,1)");
    for (m, n) in [(1, 1), (2, 1), (3, 1), (1, 2)] {
        let low = homology_range(&spec(m, n), 3, true).unwrap();
        let row = duality_complete(&low);
        for (r, expected) in full_row(m, n).iter().enumerate() {
            o.check(row[r] == g(expected), || format!("H_{r}({m},{n}) = {}, table {expected}", row[r]));
        }
    }
    let direct = homology_range(&spec(1, 1), 6, true).unwrap();
    for (r, expected) in full_row(1, 1).iter().enumerate() {
        o.check(direct[r] == g(expected), || format!("direct H_{r}(1,1) = {}, table {expected}", direct[r]));
    }
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new("partial rows (2,2) (3,2) (1,3) (2,3) (3,3): H_1 and H_2");
    for ((m, n), r1, r2) in partial_rows() {
        let h = homology_range(&spec(m, n), 2, true).unwrap();
        o.check(h[1] == g(r1), || format!("H_1({m},{n}) = {}, table {r1}", h[1]));
        if h[2] == g(r2) {
            continue;
        }
        let oracle = lhs_torsion_order_h2(m, n);
        let ours = h[2].torsion_order();
        let published = g(r2).torsion_order();
        if (m, n) == (3, 3) && oracle == ours && oracle != published && h[2] == g("(Z/2)^4 + (Z/4)^2 + (Z/7)^2 + Z") {
            o.known_deviation(format!(
                "H_2({m},{n}) = {} (torsion order {ours}); table {r2} (order {published}); spectral-sequence order {oracle}",
                h[2]
            ));
        } else {
            o.check(false, || format!("H_2({m},{n}) = {}, table {r2}, spectral-sequence order {oracle}", h[2]));
        }
    }
    // the spectral-sequence bound reproduces every published H_2 order it is compared with
    for ((m, n), _, r2) in partial_rows().into_iter().filter(|r| r.0 != (3, 3)) {
        let oracle = lhs_torsion_order_h2(m, n);
        o.check(oracle == g(r2).torsion_order(), || format!("spectral-sequence order {oracle} at ({m},{n})"));
    }
    for (m, n) in [(1, 1), (2, 1)] {
        let oracle = lhs_torsion_order_h2(m, n);
        o.check(oracle == g(full_row(m, n)[2]).torsion_order(), || format!("spectral-sequence order {oracle} at ({m},{n})"));
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new("60-cell H_1 grid m ≤ 12, n ≤ 5 via abelianization");
    for m in 1..=12 {
        for n in 1..=5 {
            let got = h1::h1(m, n).unwrap();
            let expected = grid_cell(m, n);
            if got == g(expected) {
                continue;
            }
            if (m, n) == (2, 4) && grid_cell_surjects(m, n, 2) && got == g("(Z/2)^4 + Z^2") {
                let floor = h1::h1(m, 2).unwrap();
                o.known_deviation(format!(
                    "H_1({m},{n}) = {got}; table {expected}, but H_1({m},{n}) surjects onto H_1({m},2) = {floor} (also tabulated)"
                ));
            } else {
                o.check(false, || format!("H_1({m},{n}) = {got}, table {expected}"));
            }
        }
    }
    o
}

/// Whether the relations for `(m, n)` lie in the relation lattice for `(m, d)`, so that
/// `H_1(X_{m,n})` surjects onto `H_1(X_{m,d})`; checked by stacking both relation sets.
fn grid_cell_surjects(m: u64, n: u64, d: u64) -> bool {
    let coarse = h1::RelationMatrix::preset(m, d).unwrap();
    let fine = h1::RelationMatrix::preset(m, n).unwrap();
    let stacked = coarse.matrix().vstack(fine.matrix()).unwrap();
    cokernel(&stacked.transpose()) == coarse.fiber_quotient()
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new("n = 1 dichotomy for m ≤ 36, against h1(m, 1)");
    for m in 1..=36 {
        let closed = h1::h1_x_m1(m).unwrap();
        let expected = if m % 6 == 0 { g("(Z/2)^2 + Z/7 + Z^2") } else { g("(Z/2)^2 + Z^2") };
        o.check(closed == expected, || format!("h1_x_m1({m}) = {closed}"));
        let via_matrix = h1::h1(m, 1).unwrap();
        o.check(via_matrix == expected, || format!("h1({m}, 1) = {via_matrix}"));
    }
    o.check(g("Z/2 + Z/14 + Z^2") == g("(Z/2)^2 + Z/7 + Z^2"), || "Z/2 + Z/14 canonicalization".into());
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new("β table: gcd = closed form = table for odd m ≤ 19, n ≤ 30000; modular periods for m = 17, 19");
    const N_MAX: u64 = 30_000;
    for m in (1..=19).step_by(2) {
        let sweep = h1::beta_gcd_sweep(m, N_MAX).unwrap();
        let closed = BetaFactorization::new(m).unwrap();
        for n in 1..=N_MAX {
            let b = &sweep[n as usize - 1];
            let t = BigUint::from(table_beta(m, n));
            if b != &t || closed.closed_form(n) != *b {
                o.check(false, || format!("β({m},{n}): gcd {b}, closed form {}, table {t}", closed.closed_form(n)));
                break;
            }
        }
    }
    for (m, n, expected) in [(3, 24, 7u64), (5, 210, 41), (9, 1800, 1393), (13, 7800, 47321), (15, 3720, 7 * 31 * 31), (15, 840, 7 * 31 * 41)] {
        let direct = beta_full_size(m, n);
        o.check(direct == BigUint::from(expected), || format!("full-size β({m},{n}) = {direct}"));
    }
    for (m, n, p) in [(17, 1768, 103), (17, 265336, 15607), (19, 178017080, 9369319)] {
        o.check(h1::divides_beta_mod_p(m, n, p).unwrap(), || format!("{p} ∤ β({m},{n}) mod p"));
        o.check(!h1::divides_beta_mod_p(m, n - 1, p).unwrap(), || format!("{p} | β({m},{})", n - 1));
        o.check(h1::find_period(m, p).unwrap() == n, || format!("n({p}) ≠ {n} for m = {m}"));
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new("p | e_n − 1, f_n, g_n, h_n at n = p^2 − 1 for p ∈ {3, 5, 7, 11, 13}");
    for p in [3u64, 5, 7, 11, 13] {
        let n = p * p - 1;
        let [e, f, gg, h] = seq_efgh(n);
        let pb = BigInt::from(p);
        let residues: Vec<u64> = [e - 1, f, gg, h].iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
        if residues.iter().all(|r| *r == 0) {
            continue;
        }
        // x^4 − 2 is irreducible mod p for p ≡ 5 (mod 8); divisibility then needs n = p^4 − 1
        let fixed = h1::efgh_mod(p.pow(4) - 1, &pb);
        let holds_at_p4 = fixed[0] == BigInt::one() && fixed[1..].iter().all(Zero::is_zero);
        let confirmed = p % 8 == 5 && holds_at_p4 && residues == othom_core::verify::lemma_residues(p, n);
        if confirmed {
            o.known_deviation(format!("p = {p}, n = {n}: (e−1, f, g, h) mod p = {residues:?}; holds at n = p^4 − 1"));
        } else {
            o.check(false, || format!("p = {p}: residues {residues:?}"));
        }
    }
    o
}

fn koszul_identities<const K: usize>(e: &ResolutionElement<K>) -> bool {
    let degree = e.degree().unwrap().unwrap_or(0);
    homotopy_identity_check(e) && (degree < 2 || boundary(&boundary(e).unwrap()).unwrap().is_zero())
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new("∂∂ = 0 and homotopy identity (≥1000 samples, k = 2, 4); twisted d∘d = 0 for (m,n) ≤ (3,3); torus; duality");
    let mut rng = ChaCha8Rng::seed_from_u64(20241015);
    let mut samples = 0;
    for _ in 0..600 {
        for k in [2usize, 4] {
            let degree = rng.gen_range(0..=k);
            let terms = 1 + samples % 6;
            let ok = if k == 2 {
                koszul_identities(&random_element::<2, _>(&mut rng, degree, terms, 4))
            } else {
                koszul_identities(&random_element::<4, _>(&mut rng, degree, terms, 4))
            };
            samples += 1;
            o.check(ok, || format!("Koszul identity fails at k = {k}, degree {degree}"));
        }
    }
    o.check(samples >= 1000, || format!("only {samples} samples"));
    // the basis elements of top degree as well
    let top = ResolutionElement::<4>::basis(Cell::new(4, &[1, 2, 3, 4]).unwrap());
    o.check(homotopy_identity_check(&top), || "top cell".into());

    for (m, n, d) in dd_cases(false) {
        let w = WallResolution::build(&spec(m, n), &WallOptions::up_to(d)).unwrap();
        o.check(w.verify().is_ok(), || format!("d∘d ≠ 0 at ({m},{n}) through degree {d}"));
    }
    o.check(dd_cases(false).contains(&(3, 3, 3)), || "(3,3) missing".into());

    let torus = ActionSpec::new(QuarticFieldData::identity_action(), 1, 1).unwrap();
    let h = homology_range(&torus, 6, true).unwrap();
    for (r, hr) in h.iter().enumerate() {
        o.check(*hr == AbelianGroup::free(binomial(6, r)), || format!("torus H_{r} = {hr}"));
    }

    let low = homology_range(&spec(1, 1), 3, true).unwrap();
    let high = homology_range(&spec(1, 1), 6, true).unwrap();
    for i in 0..=2 {
        o.check(high[6 - i].free_rank() == low[i].free_rank(), || format!("rank H_{} ≠ rank H_{i}", 6 - i));
        o.check(high[5 - i].torsion() == low[i].torsion(), || format!("tors H_{} ≠ tors H_{i}", 5 - i));
    }
    o.check(high[3] == low[3], || "H_3 differs between the two builds".into());
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new("Wall H_1 = abelianization H_1 on m ≤ 12, n ≤ 5; binomial sums = first column of N^{2n} for n ≤ 20");
    let mut mismatches = BTreeMap::new();
    for m in 1..=12 {
        for n in 1..=5 {
            let s = spec(m, n);
            let wall = othom_core::wall::homology_of_x(&s, 1).unwrap();
            let fast = h1::h1_of(&s);
            if wall != fast {
                mismatches.insert((m, n), (wall, fast));
            }
        }
    }
    for ((m, n), (wall, fast)) in &mismatches {
        o.check(false, || format!("({m},{n}): Wall {wall}, abelianization {fast}"));
    }
    for n in 1..=20 {
        o.check(seq_efgh(n) == efgh_from_matrix(n), || format!("(e,f,g,h) mismatch at n = {n}"));
    }
    o
}

#[test]
fn acceptance() {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    for (k, o) in outcomes.iter().enumerate() {
        o.report(k + 1);
    }
    let unexpected: Vec<String> = outcomes
        .iter()
        .enumerate()
        .flat_map(|(k, o)| o.unexpected.iter().map(move |d| format!("criterion {}: {d}", k + 1)))
        .collect();
    assert!(unexpected.is_empty(), "{unexpected:#?}");
    // the documented deviations are exactly these
    let known: Vec<usize> = outcomes.iter().enumerate().filter(|(_, o)| !o.known.is_empty()).map(|(k, _)| k + 1).collect();
    assert_eq!(known, vec![2, 3, 6]);
}
