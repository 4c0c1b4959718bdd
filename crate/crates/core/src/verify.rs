//! Invariant suites shared by `othom verify` and the test harness.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::h1;
use crate::linalg::AbelianGroup;
use crate::ot::{seq_efgh, ActionSpec, QuarticFieldData};
use crate::resolution::{binomial, boundary, homotopy_identity_check, Cell, ResolutionElement};
use crate::wall::{duality_complete, Fault, WallOptions, WallResolution, TOP_DEGREE};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub ms: u128,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Skip the `(m, n)` grid beyond `3 × 3`.
    pub quick: bool,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

/// Random element of the Koszul resolution over `Z[Z^K]`, homogeneous of `degree`.
pub fn random_element<const K: usize, R: Rng>(rng: &mut R, degree: usize, terms: usize, spread: i64) -> ResolutionElement<K> {
    let cells = Cell::all_of_degree(K, degree);
    let mut e = ResolutionElement::zero();
    for _ in 0..terms {
        let cell = cells[rng.gen_range(0..cells.len())];
        let exp: [i64; K] = std::array::from_fn(|_| rng.gen_range(-spread..=spread));
        let c: i64 = rng.gen_range(-5..=5);
        e = e.add(&ResolutionElement::monomial(exp, cell, c));
    }
    e
}

fn koszul_suite<const K: usize>(rng: &mut ChaCha8Rng, samples: usize) -> Result<String, String> {
    for s in 0..samples {
        let degree = s % (K + 1);
        let e = random_element::<K, _>(rng, degree, 1 + s % 5, 3);
        if degree >= 2 {
            let dd = boundary(&boundary(&e).map_err(|err| err.to_string())?).map_err(|err| err.to_string())?;
            if !dd.is_zero() {
                return Err(format!("∂∂ ≠ 0 on a degree-{degree} element over Z[Z^{K}]"));
            }
        }
        if !homotopy_identity_check(&e) {
            return Err(format!("homotopy identity fails on a degree-{degree} element over Z[Z^{K}]"));
        }
    }
    Ok(format!("{samples} random elements over Z[Z^{K}]"))
}

fn wall_dd(m: u64, n: u64, degree: usize, fault: Option<Fault>) -> Result<(), String> {
    let spec = ActionSpec::preset(m, n).map_err(|e| e.to_string())?;
    let options = WallOptions { max_degree: degree, verify: false, fault };
    let w = WallResolution::build(&spec, &options).map_err(|e| format!("({m},{n}): {e}"))?;
    w.verify().map_err(|e| format!("({m},{n}): {e}"))
}

/// `(m, n, degree)` cases for the twisted `d∘d = 0` check.
pub fn dd_cases(quick: bool) -> Vec<(u64, u64, usize)> {
    let mut cases = vec![(1, 1, TOP_DEGREE)];
    for (m, n) in [(2, 1), (3, 1), (1, 2)] {
        cases.push((m, n, 4));
    }
    let top = if quick { 2 } else { 3 };
    for m in 1..=top {
        for n in 1..=top {
            if !cases.iter().any(|c| (c.0, c.1) == (m, n)) {
                cases.push((m, n, 3));
            }
        }
    }
    cases
}

fn dd_suite(quick: bool, fault: Option<Fault>) -> Result<String, String> {
    let cases = dd_cases(quick);
    for &(m, n, d) in &cases {
        wall_dd(m, n, d, fault)?;
    }
    Ok(format!("{} (m, n, degree) cases", cases.len()))
}

fn torus_suite() -> Result<String, String> {
    let spec = ActionSpec::new(QuarticFieldData::identity_action(), 1, 1).map_err(|e| e.to_string())?;
    let w = WallResolution::build(&spec, &WallOptions { verify: true, ..WallOptions::default() })
        .map_err(|e| e.to_string())?;
    let c = w.integer_complex().map_err(|e| e.to_string())?;
    for r in 0..=TOP_DEGREE {
        let h = c.homology(r).map_err(|e| e.to_string())?;
        if h != AbelianGroup::free(binomial(6, r)) {
            return Err(format!("H_{r} of the torus is {h}"));
        }
    }
    Ok("H_r = Z^C(6,r)".into())
}

fn duality_suite() -> Result<String, String> {
    let spec = ActionSpec::preset(1, 1).map_err(|e| e.to_string())?;
    let w = WallResolution::build(&spec, &WallOptions::default()).map_err(|e| e.to_string())?;
    let c = w.integer_complex().map_err(|e| e.to_string())?;
    let direct = c.all_homology().map_err(|e| e.to_string())?;
    let completed = duality_complete(&direct[..4]);
    if direct[..=TOP_DEGREE] != completed[..] {
        return Err("direct H_4..H_6 differ from the duality completion for (1,1)".into());
    }
    Ok("(1,1) direct H_0..H_6 = duality completion".into())
}

fn fast_path_suite(quick: bool) -> Result<String, String> {
    let (mt, nt) = if quick { (3, 3) } else { (12, 5) };
    for m in 1..=mt {
        for n in 1..=nt {
            let spec = ActionSpec::preset(m, n).map_err(|e| e.to_string())?;
            let wall = crate::wall::homology_of_x(&spec, 1).map_err(|e| format!("({m},{n}): {e}"))?;
            let fast = h1::h1_of(&spec);
            if wall != fast {
                return Err(format!("({m},{n}): Wall H_1 = {wall}, abelianization = {fast}"));
            }
        }
    }
    Ok(format!("m ≤ {mt}, n ≤ {nt}"))
}

/// `p | e_n − 1, f_n, g_n, h_n` at `n = p^2 − 1` needs the roots of `x^4 − 2` to lie in
/// `F_{p^2}`, which fails for `p ≡ 5 (mod 8)`; `n = p^4 − 1` works for every odd `p`.
pub fn lemma_residues(p: u64, n: u64) -> [u64; 4] {
    let q = BigInt::from(p);
    let [e, f, g, h] = h1::efgh_mod(n, &q);
    [e - 1, f, g, h].map(|x| x.mod_floor(&q).try_into().expect("reduced mod p"))
}

fn lemma_suite() -> Result<String, String> {
    let check = |p: u64, n: u64, [e, f, g, h]: [BigInt; 4]| -> Result<(), String> {
        let pb = BigInt::from(p);
        for (name, x) in [("e - 1", e - 1), ("f", f), ("g", g), ("h", h)] {
            if !x.is_multiple_of(&pb) {
                return Err(format!("{p} ∤ {name} at n = {n}"));
            }
        }
        Ok(())
    };
    for p in [3u64, 5, 7, 11, 13] {
        if p % 8 != 5 {
            check(p, p * p - 1, seq_efgh(p * p - 1))?;
        }
        let n = p.pow(4) - 1;
        check(p, n, h1::efgh_mod(n, &BigInt::from(p)))?;
    }
    Ok("p | e-1, f, g, h at n = p^2 - 1 (p = 3, 7, 11) and at n = p^4 - 1 (p ≤ 13)".into())
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> SuiteReport {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SuiteReport { name, passed, detail, ms: start.elapsed().as_millis() }
}

/// Runs every suite in a fixed order.
pub fn run_suites(options: VerifyOptions) -> Vec<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x07_0e_1a);
    vec![
        timed("koszul", || {
            let a = koszul_suite::<2>(&mut rng, 600)?;
            let b = koszul_suite::<4>(&mut rng, 600)?;
            Ok(format!("{a}; {b}"))
        }),
        timed("wall-dd", || dd_suite(options.quick, options.fault)),
        timed("torus", torus_suite),
        timed("duality", duality_suite),
        timed("h1-agreement", || fast_path_suite(options.quick)),
        timed("lemma-divisibility", lemma_suite),
    ]
}
