//! Python bindings: abelian groups, homology of `X_{m,n}`, the `H_1` fast path and `β(m, n)`.

use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use othom_core::h1::{self, BetaFactorization, H1Error};
use othom_core::linalg::{cokernel as core_cokernel, smith_normal_form as core_snf, LinalgError};
use othom_core::ot::{ActionSpec, OtError};
use othom_core::verify::{run_suites, VerifyOptions};
use othom_core::wall::{self, WallError, TOP_DEGREE};
use othom_core::{AbelianGroup, IntMatrix};

create_exception!(othom, OthomError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    OthomError::new_err(e.to_string())
}

fn linalg_err(e: LinalgError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ot_err(e: OtError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn h1_err(e: H1Error) -> PyErr {
    match e {
        H1Error::EvenM(_) | H1Error::BadPrime(_) | H1Error::NotAFactor { .. } | H1Error::Ot(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => err(e),
    }
}

fn wall_err(e: WallError) -> PyErr {
    err(e)
}

fn spec(m: u64, n: u64) -> PyResult<ActionSpec> {
    ActionSpec::preset(m, n).map_err(ot_err)
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    IntMatrix::from_big_rows(rows).map_err(linalg_err)
}

/// Finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` in canonical form.
#[pyclass(name = "AbelianGroup", module = "othom", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyAbelianGroup(AbelianGroup);

#[pymethods]
impl PyAbelianGroup {
    /// Parses e.g. `"(Z/2)^4 + Z/7 + Z^2"`; `"0"` is the trivial group.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(linalg_err)
    }

    #[staticmethod]
    #[pyo3(signature = (free_rank, orders=Vec::new()))]
    fn from_cyclic_orders(free_rank: usize, orders: Vec<BigInt>) -> PyResult<Self> {
        if orders.iter().any(|q| q.sign() != num_bigint::Sign::Plus) {
            return Err(PyValueError::new_err("cyclic orders must be positive"));
        }
        Ok(Self(AbelianGroup::from_cyclic_orders(free_rank, orders)))
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.0.free_rank()
    }

    #[getter]
    fn invariant_factors(&self) -> Vec<BigInt> {
        self.0.invariant_factors().to_vec()
    }

    #[getter]
    fn torsion_order(&self) -> BigInt {
        self.0.torsion_order()
    }

    /// `(prime, exponent, multiplicity)` triples sorted by prime, then exponent.
    #[getter]
    fn primary_parts(&self) -> Vec<(BigUint, u32, usize)> {
        self.0
            .primary_decomposition()
            .parts
            .into_iter()
            .map(|pp| (pp.prime, pp.exponent, pp.multiplicity))
            .collect()
    }

    fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    fn is_free(&self) -> bool {
        self.0.is_free()
    }

    fn torsion(&self) -> Self {
        Self(self.0.torsion())
    }

    fn direct_sum(&self, other: &Self) -> Self {
        Self(self.0.direct_sum(&other.0))
    }

    fn invariant_string(&self) -> String {
        self.0.invariant_string()
    }

    fn __add__(&self, other: &Self) -> Self {
        self.direct_sum(other)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("AbelianGroup('{}')", self.0)
    }
}

fn wrap(groups: Vec<AbelianGroup>) -> Vec<PyAbelianGroup> {
    groups.into_iter().map(PyAbelianGroup).collect()
}

/// Diagonal of the Smith normal form of an integer matrix given as rows.
#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    Ok(core_snf(&matrix(rows)?).diag)
}

/// `Z^rows / (column span)` of the matrix.
#[pyfunction]
fn cokernel(rows: Vec<Vec<BigInt>>) -> PyResult<PyAbelianGroup> {
    Ok(PyAbelianGroup(core_cokernel(&matrix(rows)?)))
}

/// Homology of a chain complex `C_0 ← C_1 ← …`; `differentials[k]` maps `C_{k+1} → C_k`.
#[pyfunction]
fn chain_homology(ranks: Vec<usize>, differentials: Vec<Vec<Vec<BigInt>>>) -> PyResult<Vec<PyAbelianGroup>> {
    let ds = differentials
        .into_iter()
        .zip(ranks.windows(2))
        .map(|(rows, w)| {
            if rows.is_empty() {
                Ok(IntMatrix::zeros(w[0], w[1]))
            } else {
                matrix(rows)
            }
        })
        .collect::<PyResult<Vec<_>>>()?;
    let c = othom_core::IntChainComplex::new(ranks, ds).map_err(linalg_err)?;
    c.all_homology().map(wrap).map_err(linalg_err)
}

/// `H_r(X_{m,n})` from the twisted tensor resolution.
#[pyfunction]
fn homology(py: Python<'_>, m: u64, n: u64, r: usize) -> PyResult<PyAbelianGroup> {
    let s = spec(m, n)?;
    py.detach(|| wall::homology_of_x(&s, r)).map(PyAbelianGroup).map_err(wall_err)
}

/// `H_0, …, H_6(X_{m,n})`; with `duality` only `H_0..H_3` are computed directly.
#[pyfunction]
#[pyo3(signature = (m, n, duality=true, verify=false))]
fn homology_all(py: Python<'_>, m: u64, n: u64, duality: bool, verify: bool) -> PyResult<Vec<PyAbelianGroup>> {
    let s = spec(m, n)?;
    py.detach(|| {
        if duality {
            wall::homology_range(&s, 3, verify).map(|low| wall::duality_complete(&low))
        } else {
            wall::homology_range(&s, TOP_DEGREE, verify)
        }
    })
    .map(wrap)
    .map_err(wall_err)
}

/// `H_1(X_{m,n})` via the abelianization.
#[pyfunction]
fn h1_group(m: u64, n: u64) -> PyResult<PyAbelianGroup> {
    h1::h1(m, n).map(PyAbelianGroup).map_err(h1_err)
}

/// The `8 × 4` integer relation matrix whose transpose-cokernel is the torsion of `H_1`.
#[pyfunction]
fn relation_matrix(m: u64, n: u64) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(h1::RelationMatrix::preset(m, n).map_err(h1_err)?.matrix().to_rows())
}

/// `-a_m`, the norm factor controlling `β(m, ·)` for odd `m`.
#[pyfunction]
fn norm_factor(m: u64) -> PyResult<BigUint> {
    h1::norm_factor_checked(m).map_err(h1_err)
}

/// `β(m, n)` as an exact gcd.
#[pyfunction]
fn beta(m: u64, n: u64) -> PyResult<BigUint> {
    h1::beta_gcd(m, n).map_err(h1_err)
}

/// `β(m, n)` from the prime data of `-a_m`.
#[pyfunction]
fn beta_closed_form(m: u64, n: u64) -> PyResult<BigUint> {
    h1::beta_closed_form(m, n).map_err(h1_err)
}

/// Least period of `n ↦ β(m, n)`.
#[pyfunction]
fn beta_period(py: Python<'_>, m: u64) -> PyResult<BigUint> {
    py.detach(|| h1::beta_period(m)).map_err(h1_err)
}

/// `(p, s, n(p))` for each prime power `p^s ∥ -a_m`.
#[pyfunction]
fn beta_factor_table(py: Python<'_>, m: u64) -> PyResult<Vec<(u64, u32, u64)>> {
    let f = py.detach(|| BetaFactorization::new(m)).map_err(h1_err)?;
    Ok(f.prime_data().iter().map(|d| (d.p, d.s, d.period)).collect())
}

/// Whether the prime `p` divides `β(m, n)`.
#[pyfunction]
fn divides_beta_mod_p(m: u64, n: u64, p: u64) -> PyResult<bool> {
    h1::divides_beta_mod_p(m, n, p).map_err(h1_err)
}

/// Least `n ≥ 1` with `p | β(m, n)`.
#[pyfunction]
fn find_period(py: Python<'_>, m: u64, p: u64) -> PyResult<u64> {
    py.detach(|| h1::find_period(m, p)).map_err(h1_err)
}

/// Runs the invariant suites; returns `(name, passed, detail)` per suite.
#[pyfunction]
#[pyo3(signature = (quick=true))]
fn verify(py: Python<'_>, quick: bool) -> Vec<(String, bool, String)> {
    py.detach(|| run_suites(VerifyOptions { quick, fault: None }))
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect()
}

#[pymodule]
fn othom(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("OthomError", m.py().get_type::<OthomError>())?;
    m.add("TOP_DEGREE", TOP_DEGREE)?;
    m.add_class::<PyAbelianGroup>()?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(cokernel, m)?)?;
    m.add_function(wrap_pyfunction!(chain_homology, m)?)?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(homology_all, m)?)?;
    m.add_function(wrap_pyfunction!(h1_group, m)?)?;
    m.add_function(wrap_pyfunction!(relation_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(norm_factor, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(beta_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(beta_period, m)?)?;
    m.add_function(wrap_pyfunction!(beta_factor_table, m)?)?;
    m.add_function(wrap_pyfunction!(divides_beta_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(find_period, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
