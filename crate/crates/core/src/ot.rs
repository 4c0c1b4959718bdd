//! Number-field data for the group `Z^4 ⋊ Z^2`: unit multiplication matrices,
//! positivity exponents, the action `A(s, t)`, and the integer sequences
//! `a_m, b_m` (powers of `u = w^2 - 1`) and `e_n, f_n, g_n, h_n` (powers of `v^2`).

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{IntMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum OtError {
    #[error("{name} must be a 4x4 matrix, got {rows}x{cols}")]
    NotFourByFour { name: &'static str, rows: usize, cols: usize },
    #[error("{name} is not a unit multiplication matrix: det = {det}")]
    NotUnimodular { name: &'static str, det: BigInt },
    #[error("M and N do not commute")]
    NotCommuting,
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("field config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field config {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Quartic field data `(p, M, N, i, j)`: `M`, `N` are the matrices of multiplication by
/// the fundamental units `u`, `v` on the basis `1, w, w^2, w^3` of `Z[p^{1/4}]`, and
/// `u^i`, `v^j` are the smallest totally positive powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticFieldData {
    p: u64,
    unit_u: IntMatrix,
    unit_v: IntMatrix,
    i: u32,
    j: u32,
}

#[derive(Serialize, Deserialize)]
struct FieldConfig {
    p: u64,
    #[serde(rename = "M")]
    m: Vec<Vec<i64>>,
    #[serde(rename = "N")]
    n: Vec<Vec<i64>>,
    i: u32,
    j: u32,
}

impl QuarticFieldData {
    pub fn new(p: u64, unit_u: IntMatrix, unit_v: IntMatrix, i: u32, j: u32) -> Result<Self, OtError> {
        for (name, mat) in [("M", &unit_u), ("N", &unit_v)] {
            if mat.rows() != 4 || mat.cols() != 4 {
                return Err(OtError::NotFourByFour { name, rows: mat.rows(), cols: mat.cols() });
            }
            let det = mat.determinant()?;
            if det.abs() != BigInt::one() {
                return Err(OtError::NotUnimodular { name, det });
            }
        }
        if &unit_u * &unit_v != &unit_v * &unit_u {
            return Err(OtError::NotCommuting);
        }
        if i == 0 {
            return Err(OtError::NonPositive("i"));
        }
        if j == 0 {
            return Err(OtError::NonPositive("j"));
        }
        Ok(Self { p, unit_u, unit_v, i, j })
    }

    /// `K = Q(2^{1/4})` with `u = w^2 - 1`, `v = w + 1`; `v` is not totally positive, so `j = 2`.
    pub fn preset_p2() -> Self {
        let m = IntMatrix::from_rows(&[[-1, 0, 2, 0], [0, -1, 0, 2], [1, 0, -1, 0], [0, 1, 0, -1]])
            .expect("static matrix");
        let n = IntMatrix::from_rows(&[[1, 0, 0, 2], [1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
            .expect("static matrix");
        Self::new(2, m, n, 1, 2).expect("preset satisfies its invariants")
    }

    /// Trivial action (`M = N = I`); the resulting group is `Z^6`.
    pub fn identity_action() -> Self {
        Self::new(0, IntMatrix::identity(4), IntMatrix::identity(4), 1, 1).expect("identity is unimodular")
    }

    /// Parses `{"p": .., "M": [[..]], "N": [[..]], "i": .., "j": ..}`.
    pub fn from_json(text: &str) -> Result<Self, OtError> {
        let cfg: FieldConfig = serde_json::from_str(text)?;
        Self::new(cfg.p, IntMatrix::from_rows(&cfg.m)?, IntMatrix::from_rows(&cfg.n)?, cfg.i, cfg.j)
    }

    pub fn load(path: &Path) -> Result<Self, OtError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| OtError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let cfg = FieldConfig {
            p: self.p,
            m: self.unit_u.to_i64_rows().expect("unit matrices have small entries"),
            n: self.unit_v.to_i64_rows().expect("unit matrices have small entries"),
            i: self.i,
            j: self.j,
        };
        serde_json::to_string(&cfg).expect("plain data serializes")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `M`, multiplication by `u`.
    pub fn unit_u(&self) -> &IntMatrix {
        &self.unit_u
    }

    /// `N`, multiplication by `v`.
    pub fn unit_v(&self) -> &IntMatrix {
        &self.unit_v
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }
}

/// The action of `Z^2 = <u^{im}, v^{jn}>` on `Z^4 = O_K`.
#[derive(Clone, Debug)]
pub struct ActionSpec {
    field: QuarticFieldData,
    m: u64,
    n: u64,
    gen_u: IntMatrix,
    gen_v: IntMatrix,
    gen_u_inv: IntMatrix,
    gen_v_inv: IntMatrix,
}

impl PartialEq for ActionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && self.field == other.field
    }
}

impl Eq for ActionSpec {}

impl ActionSpec {
    pub fn new(field: QuarticFieldData, m: u64, n: u64) -> Result<Self, OtError> {
        if m == 0 {
            return Err(OtError::NonPositive("m"));
        }
        if n == 0 {
            return Err(OtError::NonPositive("n"));
        }
        let gen_u = field.unit_u.pow(field.i as u64 * m)?;
        let gen_v = field.unit_v.pow(field.j as u64 * n)?;
        let gen_u_inv = gen_u.inverse_unimodular()?;
        let gen_v_inv = gen_v.inverse_unimodular()?;
        Ok(Self { field, m, n, gen_u, gen_v, gen_u_inv, gen_v_inv })
    }

    pub fn preset(m: u64, n: u64) -> Result<Self, OtError> {
        Self::new(QuarticFieldData::preset_p2(), m, n)
    }

    pub fn field(&self) -> &QuarticFieldData {
        &self.field
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `A(s, t) = M^{ims} N^{jnt}`; negative exponents use exact inverses.
    pub fn action_matrix(&self, s: i64, t: i64) -> IntMatrix {
        let part = |g: &IntMatrix, g_inv: &IntMatrix, e: i64| {
            if e >= 0 {
                g.pow(e as u64)
            } else {
                g_inv.pow(e.unsigned_abs())
            }
            .expect("square")
        };
        let a = part(&self.gen_u, &self.gen_u_inv, s);
        let b = part(&self.gen_v, &self.gen_v_inv, t);
        &a * &b
    }
}

/// `a_m = ((-1 + √2)^m + (-1 - √2)^m) / 2` via `a_{k+2} = -2 a_{k+1} + a_k`, `a_0 = 1`, `a_1 = -1`.
pub fn seq_a(m: u64) -> BigInt {
    let (mut prev, mut cur) = (BigInt::one(), BigInt::from(-1));
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = &prev - &cur * 2;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `b_m = (a_{m+1} + a_m) / 2`; `u^m = a_m + b_m w^2` in `Z[2^{1/4}]`.
pub fn seq_b(m: u64) -> BigInt {
    (seq_a(m + 1) + seq_a(m)) / 2
}

fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k as usize] * (n - k) / (k + 1);
        row.push(next);
    }
    row
}

/// `(e_n, f_n, g_n, h_n)` with `e_n + f_n w + g_n w^2 + h_n w^3 = (1 + w)^{2n}`, `w^4 = 2`,
/// evaluated as the binomial sums `Σ_i 2^i C(2n, 4i + r)`.
pub fn seq_efgh(n: u64) -> [BigInt; 4] {
    let row = binomial_row(2 * n);
    let mut out: [BigInt; 4] = Default::default();
    let mut two_pow = BigInt::one();
    for chunk in row.chunks(4) {
        for (r, c) in chunk.iter().enumerate() {
            out[r] += &two_pow * c;
        }
        two_pow *= 2;
    }
    out
}

/// First column of `N^{2n}` for the `p = 2` preset, computed by matrix powering.
pub fn efgh_from_matrix(n: u64) -> [BigInt; 4] {
    let n2 = QuarticFieldData::preset_p2().unit_v.pow(2 * n).expect("square");
    let col = n2.column(0);
    [col[0].clone(), col[1].clone(), col[2].clone(), col[3].clone()]
}

/// `[[e, 2h, 2g, 2f], [f, e, 2h, 2g], [g, f, e, 2h], [h, g, f, e]]`: multiplication by
/// `e + f w + g w^2 + h w^3` when `w^4 = 2`.
pub fn efgh_pattern_matrix(efgh: &[BigInt; 4]) -> IntMatrix {
    let [e, f, g, h] = efgh;
    let two = |x: &BigInt| x * 2;
    IntMatrix::from_big_rows(vec![
        vec![e.clone(), two(h), two(g), two(f)],
        vec![f.clone(), e.clone(), two(h), two(g)],
        vec![g.clone(), f.clone(), e.clone(), two(h)],
        vec![h.clone(), g.clone(), f.clone(), e.clone()],
    ])
    .expect("4x4")
}
