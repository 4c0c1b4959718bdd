use num_traits::{One, Zero};

use super::{smith_normal_form, AbelianGroup, IntMatrix, LinalgError};

/// `ℤ^rows / (column span of m)`, reading `m` as a map `ℤ^cols → ℤ^rows`.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    AbelianGroup::from_cyclic_orders(
        m.rows() - rank,
        snf.diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()),
    )
}

/// Chain complex of free abelian groups in degrees `0..=top`.
///
/// `differentials[k]` maps degree `k + 1` to degree `k` and has shape
/// `ranks[k] x ranks[k + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntChainComplex {
    ranks: Vec<usize>,
    differentials: Vec<IntMatrix>,
}

impl IntChainComplex {
    /// Checks shapes and `d ∘ d = 0`.
    pub fn new(ranks: Vec<usize>, differentials: Vec<IntMatrix>) -> Result<Self, LinalgError> {
        let c = Self::new_unchecked(ranks, differentials)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks shapes only.
    pub fn new_unchecked(ranks: Vec<usize>, differentials: Vec<IntMatrix>) -> Result<Self, LinalgError> {
        if ranks.is_empty() || differentials.len() + 1 != ranks.len() {
            return Err(LinalgError::ComplexShape(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.rows() != ranks[k] || d.cols() != ranks[k + 1] {
                return Err(LinalgError::ComplexShape(format!(
                    "differential {k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    ranks[k],
                    ranks[k + 1]
                )));
            }
        }
        Ok(Self { ranks, differentials })
    }

    /// Fails with `ComplexInvalid` at the first degree where `d ∘ d ≠ 0`.
    pub fn validate(&self) -> Result<(), LinalgError> {
        for k in 0..self.differentials.len().saturating_sub(1) {
            if !(&self.differentials[k] * &self.differentials[k + 1]).is_zero() {
                return Err(LinalgError::ComplexInvalid { degree: k + 2 });
            }
        }
        Ok(())
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn differentials(&self) -> &[IntMatrix] {
        &self.differentials
    }

    /// `d : C_{k+1} → C_k`.
    pub fn differential(&self, k: usize) -> &IntMatrix {
        &self.differentials[k]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// `H_k = ker(C_k → C_{k-1}) / im(C_{k+1} → C_k)`.
    pub fn homology(&self, k: usize) -> Result<AbelianGroup, LinalgError> {
        if k > self.top_degree() {
            return Err(LinalgError::DegreeOutOfRange { degree: k, top: self.top_degree() });
        }
        if k + 1 < self.ranks.len() && k >= 1
            && !(&self.differentials[k - 1] * &self.differentials[k]).is_zero() {
                return Err(LinalgError::ComplexInvalid { degree: k + 1 });
            }
        self.homology_unchecked(k)
    }

    fn homology_unchecked(&self, k: usize) -> Result<AbelianGroup, LinalgError> {
        let rank_out = if k == 0 { 0 } else { self.differentials[k - 1].rank() };
        if k == self.top_degree() {
            return Ok(AbelianGroup::free(self.ranks[k] - rank_out));
        }
        let snf = smith_normal_form(&self.differentials[k]);
        let rank_in = snf.rank();
        let cycles = self.ranks[k] - rank_out;
        if rank_in > cycles {
            return Err(LinalgError::ComplexInvalid { degree: k + 1 });
        }
        Ok(AbelianGroup::from_cyclic_orders(
            cycles - rank_in,
            snf.diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()),
        ))
    }

    pub fn all_homology(&self) -> Result<Vec<AbelianGroup>, LinalgError> {
        self.validate()?;
        (0..=self.top_degree()).map(|k| self.homology_unchecked(k)).collect()
    }
}
