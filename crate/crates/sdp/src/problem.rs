//! Standard-form semidefinite programs over Hermitian blocks.
//!
//! Primal: optimize `sum_b <C_b, X_b>` subject to `sum_b <A_ib, X_b> = b_i`
//! and every `X_b` positive semidefinite.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdpError};
use crate::sparse::SparseHerm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// One affine equality `sum_b <A_b, X_b> = rhs`; blocks not listed contribute zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHerm)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, SparseHerm)>, rhs: f64) -> Self {
        Self { terms, rhs }
    }

    pub fn single(block: usize, op: SparseHerm, rhs: f64) -> Self {
        Self { terms: vec![(block, op)], rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<SparseHerm>,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
}

impl SdpProblem {
    /// Empty problem with zero objective on the given blocks.
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        let objective = blocks.iter().map(|&n| SparseHerm::zeros(n)).collect();
        Self { blocks, objective, constraints: Vec::new(), sense }
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.blocks.len() {
            return Err(SdpError::DimensionMismatch(format!(
                "{} objective blocks for {} variable blocks",
                self.objective.len(),
                self.blocks.len()
            )));
        }
        for (b, (c, &n)) in self.objective.iter().zip(&self.blocks).enumerate() {
            if n == 0 {
                return Err(SdpError::DimensionMismatch(format!("block {b} has dimension 0")));
            }
            if c.dim != n {
                return Err(SdpError::DimensionMismatch(format!(
                    "objective block {b} has dimension {}, expected {n}",
                    c.dim
                )));
            }
            c.validate(&format!("objective block {b}"))?;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(SdpError::Numerical(format!("constraint {i} has non-finite rhs")));
            }
            for (b, a) in &con.terms {
                let n = *self.blocks.get(*b).ok_or_else(|| {
                    SdpError::DimensionMismatch(format!("constraint {i} refers to missing block {b}"))
                })?;
                if a.dim != n {
                    return Err(SdpError::DimensionMismatch(format!(
                        "constraint {i} block {b} has dimension {}, expected {n}",
                        a.dim
                    )));
                }
                a.validate(&format!("constraint {i} block {b}"))?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        let text = self.to_json()?;
        std::fs::write(path, text).map_err(|e| SdpError::Numerical(format!("writing {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| SdpError::Numerical(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn json_round_trip() {
        let mut p = SdpProblem::new(vec![2], Sense::Min);
        p.objective[0] = SparseHerm::identity(2);
        p.constraints.push(Constraint::single(
            0,
            SparseHerm::from_triplets(2, vec![(0, 1, Complex64::new(0.5, -0.5))]),
            0.25,
        ));
        let back = SdpProblem::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_mismatched_block() {
        let mut p = SdpProblem::new(vec![2], Sense::Min);
        p.constraints.push(Constraint::single(0, SparseHerm::identity(3), 1.0));
        assert!(matches!(p.validate(), Err(SdpError::DimensionMismatch(_))));
    }
}
