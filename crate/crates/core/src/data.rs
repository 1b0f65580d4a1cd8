//! Expectation-value data `tr(O rho) = v`.

use crate::error::{Result, RoofError};
use crate::tensor::{DensityOp, HermitianOp};

#[derive(Debug, Clone)]
pub struct DataConstraint {
    pub observable: HermitianOp,
    pub value: f64,
}

impl DataConstraint {
    /// Checked constructor: `|v| <= ||O||` within `1e-9`.
    pub fn new(observable: HermitianOp, value: f64) -> Result<Self> {
        let c = Self { observable, value };
        c.validate()?;
        Ok(c)
    }

    /// Unchecked constructor, for probing data that no state can produce.
    pub fn raw(observable: HermitianOp, value: f64) -> Self {
        Self { observable, value }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.value.is_finite() {
            return Err(RoofError::InvalidInput("data value is not finite".into()));
        }
        let norm = self.observable.operator_norm();
        if self.value.abs() > norm + 1e-9 {
            return Err(RoofError::InvalidInput(format!(
                "|value| = {} exceeds the operator norm {norm}",
                self.value.abs()
            )));
        }
        Ok(())
    }

    /// The data a given state would produce for `observables`.
    pub fn from_state(rho: &DensityOp, observables: &[HermitianOp]) -> Result<Vec<DataConstraint>> {
        observables
            .iter()
            .map(|o| {
                if o.space() != rho.space() {
                    return Err(RoofError::DimensionMismatch("observable and state spaces differ".into()));
                }
                Ok(DataConstraint { observable: o.clone(), value: rho.expectation(o.matrix()) })
            })
            .collect()
    }
}
