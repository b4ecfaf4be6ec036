use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::geometry::ReferenceCurve;

/// Checks `s in (0, 1)` and `alpha in (0, (1 - s) / 2)`.
pub fn validate_orders(s: f64, alpha: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("order s = {s} must lie in (0, 1)")));
    }
    if !(alpha > 0.0 && alpha < 0.5 * (1.0 - s)) {
        return Err(Error::InvalidParameter(format!(
            "Hoelder exponent alpha = {alpha} must lie in (0, (1 - s)/2) = (0, {})",
            0.5 * (1.0 - s)
        )));
    }
    Ok(())
}

/// Normal height over a reference curve, tagged with the orders it is
/// measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    values: Vec<f64>,
    s: f64,
    alpha: f64,
}

impl HeightField {
    pub fn new(values: Vec<f64>, s: f64, alpha: f64) -> Result<Self> {
        validate_orders(s, alpha)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("height values must be finite".into()));
        }
        Ok(Self { values, s, alpha })
    }

    pub fn zeros(n: usize, s: f64, alpha: f64) -> Result<Self> {
        Self::new(vec![0.0; n], s, alpha)
    }

    /// Samples `f(theta_j)` on the parameter grid of `base`.
    pub fn from_fn(base: &ReferenceCurve, s: f64, alpha: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(base.params().into_iter().map(f).collect(), s, alpha)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, self.s, self.alpha)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * factor).collect(), ..*self }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_aligned(&self, base: &ReferenceCurve) -> Result<()> {
        check_len(base.len(), self.len())
    }

    /// Whether the normal graph over `base` stays injective.
    pub fn is_admissible(&self, base: &ReferenceCurve) -> bool {
        self.len() == base.len() && self.max_abs() < base.admissibility_bound()
    }
}

/// Smallness thresholds on `||h||_{C^{1+s+alpha}}` and `||h||_{C^0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEpsilonBudget {
    pub delta: f64,
    pub epsilon: f64,
}

impl DeltaEpsilonBudget {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        if !(0.0 < epsilon && epsilon < delta && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "budget requires 0 < epsilon < delta < 1, got delta = {delta}, epsilon = {epsilon}"
            )));
        }
        Ok(Self { delta, epsilon })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_are_validated() {
        assert!(HeightField::zeros(8, 0.5, 0.1).is_ok());
        assert!(HeightField::zeros(8, 1.0, 0.1).is_err());
        assert!(HeightField::zeros(8, 0.5, 0.25).is_err());
        assert!(HeightField::new(vec![f64::NAN; 8], 0.5, 0.1).is_err());
    }

    #[test]
    fn budget_ordering() {
        assert!(DeltaEpsilonBudget::new(0.05, 0.01).is_ok());
        assert!(DeltaEpsilonBudget::new(0.01, 0.05).is_err());
        assert!(DeltaEpsilonBudget::new(1.5, 0.01).is_err());
    }
}
