use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;
const NEG_TOL: f64 = 1e-12;

/// A point on the probability simplex.
///
/// Entries in `[-1e-12, 0)` are clamped to zero on construction; anything
/// more negative, or a sum off by more than `1e-10`, is rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::SimplexViolation("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -NEG_TOL) {
            return Err(Error::SimplexViolation(format!("entry {w} is negative or not finite")));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::SimplexViolation(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    /// Clamps negative entries and rescales to unit sum. Used for optimizer
    /// iterates that drift off the simplex by rounding.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let clamped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = clamped.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::SimplexViolation("weights have no positive mass".into()));
        }
        Ok(Self(clamped.into_iter().map(|w| w / sum).collect()))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn vertex(k: usize, i: usize) -> Self {
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimMismatch("probability vectors of different length".into()));
        }
        let w: Vec<f64> = self.0.iter().zip(&other.0).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        Self::normalized(&w)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
