//! Bounded parameter spaces and the mapping to the unit hypercube.
//!
//! Every teacher works on normalized `[0, 1]^d` coordinates internally and
//! converts back to task-parameter units at its output.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Axis-aligned box `[lower, upper]` in `d` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct ParameterSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawSpace> for ParameterSpace {
    type Error = CoreError;

    fn try_from(raw: RawSpace) -> Result<Self> {
        ParameterSpace::new(raw.lower, raw.upper)
    }
}

impl From<ParameterSpace> for RawSpace {
    fn from(space: ParameterSpace) -> Self {
        RawSpace {
            lower: space.lower,
            upper: space.upper,
        }
    }
}

impl ParameterSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(CoreError::InvalidSpace("zero dimensions".into()));
        }
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CoreError::InvalidSpace(format!(
                    "dimension {i}: lower {lo} must be finite and strictly below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit hypercube `[0, 1]^dims`.
    pub fn unit(dims: usize) -> Result<Self> {
        Self::new(vec![0.0; dims], vec![1.0; dims])
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Per-dimension extent `upper - lower`.
    pub fn ranges(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .collect()
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.dims()
            && values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    fn check_dims(&self, got: usize) -> Result<()> {
        if got != self.dims() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dims(),
                got,
            });
        }
        Ok(())
    }

    /// Validates that `values` lies in the box and wraps it.
    pub fn vector(&self, values: Vec<f64>) -> Result<ParameterVector> {
        self.check_dims(values.len())?;
        for (index, &value) in values.iter().enumerate() {
            let (lower, upper) = (self.lower[index], self.upper[index]);
            if !(lower..=upper).contains(&value) {
                return Err(CoreError::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(ParameterVector(values))
    }

    /// Maps `p` to `[0, 1]^d`.
    pub fn normalize(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dims(p.len())?;
        let mut out = Vec::with_capacity(p.len());
        for (index, &value) in p.iter().enumerate() {
            let (lower, upper) = (self.lower[index], self.upper[index]);
            if !(lower..=upper).contains(&value) {
                return Err(CoreError::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
            out.push((value - lower) / (upper - lower));
        }
        Ok(out)
    }

    /// Inverse of [`normalize`](Self::normalize).
    pub fn denormalize(&self, unit: &[f64]) -> Result<ParameterVector> {
        self.check_dims(unit.len())?;
        let mut out = Vec::with_capacity(unit.len());
        for (index, &u) in unit.iter().enumerate() {
            if !(0.0..=1.0).contains(&u) {
                return Err(CoreError::OutOfBounds {
                    index,
                    value: u,
                    lower: 0.0,
                    upper: 1.0,
                });
            }
            let (lower, upper) = (self.lower[index], self.upper[index]);
            // lower + u * range can overshoot upper by one ulp.
            out.push((lower + u * (upper - lower)).clamp(lower, upper));
        }
        Ok(ParameterVector(out))
    }

    /// Clamps every component into the box. Never fails for the right length;
    /// NaN components are sent to the lower bound.
    pub fn clip(&self, raw: &[f64]) -> Result<ParameterVector> {
        self.check_dims(raw.len())?;
        let values = raw
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| if v.is_nan() { lo } else { v.clamp(lo, hi) })
            .collect();
        Ok(ParameterVector(values))
    }

    /// Uniform draw over the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        ParameterVector(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(&lo, &hi)| lo + rng.gen::<f64>() * (hi - lo))
                .collect(),
        )
    }
}

/// Clamps a unit-cube vector into `[0, 1]^d` in place.
pub(crate) fn clip_unit(values: &mut [f64]) {
    for v in values {
        *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    }
}

/// Uniform draw in `[0, 1]^dims`.
pub(crate) fn uniform_unit<R: Rng + ?Sized>(dims: usize, rng: &mut R) -> Vec<f64> {
    (0..dims).map(|_| rng.gen::<f64>()).collect()
}

/// A point of a [`ParameterSpace`], in task-parameter units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
