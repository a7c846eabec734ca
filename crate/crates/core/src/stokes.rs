//! Stokes-parameter domain types and the temporal (empirical) estimate.
//!
//! A qubit state is represented by its Stokes vector ξ = (ξ₁, ξ₂, ξ₃); the
//! state is physical iff ‖ξ‖ ≤ 1. Components are accepted on the closed
//! interval [-1, 1] because finite samples routinely produce ξ̂ᵢ = ±1.

use crate::error::{Error, Result};

/// Raw tallies of ±1 outcomes for the three Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountRecord {
    pub n_plus: [u64; 3],
    pub n_minus: [u64; 3],
}

impl CountRecord {
    /// Builds a record, rejecting any axis that was never measured.
    pub fn new(n_plus: [u64; 3], n_minus: [u64; 3]) -> Result<Self> {
        let record = Self { n_plus, n_minus };
        record.validate()?;
        Ok(record)
    }

    /// Convenience constructor from `(n_plus, n_minus)` pairs per axis.
    pub fn from_pairs(pairs: [(u64, u64); 3]) -> Result<Self> {
        Self::new(pairs.map(|p| p.0), pairs.map(|p| p.1))
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            if self.axis_total(axis) == 0 {
                return Err(Error::EmptyAxis { axis: axis + 1 });
            }
        }
        Ok(())
    }

    /// Nᵢ for a zero-based axis index.
    pub fn axis_total(&self, axis: usize) -> u64 {
        self.n_plus[axis] + self.n_minus[axis]
    }

    pub fn total(&self) -> u64 {
        (0..3).map(|i| self.axis_total(i)).sum()
    }
}

/// A point of the Stokes parameter cube [-1, 1]³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector([f64; 3]);

impl StokesVector {
    pub const ORIGIN: StokesVector = StokesVector([0.0; 3]);

    pub fn new(xi: [f64; 3]) -> Result<Self> {
        for (index, &value) in xi.iter().enumerate() {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::StokesOutOfRange { index, value });
            }
        }
        Ok(Self(xi))
    }

    /// Wraps components that are known to lie in the cube.
    pub(crate) fn new_unchecked(xi: [f64; 3]) -> Self {
        debug_assert!(xi.iter().all(|v| (-1.0..=1.0).contains(v)), "{xi:?}");
        Self(xi)
    }

    /// The pure state pointing along `direction`, nudged inwards by at most a
    /// few ulps so that ‖ξ‖² ≤ 1 holds in floating point.
    pub fn pure(direction: [f64; 3]) -> Result<Self> {
        let length = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain { name: "direction length", value: length });
        }
        let mut xi = direction.map(|v| v / length);
        while xi.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            xi = xi.map(|v| v * (1.0 - f64::EPSILON));
        }
        Self::new(xi)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, axis: usize) -> f64 {
        self.0[axis]
    }

    pub fn norm_squared(&self) -> f64 {
        norm_squared(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// True iff every component is strictly inside (-1, 1).
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|v| v.abs() < 1.0)
    }

    pub fn max_abs_diff(&self, other: &StokesVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for StokesVector {
    type Output = f64;

    fn index(&self, axis: usize) -> &f64 {
        &self.0[axis]
    }
}

/// Tolerance on Σ sᵢ = 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Measurement fractions ŝ = (ŝ₁, ŝ₂, ŝ₃): strictly positive, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector([f64; 3]);

impl WeightVector {
    pub fn new(s: [f64; 3]) -> Result<Self> {
        if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "every weight must be positive and finite, got {bad}"
            )));
        }
        let sum: f64 = s.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self(s))
    }

    /// Normalizes positive ratios, e.g. `(5, 1, 1)` → `(5/7, 1/7, 1/7)`.
    pub fn from_ratios(ratios: [f64; 3]) -> Result<Self> {
        if let Some(bad) = ratios.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "every ratio must be positive and finite, got {bad}"
            )));
        }
        let sum: f64 = ratios.iter().sum();
        Self::new(ratios.map(|r| r / sum))
    }

    pub fn uniform() -> Self {
        Self([1.0 / 3.0; 3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, axis: usize) -> f64 {
        self.0[axis]
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, axis: usize) -> &f64 {
        &self.0[axis]
    }
}

/// ξ̂ᵢ = (n⁺ᵢ − n⁻ᵢ)/Nᵢ and ŝᵢ = Nᵢ/N.
pub fn temporal_estimate(counts: &CountRecord) -> Result<(StokesVector, WeightVector)> {
    counts.validate()?;
    let total = counts.total() as f64;
    let mut xi = [0.0; 3];
    let mut s = [0.0; 3];
    for axis in 0..3 {
        let n_axis = counts.axis_total(axis) as f64;
        // Subtract in floating point: u64 difference could be negative.
        xi[axis] = (counts.n_plus[axis] as f64 - counts.n_minus[axis] as f64) / n_axis;
        s[axis] = n_axis / total;
    }
    Ok((StokesVector::new(xi)?, WeightVector::new(s)?))
}

/// Σᵢ ξᵢ².
pub fn norm_squared(xi: &StokesVector) -> f64 {
    xi.0.iter().map(|v| v * v).sum()
}
