use thiserror::Error;

/// Errors raised by estimation, geometry, and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis {axis} has no measurements (n_plus + n_minus = 0)")]
    EmptyAxis { axis: usize },

    #[error("Stokes component {index} = {value} lies outside [-1, 1]")]
    StokesOutOfRange { index: usize, value: f64 },

    #[error("point must be strictly interior: component {index} = {value} has |value| >= 1")]
    Boundary { index: usize, value: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("parameter {name} = {value} is out of its domain")]
    Domain { name: &'static str, value: f64 },

    #[error("no projection needed: |xi_hat|^2 = {norm_squared} <= 1")]
    InsideBall { norm_squared: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
