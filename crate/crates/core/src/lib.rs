//! Maximum-likelihood estimation of a qubit state from Pauli-axis counts.
//!
//! The raw (temporal) estimate ξ̂ᵢ = (n⁺ᵢ − n⁻ᵢ)/Nᵢ may fall outside the Bloch
//! ball. The MLE is then the orthogonal projection of ξ̂ onto the Bloch sphere
//! under the Fisher metric gᵢⱼ = ŝᵢ δᵢⱼ / (1 − ξᵢ²), computed here from a
//! closed-form cubic root and a one-dimensional root find ([`projector`]).
//!
//! [`oracle`] minimizes the same likelihood by direct search, [`infogeo`]
//! holds the information-geometric identities behind the method, and
//! [`simulator`] generates reproducible synthetic counts.

pub mod bench;
pub mod error;
pub mod infogeo;
pub mod oracle;
pub mod projector;
pub mod sampling;
pub mod simulator;
pub mod stokes;
pub mod suite;

pub use error::{Error, Result};
pub use projector::{project_mle, ProjectionResult};
pub use stokes::{temporal_estimate, CountRecord, StokesVector, WeightVector};
