//! Timing comparison of the closed-form projection against the direct
//! search oracle.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::oracle::{oracle_mle, OracleConfig};
use crate::projector::project_mle;
use crate::sampling;
use crate::stokes::{StokesVector, WeightVector};

/// Methods must agree to this max-norm distance.
pub const AGREEMENT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchTrial {
    pub xi_hat: StokesVector,
    pub projection: Duration,
    pub oracle: Duration,
    /// max |ξ*ᵢ(projection) − ξ*ᵢ(oracle)|
    pub discrepancy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSummary {
    pub mean: Duration,
    pub median: Duration,
}

impl TimingSummary {
    fn of(mut samples: Vec<Duration>) -> Self {
        samples.sort();
        let mean = samples.iter().sum::<Duration>() / samples.len() as u32;
        let mid = samples.len() / 2;
        let median = if samples.len().is_multiple_of(2) { (samples[mid - 1] + samples[mid]) / 2 } else { samples[mid] };
        Self { mean, median }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub trials: Vec<BenchTrial>,
    pub projection: TimingSummary,
    pub oracle: TimingSummary,
    pub max_discrepancy: f64,
}

impl BenchReport {
    /// Mean oracle time over mean projection time.
    pub fn speedup(&self) -> f64 {
        self.oracle.mean.as_secs_f64() / self.projection.mean.as_secs_f64()
    }

    pub fn methods_agree(&self) -> bool {
        self.max_discrepancy < AGREEMENT_TOLERANCE
    }
}

/// Times both methods on `trials` random exterior estimates with equal
/// weights. Each call runs alone on the current thread.
pub fn run_bench(trials: usize, seed: u64, cfg: &OracleConfig) -> Result<BenchReport> {
    assert!(trials >= 1, "at least one trial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = WeightVector::uniform();
    let mut rows = Vec::with_capacity(trials);
    for _ in 0..trials {
        let xi_hat = sampling::exterior_point(&mut rng);

        let start = Instant::now();
        let projected = black_box(project_mle(black_box(&xi_hat), &s))?;
        let projection = start.elapsed();

        let start = Instant::now();
        let searched = black_box(oracle_mle(black_box(&xi_hat), &s, cfg))?;
        let oracle = start.elapsed();

        rows.push(BenchTrial {
            xi_hat,
            projection,
            oracle,
            discrepancy: projected.xi_star.max_abs_diff(&searched),
        });
    }
    Ok(BenchReport {
        projection: TimingSummary::of(rows.iter().map(|r| r.projection).collect()),
        oracle: TimingSummary::of(rows.iter().map(|r| r.oracle).collect()),
        max_discrepancy: rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max),
        trials: rows,
    })
}
