//! Random instances for the invariant suites and the benchmark.

use rand::Rng;

use crate::stokes::{StokesVector, WeightVector};

/// Components uniform on [−1, 1], rejected until ‖ξ̂‖ > 1.
pub fn exterior_point(rng: &mut impl Rng) -> StokesVector {
    loop {
        let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if x.iter().map(|v| v * v).sum::<f64>() > 1.0 {
            return StokesVector::new_unchecked(x);
        }
    }
}

/// Components uniform on the open cube (−1, 1)³.
pub fn interior_point(rng: &mut impl Rng) -> StokesVector {
    StokesVector::new_unchecked(std::array::from_fn(|_| open_unit(rng)))
}

/// A vector of `k` components uniform on (−1, 1).
pub fn interior_vector(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| open_unit(rng)).collect()
}

fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let v: f64 = rng.random_range(-1.0..1.0);
        if v > -1.0 {
            return v;
        }
    }
}

/// Weights from three ratios uniform on [0.05, 1].
pub fn weights(rng: &mut impl Rng) -> WeightVector {
    let ratios: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.05..=1.0));
    WeightVector::from_ratios(ratios).expect("positive ratios")
}

/// Uniform point on the unit sphere, by normalizing a point drawn in the ball.
pub fn sphere_point(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return x.map(|v| (v / norm).clamp(-1.0, 1.0));
        }
    }
}
