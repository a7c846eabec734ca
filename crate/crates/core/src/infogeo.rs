//! Information geometry of finite distributions.
//!
//! Two statistical models are covered:
//!
//! * the product of `k ≤ 3` independent binary distributions, p_ξ(ω) = Πᵢ pᵢ(ωᵢ)
//!   with pᵢ(±1) = (1 ± ξᵢ)/2, which is dually flat with natural coordinates
//!   θⁱ = log((1+ξᵢ)/(1−ξᵢ)) and expectation coordinates ηᵢ = (1+ξᵢ)/2;
//! * the six-outcome randomized-tomography model p_(s,ξ), where axis `i` is
//!   measured with probability `sᵢ`.
//!
//! Outcomes of product spaces are ordered lexicographically with +1 before −1
//! and axis 1 outermost. The six-outcome space is ordered (σ₁,+1), (σ₁,−1),
//! (σ₂,+1), …, (σ₃,−1). All logarithms are natural.

use crate::error::{Error, Result};
use crate::stokes::{StokesVector, WeightVector};

/// Tolerance on Σ p(ω) = 1.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Step for the central-difference derivatives used by the numeric checks.
pub const DIFF_STEP: f64 = 1e-6;

/// A strictly positive probability vector over a fixed finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty outcome set".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} = {p} is not strictly positive"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// D(p‖q) = Σ_ω p(ω) log(p(ω)/q(ω)).
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: q.len() });
    }
    Ok(p.probs
        .iter()
        .zip(q.probs.iter())
        .map(|(&a, &b)| a * (a / b).ln())
        .sum())
}

fn check_interior(xi: &[f64]) -> Result<()> {
    if !(1..=3).contains(&xi.len()) {
        return Err(Error::UnsupportedDimension(xi.len()));
    }
    match xi.iter().enumerate().find(|(_, v)| v.is_nan() || v.abs() >= 1.0) {
        Some((index, &value)) => Err(Error::Boundary { index, value }),
        None => Ok(()),
    }
}

/// The product of `k` independent binary distributions with biases ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBernoulli {
    xi: Vec<f64>,
}

impl ProductBernoulli {
    pub fn new(xi: &[f64]) -> Result<Self> {
        check_interior(xi)?;
        Ok(Self { xi: xi.to_vec() })
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn dimension(&self) -> usize {
        self.xi.len()
    }

    /// Probability vector over the 2ᵏ outcomes in canonical order.
    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.xi.len();
        (0..1usize << k)
            .map(|outcome| {
                (0..k)
                    .map(|axis| {
                        // Bit set (from the most significant end) means −1.
                        let minus = outcome >> (k - 1 - axis) & 1 == 1;
                        let x = self.xi[axis];
                        if minus { (1.0 - x) / 2.0 } else { (1.0 + x) / 2.0 }
                    })
                    .product()
            })
            .collect()
    }

    pub fn distribution(&self) -> FiniteDistribution {
        FiniteDistribution { probs: self.probabilities() }
    }
}

/// 2ᵏ-outcome product distribution for ξ ∈ (−1, 1)ᵏ.
pub fn product_distribution(xi: &[f64]) -> Result<FiniteDistribution> {
    Ok(ProductBernoulli::new(xi)?.distribution())
}

/// The six-outcome distribution of randomized tomography.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomizedTomographyDistribution {
    s: WeightVector,
    xi: StokesVector,
}

impl RandomizedTomographyDistribution {
    pub fn new(s: WeightVector, xi: StokesVector) -> Result<Self> {
        check_interior(&xi.components())?;
        Ok(Self { s, xi })
    }

    pub fn weights(&self) -> WeightVector {
        self.s
    }

    pub fn stokes(&self) -> StokesVector {
        self.xi
    }

    pub fn probabilities(&self) -> [f64; 6] {
        randomized_probs(self.s.components(), self.xi.components())
    }

    pub fn distribution(&self) -> FiniteDistribution {
        FiniteDistribution { probs: self.probabilities().to_vec() }
    }
}

fn randomized_probs(s: [f64; 3], xi: [f64; 3]) -> [f64; 6] {
    let mut p = [0.0; 6];
    for axis in 0..3 {
        p[2 * axis] = s[axis] * (1.0 + xi[axis]) / 2.0;
        p[2 * axis + 1] = s[axis] * (1.0 - xi[axis]) / 2.0;
    }
    p
}

/// p_(s,ξ) parametrized by (s₁, s₂, ξ₁, ξ₂, ξ₃), with s₃ = 1 − s₁ − s₂.
fn randomized_probs_free(params: [f64; 5]) -> [f64; 6] {
    let [s1, s2, x1, x2, x3] = params;
    randomized_probs([s1, s2, 1.0 - s1 - s2], [x1, x2, x3])
}

pub fn randomized_distribution(s: &WeightVector, xi: &StokesVector) -> Result<FiniteDistribution> {
    Ok(RandomizedTomographyDistribution::new(*s, *xi)?.distribution())
}

/// Dual affine coordinates and potentials of the product manifold at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCoordinates {
    /// Natural parameters θⁱ.
    pub theta: Vec<f64>,
    /// Expectation parameters ηᵢ ∈ (0, 1).
    pub eta: Vec<f64>,
    /// Log-partition ψ(θ) = Σ log(1 + e^θⁱ).
    pub psi: f64,
    /// Negative entropy φ(η) = θ·η − ψ(θ).
    pub phi: f64,
}

impl DualCoordinates {
    /// Recovers ξ = 2η − 1.
    pub fn stokes(&self) -> Vec<f64> {
        self.eta.iter().map(|e| 2.0 * e - 1.0).collect()
    }

    /// ψ + φ − θ·η, zero by Legendre duality.
    pub fn legendre_gap(&self) -> f64 {
        self.psi + self.phi - dot(&self.theta, &self.eta)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// ψ(θ) = Σᵢ log(1 + exp θⁱ).
pub fn log_partition(theta: &[f64]) -> f64 {
    theta.iter().map(|&t| softplus(t)).sum()
}

pub fn dual_coordinates(xi: &[f64]) -> Result<DualCoordinates> {
    check_interior(xi)?;
    let theta: Vec<f64> = xi.iter().map(|&x| ((1.0 + x) / (1.0 - x)).ln()).collect();
    let eta: Vec<f64> = xi.iter().map(|&x| (1.0 + x) / 2.0).collect();
    let psi = log_partition(&theta);
    let phi = dot(&theta, &eta) - psi;
    Ok(DualCoordinates { theta, eta, psi, phi })
}

/// D(p‖q) = ψ(θ(q)) + φ(η(p)) − θ(q)·η(p), evaluated from the potentials only.
pub fn canonical_divergence(p_xi: &[f64], q_xi: &[f64]) -> Result<f64> {
    if p_xi.len() != q_xi.len() {
        return Err(Error::DimensionMismatch { left: p_xi.len(), right: q_xi.len() });
    }
    let p = dual_coordinates(p_xi)?;
    let q = dual_coordinates(q_xi)?;
    Ok(q.psi + p.phi - dot(&q.theta, &p.eta))
}

pub type Matrix3 = [[f64; 3]; 3];

/// gᵢⱼ = sᵢ δᵢⱼ / (1 − ξᵢ²).
pub fn fisher_metric(xi: &StokesVector, s: &WeightVector) -> Result<Matrix3> {
    check_interior(&xi.components())?;
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        g[i][i] = s[i] / (1.0 - xi[i] * xi[i]);
    }
    Ok(g)
}

/// Σ_ω ∂ᵢp ∂ⱼp / p over the six outcomes, with ∂p/∂ξᵢ = ±sᵢ/2 on the two
/// outcomes of axis `i` and zero elsewhere.
pub fn fisher_information_expectation(xi: &StokesVector, s: &WeightVector) -> Result<Matrix3> {
    let p = RandomizedTomographyDistribution::new(*s, *xi)?.probabilities();
    let score = |param: usize, outcome: usize| -> f64 {
        if outcome / 2 != param {
            0.0
        } else if outcome.is_multiple_of(2) {
            s[param] / 2.0
        } else {
            -s[param] / 2.0
        }
    };
    let mut g = [[0.0; 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..6).map(|w| score(i, w) * score(j, w) / p[w]).sum();
        }
    }
    Ok(g)
}

fn central_difference_p(params: [f64; 5], index: usize) -> [f64; 6] {
    let mut plus = params;
    let mut minus = params;
    plus[index] += DIFF_STEP;
    minus[index] -= DIFF_STEP;
    let (hi, lo) = (randomized_probs_free(plus), randomized_probs_free(minus));
    std::array::from_fn(|w| (hi[w] - lo[w]) / (2.0 * DIFF_STEP))
}

fn fisher_inner(p: &[f64; 6], du: &[f64; 6], dv: &[f64; 6]) -> f64 {
    (0..6).map(|w| du[w] * dv[w] / p[w]).sum()
}

/// Fisher matrix in ξ from central differences of the outcome probabilities.
pub fn fisher_information_numeric(xi: &StokesVector, s: &WeightVector) -> Result<Matrix3> {
    RandomizedTomographyDistribution::new(*s, *xi)?;
    let [s1, s2, _] = s.components();
    let params = [s1, s2, xi[0], xi[1], xi[2]];
    let p = randomized_probs_free(params);
    let d: [[f64; 6]; 3] = std::array::from_fn(|i| central_difference_p(params, 2 + i));
    let mut g = [[0.0; 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = fisher_inner(&p, &d[i], &d[j]);
        }
    }
    Ok(g)
}

/// Mixed coordinates of the foliation of the six-outcome simplex into
/// measurement-weight slices and Stokes fibres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationCoordinates {
    /// (s₁, s₂, s₁ξ₁, s₂ξ₂, s₃ξ₃)
    pub eta: [f64; 5],
    /// Dual coordinates θⁱ = ∂φ/∂ηᵢ; θ³, θ⁴, θ⁵ depend on ξ only.
    pub theta: [f64; 5],
}

pub fn foliation_coordinates(s: &WeightVector, xi: &StokesVector) -> Result<FoliationCoordinates> {
    check_interior(&xi.components())?;
    let [s1, s2, s3] = s.components();
    let eta = [s1, s2, s1 * xi[0], s2 * xi[1], s3 * xi[2]];
    let [e1, e2, e3, e4, e5] = eta;
    let rest = 1.0 - e1 - e2;
    let denominator = (rest + e5) * (rest - e5);
    let theta = [
        0.5 * ((e1 + e3) * (e1 - e3) / denominator).ln(),
        0.5 * ((e2 + e4) * (e2 - e4) / denominator).ln(),
        0.5 * ((e1 + e3) / (e1 - e3)).ln(),
        0.5 * ((e2 + e4) / (e2 - e4)).ln(),
        0.5 * ((rest + e5) / (rest - e5)).ln(),
    ];
    Ok(FoliationCoordinates { eta, theta })
}

/// max |g(∂/∂ξᵢ, ∂/∂sⱼ)| over i ∈ {1,2,3}, j ∈ {1,2}, with derivatives of
/// p_(s,ξ) taken by central differences.
pub fn foliation_orthogonality_defect(s: &WeightVector, xi: &StokesVector) -> Result<f64> {
    RandomizedTomographyDistribution::new(*s, *xi)?;
    let [s1, s2, _] = s.components();
    let params = [s1, s2, xi[0], xi[1], xi[2]];
    let p = randomized_probs_free(params);
    let mut defect: f64 = 0.0;
    for weight in 0..2 {
        let ds = central_difference_p(params, weight);
        for axis in 0..3 {
            let dxi = central_difference_p(params, 2 + axis);
            defect = defect.max(fisher_inner(&p, &dxi, &ds).abs());
        }
    }
    Ok(defect)
}
