//! Direct likelihood maximization over the Bloch sphere.
//!
//! This is a derivative-free nested grid search in spherical angles. It
//! shares no code with [`crate::projector`] so the two can cross-check each
//! other.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stokes::{norm_squared, CountRecord, StokesVector, WeightVector};

/// Half-width, in grid steps, of the local window scanned at each refinement.
const LOCAL_STEPS: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid points per angle in the initial global scan.
    pub coarse_grid: usize,
    pub refine_iterations: usize,
    /// Factor applied to the window half-width after each refinement.
    pub refine_shrink: f64,
    /// Refinement stops once the window half-width falls below this.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { coarse_grid: 180, refine_iterations: 200, refine_shrink: 0.5, tolerance: 1e-10 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_grid < 8 {
            return Err(Error::InvalidConfig(format!(
                "coarse_grid must be at least 8, got {}",
                self.coarse_grid
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "refine_shrink must lie in (0, 1), got {}",
                self.refine_shrink
            )));
        }
        Ok(())
    }
}

/// Unit vector at polar angle `polar` (from the ξ₃ axis) and azimuth `azimuth`.
///
/// Defined for all real angles, so windows crossing a pole or the azimuth
/// seam need no special casing.
pub fn sphere_point(polar: f64, azimuth: f64) -> [f64; 3] {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

/// Result of a sphere search.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSearch {
    pub point: [f64; 3],
    pub value: f64,
    /// Incumbent objective after the coarse scan and after each refinement.
    pub history: Vec<f64>,
}

/// Minimizes `objective` over the unit sphere by coarse scan plus shrinking
/// local grids. Ties go to the earliest grid point.
pub fn minimize_on_sphere<F>(objective: F, cfg: &OracleConfig) -> Result<SphereSearch>
where
    F: Fn([f64; 3]) -> f64,
{
    cfg.validate()?;
    let n = cfg.coarse_grid;
    let polar_step = PI / n as f64;
    let azimuth_step = 2.0 * PI / n as f64;

    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..n {
        let polar = (i as f64 + 0.5) * polar_step;
        for j in 0..n {
            let azimuth = j as f64 * azimuth_step;
            let value = objective(sphere_point(polar, azimuth));
            if value < best.2 {
                best = (polar, azimuth, value);
            }
        }
    }
    if !best.2.is_finite() {
        return Err(Error::Numerical("objective is not finite anywhere on the coarse grid".into()));
    }

    let mut history = vec![best.2];
    let (mut polar_half, mut azimuth_half) = (polar_step, azimuth_step);
    for _ in 0..cfg.refine_iterations {
        if polar_half.max(azimuth_half) < cfg.tolerance {
            break;
        }
        let (center_polar, center_azimuth) = (best.0, best.1);
        let dp = polar_half / LOCAL_STEPS as f64;
        let da = azimuth_half / LOCAL_STEPS as f64;
        for i in -LOCAL_STEPS..=LOCAL_STEPS {
            for j in -LOCAL_STEPS..=LOCAL_STEPS {
                if i == 0 && j == 0 {
                    continue;
                }
                let polar = center_polar + i as f64 * dp;
                let azimuth = center_azimuth + j as f64 * da;
                let value = objective(sphere_point(polar, azimuth));
                if value < best.2 {
                    best = (polar, azimuth, value);
                }
            }
        }
        history.push(best.2);
        polar_half *= cfg.refine_shrink;
        azimuth_half *= cfg.refine_shrink;
    }

    Ok(SphereSearch { point: sphere_point(best.0, best.1), value: best.2, history })
}

/// q log(q / p) with the convention 0 · log 0 = 0.
fn kl_term(q: f64, p: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q * (q / p).ln()
    }
}

/// D(p_(ŝ,ξ̂) ‖ p_(ŝ,ξ)) = Σᵢ ŝᵢ KL((1±ξ̂ᵢ)/2 ‖ (1±ξᵢ)/2).
///
/// Infinite when ξ puts zero mass on an observed outcome.
pub fn empirical_divergence(xi_hat: &StokesVector, s: &WeightVector, xi: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (plus_hat, minus_hat) = ((1.0 + xi_hat[i]) / 2.0, (1.0 - xi_hat[i]) / 2.0);
            let (plus, minus) = ((1.0 + xi[i]) / 2.0, (1.0 - xi[i]) / 2.0);
            s[i] * (kl_term(plus_hat, plus) + kl_term(minus_hat, minus))
        })
        .sum()
}

/// Runs the sphere search on [`empirical_divergence`] and reports the trace.
pub fn oracle_search(xi_hat: &StokesVector, s: &WeightVector, cfg: &OracleConfig) -> Result<SphereSearch> {
    minimize_on_sphere(|xi| empirical_divergence(xi_hat, s, xi), cfg)
}

/// The MLE by direct minimization of the divergence from the empirical
/// distribution. Returns ξ̂ itself when it already lies in the ball.
pub fn oracle_mle(xi_hat: &StokesVector, s: &WeightVector, cfg: &OracleConfig) -> Result<StokesVector> {
    cfg.validate()?;
    if norm_squared(xi_hat) <= 1.0 {
        return Ok(*xi_hat);
    }
    let search = oracle_search(xi_hat, s, cfg)?;
    Ok(StokesVector::new_unchecked(search.point))
}

/// −Σᵢ [n⁺ᵢ log((1+ξᵢ)/2) + n⁻ᵢ log((1−ξᵢ)/2)].
pub fn negative_log_likelihood(xi: &StokesVector, counts: &CountRecord) -> Result<f64> {
    let mut total = 0.0;
    for axis in 0..3 {
        let (plus, minus) = (counts.n_plus[axis], counts.n_minus[axis]);
        let x = xi[axis];
        if (plus > 0 && x <= -1.0) || (minus > 0 && x >= 1.0) {
            return Err(Error::Domain { name: "xi", value: x });
        }
        if plus > 0 {
            total -= plus as f64 * ((1.0 + x) / 2.0).ln();
        }
        if minus > 0 {
            total -= minus as f64 * ((1.0 - x) / 2.0).ln();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::project_mle;
    use crate::stokes::temporal_estimate;
    use approx::assert_abs_diff_eq;

    fn stokes(x: [f64; 3]) -> StokesVector {
        StokesVector::new(x).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(OracleConfig::default().validate().is_ok());
        let bad = OracleConfig { coarse_grid: 7, ..OracleConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = OracleConfig { tolerance: 0.0, ..OracleConfig::default() };
        assert!(bad.validate().is_err());
        assert!(oracle_mle(&stokes([0.9, 0.9, 0.9]), &WeightVector::uniform(), &bad).is_err());
    }

    #[test]
    fn symmetric_case() {
        let x = oracle_mle(&stokes([0.8, 0.8, 0.8]), &WeightVector::uniform(), &OracleConfig::default())
            .unwrap();
        for v in x.components() {
            assert_abs_diff_eq!(v, 1.0 / 3f64.sqrt(), epsilon = 1e-5);
        }
    }

    #[test]
    fn agrees_with_projection_and_depends_on_weights() {
        let xi = stokes([0.9, 0.8, 0.5]);
        let cfg = OracleConfig::default();
        let equal = WeightVector::uniform();
        let skewed = WeightVector::new([0.25, 0.5, 0.25]).unwrap();
        let a = oracle_mle(&xi, &equal, &cfg).unwrap();
        let b = oracle_mle(&xi, &skewed, &cfg).unwrap();
        assert!(a.max_abs_diff(&project_mle(&xi, &equal).unwrap().xi_star) < 1e-4);
        assert!(b.max_abs_diff(&project_mle(&xi, &skewed).unwrap().xi_star) < 1e-4);
        assert!(a.max_abs_diff(&b) > 1e-3);
    }

    #[test]
    fn interior_input_is_returned() {
        let xi = stokes([0.6, 0.0, 0.3]);
        assert_eq!(oracle_mle(&xi, &WeightVector::uniform(), &OracleConfig::default()).unwrap(), xi);
    }

    #[test]
    fn refinement_is_monotone() {
        let search = oracle_search(
            &stokes([-0.7, 0.95, 0.4]),
            &WeightVector::new([0.2, 0.3, 0.5]).unwrap(),
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(search.history.len() > 10);
        assert!(search.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn boundary_component_uses_zero_log_zero() {
        let xi_hat = stokes([1.0, 0.3, 0.0]);
        let s = WeightVector::uniform();
        assert!(empirical_divergence(&xi_hat, &s, xi_hat.components()).abs() < 1e-15);
        assert!(empirical_divergence(&stokes([0.5, 0.0, 0.0]), &s, [1.0, 0.0, 0.0]).is_infinite());
        let x = oracle_mle(&xi_hat, &s, &OracleConfig::default()).unwrap();
        assert!(x.max_abs_diff(&project_mle(&xi_hat, &s).unwrap().xi_star) < 1e-4);
    }

    #[test]
    fn nll_domain() {
        let counts = CountRecord::from_pairs([(10, 0), (5, 5), (3, 7)]).unwrap();
        assert!(negative_log_likelihood(&stokes([1.0, 0.0, 0.0]), &counts).is_ok());
        assert!(negative_log_likelihood(&stokes([-1.0, 0.0, 0.0]), &counts).is_err());
        assert!(negative_log_likelihood(&stokes([0.0, 1.0, 0.0]), &counts).is_err());
    }

    #[test]
    fn nll_interior_minimizer_is_the_estimate() {
        let counts = CountRecord::from_pairs([(80, 20), (50, 50), (65, 35)]).unwrap();
        let (xi_hat, _) = temporal_estimate(&counts).unwrap();
        let at_hat = negative_log_likelihood(&xi_hat, &counts).unwrap();
        for axis in 0..3 {
            for step in [-1e-3, 1e-3] {
                let mut c = xi_hat.components();
                c[axis] += step;
                assert!(negative_log_likelihood(&stokes(c), &counts).unwrap() > at_hat);
            }
        }
        // Scanning the ball on a coarse lattice never beats ξ̂.
        for i in -10..=10 {
            for j in -10..=10 {
                for k in -10..=10 {
                    let p = [i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0];
                    if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 && p.iter().all(|v| v.abs() < 1.0) {
                        assert!(negative_log_likelihood(&stokes(p), &counts).unwrap() >= at_hat);
                    }
                }
            }
        }
    }

    #[test]
    fn nll_and_divergence_share_minimizer() {
        let counts = CountRecord::from_pairs([(95, 5), (170, 30), (60, 40)]).unwrap();
        let (xi_hat, s) = temporal_estimate(&counts).unwrap();
        assert!(xi_hat.norm() > 1.0);
        let cfg = OracleConfig::default();
        let by_divergence = oracle_search(&xi_hat, &s, &cfg).unwrap();
        let by_likelihood = minimize_on_sphere(
            |x| negative_log_likelihood(&StokesVector::new_unchecked(x), &counts).unwrap_or(f64::INFINITY),
            &cfg,
        )
        .unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(by_divergence.point[i], by_likelihood.point[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn nll_shift_moves_minimizer_continuously() {
        let base = CountRecord::from_pairs([(95, 5), (90, 10), (70, 30)]).unwrap();
        let cfg = OracleConfig::default();
        let mut previous: Option<StokesVector> = None;
        for shift in 0..4u64 {
            let counts = CountRecord::new(base.n_plus.map(|n| n + shift), base.n_minus.map(|n| n + shift)).unwrap();
            let (xi_hat, s) = temporal_estimate(&counts).unwrap();
            let x = oracle_mle(&xi_hat, &s, &cfg).unwrap();
            if let Some(prev) = previous {
                assert!(x.max_abs_diff(&prev) < 0.05);
            }
            previous = Some(x);
        }
    }
}
