//! Maximum-likelihood correction of an unphysical temporal estimate.
//!
//! When ‖ξ̂‖ > 1 the MLE ξ* is the Fisher-orthogonal projection of ξ̂ onto the
//! Bloch sphere. It solves
//!
//! ```text
//! ξ*ᵢ (1 − ξ*ᵢ²) = λ ŝᵢ (ξ̂ᵢ − ξ*ᵢ),   i = 1, 2, 3,    ‖ξ*‖ = 1,   λ > 0.
//! ```
//!
//! For fixed λ each equation is a cubic in ξ*ᵢ with a single root in (−1, 1),
//! available in closed (trigonometric) form. What remains is a scalar root
//! find for λ on the norm condition.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stokes::{norm_squared, StokesVector, WeightVector};

/// Lower end of the initial λ bracket.
pub const LAMBDA_LOWER: f64 = 1e-12;
/// Absolute tolerance on Σᵢ x(λŝᵢ, ξ̂ᵢ)² − 1.
pub const LAMBDA_TOLERANCE: f64 = 1e-12;
pub const MAX_LAMBDA_ITERATIONS: usize = 200;
pub const MAX_BRACKET_DOUBLINGS: usize = 200;
/// Residual bound every projected result satisfies.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;
/// Slack below zero tolerated on the arctan radicand.
const RADICAND_SLACK: f64 = 1e-12;

/// x(1 − x²) − μ(a − x)
pub fn cubic_residual(mu: f64, a: f64, x: f64) -> f64 {
    x * (1.0 - x * x) - mu * (a - x)
}

/// The unique root in [−1, 1] of x(1 − x²) = μ(a − x), for μ > 0 and |a| ≤ 1.
///
/// Evaluates the trigonometric closed form, then applies at most a few
/// guarded Newton steps. The root has the sign of `a`, and `a = 0` gives
/// exactly 0. At |a| = 1 with μ ≥ 2 the root is the boundary value ±1.
pub fn cubic_solve(mu: f64, a: f64) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain { name: "mu", value: mu });
    }
    if a.is_nan() || a.abs() > 1.0 {
        return Err(Error::Domain { name: "a", value: a });
    }
    if a == 0.0 {
        return Ok(0.0);
    }

    let shifted = mu + 1.0;
    let mut radicand = 4.0 * shifted.powi(3) / (27.0 * mu * mu * a * a) - 1.0;
    if radicand < 0.0 {
        if radicand < -RADICAND_SLACK {
            return Err(Error::Numerical(format!(
                "negative arctan radicand {radicand:e} at mu = {mu}, a = {a}"
            )));
        }
        radicand = 0.0;
    }
    let amplitude = 2.0 * shifted.sqrt() / 3f64.sqrt();
    let angle = (PI + radicand.sqrt().atan()) / 3.0;
    let mut x = (amplitude * angle.cos()).copysign(a).clamp(-1.0, 1.0);

    let mut residual = cubic_residual(mu, a, x).abs();
    for _ in 0..3 {
        let slope = 1.0 - 3.0 * x * x + mu;
        if residual == 0.0 || slope == 0.0 {
            break;
        }
        let candidate = x - cubic_residual(mu, a, x) / slope;
        let candidate_residual = cubic_residual(mu, a, candidate).abs();
        if !(candidate.abs() <= 1.0 && candidate_residual < residual) {
            break;
        }
        x = candidate;
        residual = candidate_residual;
    }
    Ok(x)
}

fn corrected_components(lambda: f64, s: &WeightVector, xi_hat: &StokesVector) -> Result<[f64; 3]> {
    let mut x = [0.0; 3];
    for (axis, out) in x.iter_mut().enumerate() {
        *out = cubic_solve(lambda * s[axis], xi_hat[axis])?;
    }
    Ok(x)
}

fn residual_unchecked(lambda: f64, s: &WeightVector, xi_hat: &StokesVector) -> Result<f64> {
    let x = corrected_components(lambda, s, xi_hat)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>() - 1.0)
}

fn require_exterior(xi_hat: &StokesVector) -> Result<()> {
    let norm_squared = norm_squared(xi_hat);
    if norm_squared <= 1.0 {
        return Err(Error::InsideBall { norm_squared });
    }
    Ok(())
}

/// Σᵢ x(λŝᵢ, ξ̂ᵢ)² − 1, increasing from −1 (λ → 0⁺) to ‖ξ̂‖² − 1 (λ → ∞).
pub fn norm_residual_of_lambda(lambda: f64, s: &WeightVector, xi_hat: &StokesVector) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain { name: "lambda", value: lambda });
    }
    require_exterior(xi_hat)?;
    residual_unchecked(lambda, s, xi_hat)
}

/// Outcome of the λ root find.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRoot {
    pub lambda: f64,
    /// Norm residual at `lambda`.
    pub residual: f64,
    /// Bracket doublings plus bisection steps.
    pub iterations: usize,
    /// Pairs of evaluated points whose residuals decrease as λ grows. Always
    /// zero when the residual is monotone, which the uniqueness of λ* needs.
    pub monotonicity_violations: usize,
}

/// Records (λ, residual) samples and counts monotonicity violations.
#[derive(Default)]
struct Samples(Vec<(f64, f64)>);

impl Samples {
    fn push(&mut self, lambda: f64, residual: f64) {
        self.0.push((lambda, residual));
    }

    fn violations(mut self) -> usize {
        self.0.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.0
            .windows(2)
            .filter(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1 - LAMBDA_TOLERANCE)
            .count()
    }
}

/// Finds the unique λ* > 0 at which the corrected point lies on the sphere.
///
/// Starts from the bracket [1e−12, 1], doubling the upper end until the norm
/// residual turns positive, then bisects to an absolute residual of 1e−12
/// and finishes with one secant step.
pub fn solve_lambda(s: &WeightVector, xi_hat: &StokesVector) -> Result<LambdaRoot> {
    require_exterior(xi_hat)?;
    let f = |lambda: f64| residual_unchecked(lambda, s, xi_hat);
    let mut samples = Samples::default();

    let mut lo = LAMBDA_LOWER;
    let mut r_lo = f(lo)?;
    samples.push(lo, r_lo);
    if r_lo >= 0.0 {
        return Err(Error::Numerical(format!(
            "norm residual {r_lo} is not negative at the lower bracket"
        )));
    }

    let mut hi = 1.0;
    let mut r_hi = f(hi)?;
    samples.push(hi, r_hi);
    let mut iterations = 0;
    while r_hi <= 0.0 {
        if iterations == MAX_BRACKET_DOUBLINGS {
            return Err(Error::Numerical(format!(
                "no sign change after {MAX_BRACKET_DOUBLINGS} bracket doublings"
            )));
        }
        lo = hi;
        r_lo = r_hi;
        hi *= 2.0;
        r_hi = f(hi)?;
        samples.push(hi, r_hi);
        iterations += 1;
    }

    let mut best = if r_hi.abs() < r_lo.abs() { (hi, r_hi) } else { (lo, r_lo) };
    let mut bisections = 0;
    while best.1.abs() >= LAMBDA_TOLERANCE && bisections < MAX_LAMBDA_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r_mid = f(mid)?;
        samples.push(mid, r_mid);
        bisections += 1;
        if r_mid.abs() < best.1.abs() {
            best = (mid, r_mid);
        }
        if r_mid < 0.0 {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }

    if r_hi != r_lo {
        let secant = lo - r_lo * (hi - lo) / (r_hi - r_lo);
        if secant > lo && secant < hi {
            let r_secant = f(secant)?;
            samples.push(secant, r_secant);
            if r_secant.abs() < best.1.abs() {
                best = (secant, r_secant);
            }
        }
    }

    Ok(LambdaRoot {
        lambda: best.0,
        residual: best.1,
        iterations: iterations + bisections,
        monotonicity_violations: samples.violations(),
    })
}

/// The maximum-likelihood estimate together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResult {
    pub xi_star: StokesVector,
    /// λ*, present only when a projection happened.
    pub lambda_star: Option<f64>,
    /// |‖ξ*‖² − 1|
    pub norm_residual: f64,
    /// |ξ*ᵢ(1 − ξ*ᵢ²) − λ*ŝᵢ(ξ̂ᵢ − ξ*ᵢ)|, zero when not projected.
    pub equation_residuals: [f64; 3],
    pub iterations: usize,
    pub was_projected: bool,
    pub monotonicity_violations: usize,
}

impl ProjectionResult {
    pub fn max_equation_residual(&self) -> f64 {
        self.equation_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Maps a temporal estimate to the MLE over the Bloch ball.
///
/// Points with ‖ξ̂‖² ≤ 1 are already the MLE and come back unchanged.
pub fn project_mle(xi_hat: &StokesVector, s: &WeightVector) -> Result<ProjectionResult> {
    let norm_sq = norm_squared(xi_hat);
    if norm_sq <= 1.0 {
        return Ok(ProjectionResult {
            xi_star: *xi_hat,
            lambda_star: None,
            norm_residual: (norm_sq - 1.0).abs(),
            equation_residuals: [0.0; 3],
            iterations: 0,
            was_projected: false,
            monotonicity_violations: 0,
        });
    }

    let root = solve_lambda(s, xi_hat)?;
    let x = corrected_components(root.lambda, s, xi_hat)?;
    let equation_residuals =
        std::array::from_fn(|i| cubic_residual(root.lambda * s[i], xi_hat[i], x[i]).abs());
    let result = ProjectionResult {
        xi_star: StokesVector::new_unchecked(x),
        lambda_star: Some(root.lambda),
        norm_residual: (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs(),
        equation_residuals,
        iterations: root.iterations,
        was_projected: true,
        monotonicity_violations: root.monotonicity_violations,
    };
    if !(result.norm_residual < PROJECTION_TOLERANCE
        && result.max_equation_residual() < PROJECTION_TOLERANCE)
    {
        return Err(Error::Numerical(format!(
            "projection residuals too large: norm {:e}, equations {:?}",
            result.norm_residual, result.equation_residuals
        )));
    }
    Ok(result)
}

/// The path λ ↦ (x(λŝᵢ, ξ̂ᵢ))ᵢ for λ evenly spaced on [0, λ*].
///
/// The first point is the origin (the λ → 0 limit) and the last is ξ*.
pub fn projection_trajectory(
    xi_hat: &StokesVector,
    s: &WeightVector,
    n_samples: usize,
) -> Result<Vec<StokesVector>> {
    if n_samples < 2 {
        return Err(Error::Domain { name: "n_samples", value: n_samples as f64 });
    }
    require_exterior(xi_hat)?;
    let lambda_star = solve_lambda(s, xi_hat)?.lambda;
    let last = n_samples - 1;
    (0..n_samples)
        .map(|k| {
            if k == 0 {
                return Ok(StokesVector::ORIGIN);
            }
            let lambda = if k == last { lambda_star } else { lambda_star * k as f64 / last as f64 };
            corrected_components(lambda, s, xi_hat).map(StokesVector::new_unchecked)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Bracketing bisection on (−1, 1), independent of the closed form.
    fn bisection_root(mu: f64, a: f64) -> f64 {
        let f = |x: f64| cubic_residual(mu, a, x);
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn stokes(x: [f64; 3]) -> StokesVector {
        StokesVector::new(x).unwrap()
    }

    #[test]
    fn cubic_zero_axis() {
        for mu in [1e-6, 0.3, 1.0, 2.0, 1e6] {
            assert_eq!(cubic_solve(mu, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn cubic_frozen_values() {
        // Reference values from a 40-digit bisection.
        let x = cubic_solve(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(x, 0.2586520225041528, epsilon = 1e-12);
        assert_abs_diff_eq!(x, 0.2586, epsilon = 1e-3);
        assert_abs_diff_eq!(x, bisection_root(1.0, 0.5), epsilon = 1e-14);

        let x = cubic_solve(1000.0, 0.7).unwrap();
        assert_abs_diff_eq!(x, 0.6996428323990763, epsilon = 1e-12);
        assert!((x - 0.7).abs() < 1e-3);
    }

    #[test]
    fn cubic_radicand_zero() {
        let x = cubic_solve(2.0, 1.0).unwrap();
        assert!(cubic_residual(2.0, 1.0, x).abs() < 1e-12);
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-7);
        let y = cubic_solve(2.0, -1.0).unwrap();
        assert_eq!(y, -x);
    }

    #[test]
    fn cubic_boundary_below_two() {
        // For a = 1, μ < 2 the interior root is (√(1+4μ) − 1)/2.
        let mu = 0.75;
        let x = cubic_solve(mu, 1.0).unwrap();
        assert_abs_diff_eq!(x, ((1.0f64 + 4.0 * mu).sqrt() - 1.0) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn cubic_domain_errors() {
        assert!(matches!(cubic_solve(0.0, 0.5), Err(Error::Domain { name: "mu", .. })));
        assert!(matches!(cubic_solve(-1.0, 0.5), Err(Error::Domain { name: "mu", .. })));
        assert!(matches!(cubic_solve(1.0, 1.5), Err(Error::Domain { name: "a", .. })));
        assert!(cubic_solve(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn cubic_grid_residuals() {
        for i in 0..=120 {
            let mu = 10f64.powf(-6.0 + 12.0 * i as f64 / 120.0);
            for j in 0..=80 {
                let a = -1.0 + 2.0 * j as f64 / 80.0;
                let x = cubic_solve(mu, a).unwrap();
                let scaled = cubic_residual(mu, a, x).abs() / (1.0 + mu);
                assert!(scaled < 1e-12, "mu={mu} a={a} x={x} residual={scaled:e}");
                if a != 0.0 {
                    assert_eq!(x.signum(), a.signum());
                    assert!(x.abs() <= a.abs());
                }
                if a.abs() < 1.0 && a != 0.0 {
                    assert!(x.abs() < a.abs(), "mu={mu} a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn residual_limits() {
        let xi = stokes([0.8, 0.8, 0.8]);
        let s = WeightVector::uniform();
        assert_abs_diff_eq!(norm_residual_of_lambda(1e-12, &s, &xi).unwrap(), -1.0, epsilon = 1e-12);
        let far = norm_residual_of_lambda(1e6, &s, &xi).unwrap();
        assert_abs_diff_eq!(far, 0.92, epsilon = 1e-4);
        assert!(norm_residual_of_lambda(0.0, &s, &xi).is_err());
        assert!(matches!(
            norm_residual_of_lambda(1.0, &s, &stokes([0.5, 0.5, 0.5])),
            Err(Error::InsideBall { .. })
        ));
    }

    #[test]
    fn symmetric_lambda() {
        let xi = stokes([0.8, 0.8, 0.8]);
        let s = WeightVector::uniform();
        let root = solve_lambda(&s, &xi).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let expected = r * (2.0 / 3.0) / ((1.0 / 3.0) * (0.8 - r));
        assert_abs_diff_eq!(root.lambda, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(root.lambda, 5.186175317511091, epsilon = 1e-9);
        assert!(root.residual.abs() < 1e-12);
        assert_eq!(root.monotonicity_violations, 0);
        assert!(norm_residual_of_lambda(root.lambda, &s, &xi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lambda_for_boundary_component() {
        let root = solve_lambda(&WeightVector::uniform(), &stokes([1.0, 0.3, 0.0])).unwrap();
        assert!(root.residual.abs() < 1e-12);
        assert!(root.lambda > 0.0);
    }

    #[test]
    fn lambda_single_sign_change() {
        let xi = stokes([0.9, 0.8, 0.5]);
        let s = WeightVector::uniform();
        let root = solve_lambda(&s, &xi).unwrap();
        let grid: Vec<f64> = (0..2000)
            .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 1999.0))
            .map(|l| norm_residual_of_lambda(l, &s, &xi).unwrap())
            .collect();
        let changes = grid.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        assert_eq!(changes, 1);
        assert!(grid.windows(2).all(|w| w[1] >= w[0]));
        assert!(root.lambda > 0.0 && root.monotonicity_violations == 0);
    }

    #[test]
    fn solve_lambda_rejects_interior() {
        assert!(solve_lambda(&WeightVector::uniform(), &stokes([0.6, 0.0, 0.3])).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = WeightVector::uniform();
        let interior = stokes([0.6, 0.0, 0.3]);
        let r = project_mle(&interior, &s).unwrap();
        assert!(!r.was_projected);
        assert_eq!(r.xi_star, interior);
        assert_eq!(r.lambda_star, None);

        let r = project_mle(&stokes([0.8, 0.8, 0.8]), &s).unwrap();
        assert!(r.was_projected);
        for v in r.xi_star.components() {
            assert_abs_diff_eq!(v, 1.0 / 3f64.sqrt(), epsilon = 1e-10);
        }

        let r = project_mle(&stokes([1.0, 0.3, 0.0]), &s).unwrap();
        assert_eq!(r.xi_star[2], 0.0);
        assert!(r.xi_star[0] > 0.0 && r.xi_star[1] > 0.0);
        assert_abs_diff_eq!(r.xi_star[0].powi(2) + r.xi_star[1].powi(2), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn unit_norm_point_is_not_projected() {
        let r = project_mle(&stokes([1.0, 0.0, 0.0]), &WeightVector::uniform()).unwrap();
        assert!(!r.was_projected);
        let r = project_mle(&stokes([0.6, 0.8, 0.0]), &WeightVector::uniform()).unwrap();
        assert!(!r.was_projected || r.norm_residual < 1e-10);
    }

    #[test]
    fn two_boundary_components() {
        let r = project_mle(&stokes([1.0, -1.0, 0.0]), &WeightVector::uniform()).unwrap();
        assert_abs_diff_eq!(r.xi_star[0], 0.5f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(r.xi_star[1], -(0.5f64.sqrt()), epsilon = 1e-10);
        assert_eq!(r.xi_star[2], 0.0);
    }

    #[test]
    fn trajectory_endpoints() {
        let xi = stokes([0.9, 0.8, 0.0]);
        let s = WeightVector::uniform();
        let path = projection_trajectory(&xi, &s, 25).unwrap();
        assert_eq!(path.len(), 25);
        assert_eq!(path[0], StokesVector::ORIGIN);
        let end = project_mle(&xi, &s).unwrap().xi_star;
        assert!(path[24].max_abs_diff(&end) < 1e-10);
        assert!(path.iter().all(|p| p[2] == 0.0));
        // The path moves outwards monotonically.
        assert!(path.windows(2).all(|w| w[1].norm() >= w[0].norm()));
        assert!(projection_trajectory(&xi, &s, 1).is_err());
        assert!(projection_trajectory(&stokes([0.1, 0.0, 0.0]), &s, 5).is_err());
    }

    fn exterior() -> impl Strategy<Value = StokesVector> {
        prop::array::uniform3(-1.0f64..=1.0)
            .prop_filter("outside the ball", |x| x.iter().map(|v| v * v).sum::<f64>() > 1.0)
            .prop_map(|x| StokesVector::new(x).unwrap())
    }

    fn weights() -> impl Strategy<Value = WeightVector> {
        prop::array::uniform3(0.01f64..1.0).prop_map(|r| WeightVector::from_ratios(r).unwrap())
    }

    proptest! {
        #[test]
        fn projection_satisfies_equations(xi in exterior(), s in weights()) {
            let r = project_mle(&xi, &s).unwrap();
            prop_assert!(r.was_projected);
            prop_assert!(r.norm_residual < 1e-10);
            prop_assert!(r.max_equation_residual() < 1e-10);
            prop_assert!(r.lambda_star.unwrap() > 0.0);
            prop_assert_eq!(r.monotonicity_violations, 0);
        }

        #[test]
        fn projection_shrinks_towards_origin(xi in exterior(), s in weights()) {
            let r = project_mle(&xi, &s).unwrap();
            for axis in 0..3 {
                let (hat, star) = (xi[axis], r.xi_star[axis]);
                if hat == 0.0 {
                    prop_assert_eq!(star, 0.0);
                } else {
                    prop_assert_eq!(hat.signum(), star.signum());
                    prop_assert!(star.abs() < hat.abs());
                }
            }
        }

        #[test]
        fn projection_is_equivariant(xi in exterior(), s in weights(), flip in 0usize..3) {
            let r = project_mle(&xi, &s).unwrap();
            let c = xi.components();
            let w = s.components();
            let permuted = project_mle(
                &StokesVector::new([c[2], c[0], c[1]]).unwrap(),
                &WeightVector::new([w[2], w[0], w[1]]).unwrap(),
            ).unwrap();
            let p = permuted.xi_star;
            prop_assert!((p[0] - r.xi_star[2]).abs() < 1e-12);
            prop_assert!((p[1] - r.xi_star[0]).abs() < 1e-12);
            prop_assert!((p[2] - r.xi_star[1]).abs() < 1e-12);

            let mut flipped = c;
            flipped[flip] = -flipped[flip];
            let f = project_mle(&StokesVector::new(flipped).unwrap(), &s).unwrap();
            prop_assert_eq!(f.xi_star[flip], -r.xi_star[flip]);
        }

        #[test]
        fn residual_is_increasing(xi in exterior(), s in weights()) {
            let values: Vec<f64> = (0..200)
                .map(|i| 10f64.powf(-4.0 + 10.0 * i as f64 / 199.0))
                .map(|l| norm_residual_of_lambda(l, &s, &xi).unwrap())
                .collect();
            prop_assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        }
    }
}
