//! Seeded invariant suites, runnable from the command line.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::infogeo::{
    canonical_divergence, dual_coordinates, fisher_information_expectation, fisher_information_numeric,
    fisher_metric, foliation_coordinates, foliation_orthogonality_defect, kl_divergence, log_partition,
    product_distribution, randomized_distribution, DIFF_STEP,
};
use crate::oracle::{oracle_mle, oracle_search, OracleConfig};
use crate::projector::{cubic_residual, cubic_solve, norm_residual_of_lambda, project_mle};
use crate::sampling;
use crate::simulator::{consistency_study, log_log_slope, simulate, Mode, SimulationSpec};
use crate::stokes::{temporal_estimate, StokesVector, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Infogeo,
    Projector,
    Simulator,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Infogeo, Suite::Projector, Suite::Simulator];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Infogeo => "infogeo",
            Suite::Projector => "projector",
            Suite::Simulator => "simulator",
        }
    }
}

/// One invariant's verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}::{} {}", self.suite, self.name, self.detail)
    }
}

struct Recorder {
    suite: &'static str,
    outcomes: Vec<CheckOutcome>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Self { suite: suite.name(), outcomes: Vec::new() }
    }

    /// Passes iff `worst < tolerance`.
    fn below(&mut self, name: &'static str, worst: f64, tolerance: f64) {
        self.outcomes.push(CheckOutcome {
            suite: self.suite,
            name,
            passed: worst < tolerance,
            detail: format!("worst {worst:.3e} (tolerance {tolerance:.0e})"),
        });
    }

    fn holds(&mut self, name: &'static str, passed: bool, detail: String) {
        self.outcomes.push(CheckOutcome { suite: self.suite, name, passed, detail });
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckOutcome>> {
    match suite {
        Suite::Infogeo => infogeo_suite(seed),
        Suite::Projector => projector_suite(seed),
        Suite::Simulator => simulator_suite(seed),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut outcomes = Vec::new();
    for suite in Suite::ALL {
        outcomes.extend(run_suite(suite, seed)?);
    }
    Ok(outcomes)
}

fn rng_for(suite: Suite, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite as u64);
    rng
}

fn infogeo_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng_for(Suite::Infogeo, seed);
    let mut rec = Recorder::new(Suite::Infogeo);

    let (mut negative, mut self_gap) = (0.0_f64, 0.0_f64);
    for _ in 0..300 {
        let s = sampling::weights(&mut rng);
        let p = randomized_distribution(&s, &sampling::interior_point(&mut rng))?;
        let q = randomized_distribution(&s, &sampling::interior_point(&mut rng))?;
        negative = negative.max(-kl_divergence(&p, &q)?);
        self_gap = self_gap.max(kl_divergence(&p, &p)?.abs());
    }
    rec.below("gibbs_nonnegative", negative.max(0.0), 1e-15);
    rec.below("gibbs_identity", self_gap, 1e-12);

    let mut divergence_gap = 0.0_f64;
    for k in 1..=3 {
        for _ in 0..1000 {
            let p = sampling::interior_vector(&mut rng, k);
            let q = sampling::interior_vector(&mut rng, k);
            let kl = kl_divergence(&product_distribution(&p)?, &product_distribution(&q)?)?;
            divergence_gap = divergence_gap.max((canonical_divergence(&p, &q)? - kl).abs());
        }
    }
    rec.below("canonical_divergence_equals_kl", divergence_gap, 1e-10);

    let (mut legendre, mut round_trip, mut gradient) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let xi = sampling::interior_vector(&mut rng, 3);
        let d = dual_coordinates(&xi)?;
        legendre = legendre.max(d.legendre_gap().abs());
        for (a, b) in d.stokes().iter().zip(&xi) {
            round_trip = round_trip.max((a - b).abs());
        }
        for i in 0..3 {
            let mut hi = d.theta.clone();
            let mut lo = d.theta.clone();
            hi[i] += DIFF_STEP;
            lo[i] -= DIFF_STEP;
            let numeric = (log_partition(&hi) - log_partition(&lo)) / (2.0 * DIFF_STEP);
            gradient = gradient.max((numeric - d.eta[i]).abs());
        }
    }
    rec.below("legendre_identity", legendre, 1e-10);
    rec.below("dual_round_trip", round_trip, 1e-12);
    rec.below("eta_is_gradient_of_psi", gradient, 1e-6);

    let (mut decomposition, mut pythagoras) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let (s, s_hat) = (sampling::weights(&mut rng), sampling::weights(&mut rng));
        let (xi, xi_hat) = (sampling::interior_point(&mut rng), sampling::interior_point(&mut rng));
        let whole = kl_divergence(&randomized_distribution(&s_hat, &xi_hat)?, &randomized_distribution(&s_hat, &xi)?)?;
        let mut marginals = 0.0;
        for i in 0..3 {
            marginals += s_hat[i]
                * kl_divergence(&product_distribution(&[xi_hat[i]])?, &product_distribution(&[xi[i]])?)?;
        }
        decomposition = decomposition.max((whole - marginals).abs());

        let across = kl_divergence(&randomized_distribution(&s_hat, &xi_hat)?, &randomized_distribution(&s, &xi)?)?;
        let slice = whole;
        let fibre = kl_divergence(&randomized_distribution(&s_hat, &xi)?, &randomized_distribution(&s, &xi)?)?;
        pythagoras = pythagoras.max((across - slice - fibre).abs());
    }
    rec.below("slice_divergence_decomposition", decomposition, 1e-12);
    rec.below("pythagorean_split", pythagoras, 1e-10);

    let (mut expectation_gap, mut numeric_gap, mut off_diagonal) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let (xi, s) = (sampling::interior_point(&mut rng), sampling::weights(&mut rng));
        let analytic = fisher_metric(&xi, &s)?;
        let expectation = fisher_information_expectation(&xi, &s)?;
        let numeric = fisher_information_numeric(&xi, &s)?;
        for i in 0..3 {
            for j in 0..3 {
                expectation_gap = expectation_gap.max((analytic[i][j] - expectation[i][j]).abs());
                numeric_gap = numeric_gap.max((analytic[i][j] - numeric[i][j]).abs());
                if i != j {
                    off_diagonal = off_diagonal.max(numeric[i][j].abs());
                }
            }
        }
    }
    rec.below("fisher_matches_expectation", expectation_gap, 1e-8);
    rec.below("fisher_matches_numeric", numeric_gap, 1e-8);
    rec.below("fisher_numeric_off_diagonal", off_diagonal, 1e-8);

    let (mut orthogonality, mut tail_drift) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let (xi, s) = (sampling::interior_point(&mut rng), sampling::weights(&mut rng));
        orthogonality = orthogonality.max(foliation_orthogonality_defect(&s, &xi)?);
        let a = foliation_coordinates(&s, &xi)?;
        let b = foliation_coordinates(&sampling::weights(&mut rng), &xi)?;
        for i in 2..5 {
            tail_drift = tail_drift.max((a.theta[i] - b.theta[i]).abs());
        }
    }
    rec.below("foliation_orthogonality", orthogonality, 1e-8);
    rec.below("foliation_theta_independent_of_weights", tail_drift, 1e-12);

    Ok(rec.outcomes)
}

/// Two unit tangents at `normal` on the unit sphere, by Gram–Schmidt.
pub fn sphere_tangents(normal: [f64; 3]) -> [[f64; 3]; 2] {
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let n_len = dot(normal, normal).sqrt();
    let n = normal.map(|v| v / n_len);
    // Start from the two basis vectors least aligned with the normal.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()));
    let mut tangents = [[0.0; 3]; 2];
    for (slot, &axis) in order[..2].iter().enumerate() {
        let mut t = [0.0; 3];
        t[axis] = 1.0;
        let along = dot(t, n);
        t = std::array::from_fn(|i| t[i] - along * n[i]);
        for prev in &tangents[..slot] {
            let c = dot(t, *prev);
            t = std::array::from_fn(|i| t[i] - c * prev[i]);
        }
        let len = dot(t, t).sqrt();
        tangents[slot] = t.map(|v| v / len);
    }
    tangents
}

/// Largest |g(ξ̂ − ξ*, t)| over the two sphere tangents t at ξ*, with g the
/// Fisher metric at ξ*. `None` when some |ξ*ᵢ| = 1.
pub fn projection_orthogonality_defect(xi_hat: &StokesVector, xi_star: &StokesVector, s: &WeightVector) -> Option<f64> {
    let g = fisher_metric(xi_star, s).ok()?;
    let v: [f64; 3] = std::array::from_fn(|i| xi_hat[i] - xi_star[i]);
    let defect = sphere_tangents(xi_star.components())
        .iter()
        .map(|t| (0..3).map(|i| g[i][i] * v[i] * t[i]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    Some(defect)
}

fn projector_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = rng_for(Suite::Projector, seed);
    let mut rec = Recorder::new(Suite::Projector);

    let (mut norm, mut equation, mut violations) = (0.0_f64, 0.0_f64, 0usize);
    let mut shrink_ok = true;
    let (mut orthogonality, mut skipped) = (0.0_f64, 0usize);
    let (mut permutation, mut sign_ok) = (0.0_f64, true);
    for _ in 0..1000 {
        let (xi_hat, s) = (sampling::exterior_point(&mut rng), sampling::weights(&mut rng));
        let r = project_mle(&xi_hat, &s)?;
        norm = norm.max(r.norm_residual);
        equation = equation.max(r.max_equation_residual());
        violations += r.monotonicity_violations;
        for i in 0..3 {
            let (hat, star) = (xi_hat[i], r.xi_star[i]);
            shrink_ok &= if hat == 0.0 { star == 0.0 } else { hat.signum() == star.signum() && star.abs() < hat.abs() };
        }
        match projection_orthogonality_defect(&xi_hat, &r.xi_star, &s) {
            Some(d) => orthogonality = orthogonality.max(d),
            None => skipped += 1,
        }
        let (c, w) = (xi_hat.components(), s.components());
        let p = project_mle(&StokesVector::new([c[1], c[2], c[0]])?, &WeightVector::new([w[1], w[2], w[0]])?)?;
        for i in 0..3 {
            permutation = permutation.max((p.xi_star[i] - r.xi_star[(i + 1) % 3]).abs());
        }
        let flipped = project_mle(&StokesVector::new([-c[0], c[1], c[2]])?, &s)?;
        sign_ok &= flipped.xi_star[0] == -r.xi_star[0];
    }
    rec.below("norm_residual", norm, 1e-10);
    rec.below("equation_residuals", equation, 1e-10);
    rec.holds("lambda_monotone", violations == 0, format!("{violations} monotonicity violations"));
    rec.holds("shrinkage", shrink_ok, "sign preserved, magnitude reduced".into());
    rec.below("fisher_orthogonality", orthogonality, 1e-8);
    rec.holds("fisher_orthogonality_coverage", skipped == 0, format!("{skipped} singular points skipped"));
    rec.below("permutation_equivariance", permutation, 1e-12);
    rec.holds("sign_equivariance", sign_ok, "flipping xi_hat_1 flips xi_star_1".into());

    let mut optimality_slack = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (xi_hat, s) = (sampling::exterior_point(&mut rng), sampling::weights(&mut rng));
        let xi_star = project_mle(&xi_hat, &s)?.xi_star;
        let best = kl_divergence(&randomized_distribution(&s, &xi_hat)?, &randomized_distribution(&s, &xi_star)?)?;
        for _ in 0..200 {
            let r = StokesVector::new(sampling::sphere_point(&mut rng))?;
            if !r.is_interior() {
                continue;
            }
            let other = kl_divergence(&randomized_distribution(&s, &xi_hat)?, &randomized_distribution(&s, &r)?)?;
            optimality_slack = optimality_slack.max(best - other);
        }
    }
    rec.below("global_optimality", optimality_slack, 1e-12);

    let mut cubic = 0.0_f64;
    for i in 0..=60 {
        let mu = 10f64.powf(-6.0 + 12.0 * i as f64 / 60.0);
        for j in 0..=40 {
            let a = -1.0 + 2.0 * j as f64 / 40.0;
            let x = cubic_solve(mu, a)?;
            cubic = cubic.max(cubic_residual(mu, a, x).abs() / (1.0 + mu));
        }
    }
    rec.below("cubic_scaled_residual", cubic, 1e-12);

    let mut monotone = true;
    for _ in 0..20 {
        let (xi_hat, s) = (sampling::exterior_point(&mut rng), sampling::weights(&mut rng));
        let mut previous = f64::NEG_INFINITY;
        for k in 0..200 {
            let value = norm_residual_of_lambda(10f64.powf(-4.0 + 10.0 * k as f64 / 199.0), &s, &xi_hat)?;
            monotone &= value >= previous - 1e-15;
            previous = value;
        }
    }
    rec.holds("norm_residual_increasing", monotone, "sampled on a log grid".into());

    let cfg = OracleConfig::default();
    let mut agreement = 0.0_f64;
    let mut refinement_monotone = true;
    for _ in 0..100 {
        let (xi_hat, s) = (sampling::exterior_point(&mut rng), sampling::weights(&mut rng));
        let oracle = oracle_mle(&xi_hat, &s, &cfg)?;
        agreement = agreement.max(oracle.max_abs_diff(&project_mle(&xi_hat, &s)?.xi_star));
    }
    for _ in 0..5 {
        let (xi_hat, s) = (sampling::exterior_point(&mut rng), sampling::weights(&mut rng));
        let history = oracle_search(&xi_hat, &s, &cfg)?.history;
        refinement_monotone &= history.windows(2).all(|w| w[1] <= w[0]);
    }
    rec.below("oracle_agreement", agreement, 1e-4);
    rec.holds("oracle_refinement_monotone", refinement_monotone, "incumbent never worsens".into());

    Ok(rec.outcomes)
}

fn simulator_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rec = Recorder::new(Suite::Simulator);

    let spec = SimulationSpec {
        xi_true: StokesVector::new([0.3, -0.2, 0.5])?,
        mode: Mode::Randomized { weights: WeightVector::new([0.5, 0.3, 0.2])?, shots: 300_000 },
        seed,
    };
    let counts = simulate(&spec)?;
    rec.holds("reproducible", counts == simulate(&spec)?, "same seed, same counts".into());

    let mut worst_sigma = 0.0_f64;
    for axis in 0..3 {
        let share = [0.5, 0.3, 0.2][axis];
        let sd = (share * (1.0 - share) / 300_000.0_f64).sqrt();
        let observed = counts.axis_total(axis) as f64 / 300_000.0;
        worst_sigma = worst_sigma.max((observed - share).abs() / sd);
    }
    rec.below("axis_frequency_sigmas", worst_sigma, 5.0);

    let standard = SimulationSpec {
        xi_true: StokesVector::ORIGIN,
        mode: Mode::Standard { shots_per_axis: 1_000_000 },
        seed,
    };
    let (xi_hat, _) = temporal_estimate(&simulate(&standard)?)?;
    let spread = xi_hat.components().iter().map(|v| v.abs()).fold(0.0, f64::max);
    rec.below("unbiased_concentration", spread, 0.01);

    let xi_true = StokesVector::pure([1.0, 1.0, 1.0])?;
    let points = consistency_study(
        &xi_true,
        |shots| Mode::Randomized { weights: WeightVector::uniform(), shots },
        &[100, 1_000, 10_000, 100_000],
        100,
        seed,
    )?;
    let slope = log_log_slope(&points.iter().map(|p| (p.shots, p.rmse)).collect::<Vec<_>>());
    rec.below("consistency_slope_deviation", (slope + 0.5).abs(), 0.15);
    let decreasing = points.windows(2).all(|w| w[1].median_error < w[0].median_error);
    rec.holds("median_error_decreasing", decreasing, format!("slope {slope:.3}"));

    Ok(rec.outcomes)
}
