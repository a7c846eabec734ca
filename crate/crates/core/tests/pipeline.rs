use stokes_mle::oracle::{oracle_mle, OracleConfig};
use stokes_mle::projector::projection_trajectory;
use stokes_mle::simulator::{simulate, Mode, SimulationSpec};
use stokes_mle::{project_mle, temporal_estimate, CountRecord, Error, StokesVector, WeightVector};

#[test]
fn counts_to_mle() {
    let counts = CountRecord::from_pairs([(95, 5), (90, 10), (70, 30)]).unwrap();
    let (xi_hat, s) = temporal_estimate(&counts).unwrap();
    assert_eq!(xi_hat.components(), [0.9, 0.8, 0.4]);
    let result = project_mle(&xi_hat, &s).unwrap();
    assert!(result.was_projected);
    assert!((result.xi_star.norm_squared() - 1.0).abs() < 1e-10);
    let searched = oracle_mle(&xi_hat, &s, &OracleConfig::default()).unwrap();
    assert!(result.xi_star.max_abs_diff(&searched) < 1e-4);
}

#[test]
fn empty_axis_is_rejected() {
    let counts = CountRecord { n_plus: [3, 0, 1], n_minus: [1, 0, 1] };
    assert!(matches!(temporal_estimate(&counts), Err(Error::EmptyAxis { .. })));
}

#[test]
fn simulated_counts_recover_the_state() {
    let xi_true = StokesVector::new([0.3, -0.6, 0.5]).unwrap();
    let spec = SimulationSpec {
        xi_true,
        mode: Mode::Randomized { weights: WeightVector::from_ratios([2.0, 1.0, 1.0]).unwrap(), shots: 200_000 },
        seed: 5,
    };
    let counts = simulate(&spec).unwrap();
    assert_eq!(counts, simulate(&spec).unwrap());
    assert_eq!(counts.total(), 200_000);
    let (xi_hat, s) = temporal_estimate(&counts).unwrap();
    assert!((s[0] - 0.5).abs() < 0.01);
    let xi_star = project_mle(&xi_hat, &s).unwrap().xi_star;
    assert!(xi_star.max_abs_diff(&xi_true) < 0.01);
}

#[test]
fn trajectory_runs_from_origin_to_mle() {
    let xi_hat = StokesVector::new([-0.9, 0.7, 0.6]).unwrap();
    let s = WeightVector::from_ratios([1.0, 3.0, 2.0]).unwrap();
    let path = projection_trajectory(&xi_hat, &s, 25).unwrap();
    assert_eq!(path.len(), 25);
    assert_eq!(path[0].components(), [0.0; 3]);
    let end = project_mle(&xi_hat, &s).unwrap().xi_star;
    assert!(path[24].max_abs_diff(&end) < 1e-10);
    assert!(path.windows(2).all(|w| w[1].norm() >= w[0].norm()));
}
