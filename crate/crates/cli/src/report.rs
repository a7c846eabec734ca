//! The JSON estimate report.
//!
//! Floating-point values are written in scientific notation with 17
//! significant digits, so every double survives a round trip unchanged.

use serde::Serialize;
use serde_json::value::RawValue;
use stokes_mle::oracle::empirical_divergence;
use stokes_mle::{ProjectionResult, StokesVector, WeightVector};

/// 17 significant digits; non-finite values become `null`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

type Raw = Box<RawValue>;

fn number(x: f64) -> Raw {
    RawValue::from_string(format_number(x)).expect("formatted float is valid JSON")
}

fn numbers(xs: [f64; 3]) -> [Raw; 3] {
    xs.map(number)
}

#[derive(Serialize)]
struct OracleJson {
    xi_star: [Raw; 3],
    max_discrepancy: Raw,
}

#[derive(Serialize)]
struct ReportJson {
    xi_hat: [Raw; 3],
    weights: [Raw; 3],
    norm_xi_hat: Raw,
    was_projected: bool,
    xi_star: [Raw; 3],
    lambda_star: Option<Raw>,
    norm_residual: Raw,
    equation_residuals: [Raw; 3],
    iterations: usize,
    kl_divergence: Raw,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleJson>,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleCheck {
    pub xi_star: StokesVector,
    pub max_discrepancy: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateReport {
    pub xi_hat: StokesVector,
    pub weights: WeightVector,
    pub projection: ProjectionResult,
    pub oracle: Option<OracleCheck>,
}

impl EstimateReport {
    /// D(empirical ‖ MLE) over the six randomized-tomography outcomes.
    pub fn kl_divergence(&self) -> f64 {
        empirical_divergence(&self.xi_hat, &self.weights, self.projection.xi_star.components())
    }

    pub fn to_json(&self) -> String {
        let p = &self.projection;
        let json = ReportJson {
            xi_hat: numbers(self.xi_hat.components()),
            weights: numbers(self.weights.components()),
            norm_xi_hat: number(self.xi_hat.norm()),
            was_projected: p.was_projected,
            xi_star: numbers(p.xi_star.components()),
            lambda_star: p.lambda_star.map(number),
            norm_residual: number(p.norm_residual),
            equation_residuals: numbers(p.equation_residuals),
            iterations: p.iterations,
            kl_divergence: number(self.kl_divergence()),
            oracle: self.oracle.map(|o| OracleJson {
                xi_star: numbers(o.xi_star.components()),
                max_discrepancy: number(o.max_discrepancy),
            }),
        };
        let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
        text.push('\n');
        text
    }
}
