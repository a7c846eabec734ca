use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Maximum-likelihood qubit tomography on the Bloch sphere.
#[derive(Debug, Parser)]
#[command(name = "stokes-mle", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the state from a counts file (JSON or CSV).
    Estimate(EstimateArgs),
    /// Draw synthetic counts and emit them as a counts file.
    Simulate(SimulateArgs),
    /// Time the closed-form projection against the direct-search oracle.
    Bench(BenchArgs),
    /// Emit projection trajectories as CSV.
    Trajectories(TrajectoryArgs),
    /// Run the invariant suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Auto,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Counts file; standard input when omitted.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    /// Also run the direct-search oracle and report the discrepancy.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulationMode {
    Standard,
    Randomized,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// True Stokes vector, e.g. `1,0,0`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub xi: [f64; 3],
    #[arg(long, value_enum, default_value_t = SimulationMode::Standard)]
    pub mode: SimulationMode,
    /// Shots per axis (standard) or in total (randomized).
    #[arg(long = "N", value_name = "N")]
    pub shots: u64,
    /// Axis selection ratios for randomized mode, normalized to sum to one.
    #[arg(long, value_parser = parse_triple)]
    pub s: Option<[f64; 3]>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    Xi1xi2,
    Xi1xi3,
    Xi2xi3,
}

impl Plane {
    /// The two axes spanning the plane.
    pub fn axes(self) -> (usize, usize) {
        match self {
            Plane::Xi1xi2 => (0, 1),
            Plane::Xi1xi3 => (0, 2),
            Plane::Xi2xi3 => (1, 2),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum, default_value_t = Plane::Xi1xi2)]
    pub plane: Plane,
    /// Start points are the exterior nodes of a (grid+1)² lattice on [-1, 1]².
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid: u64,
    /// Weight ratios, normalized to sum to one.
    #[arg(long, value_parser = parse_triple, default_value = "1,1,1")]
    pub s: [f64; 3],
    /// Samples along each trajectory, including both endpoints.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    /// A single start point instead of the lattice.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub start: Option<[f64; 3]>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    All,
    Infogeo,
    Projector,
    Simulator,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
    pub suite: SuiteChoice,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Parses `a,b,c` into three finite numbers.
pub fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got \"{text}\""));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        let value: f64 = part.parse().map_err(|_| format!("\"{part}\" is not a number"))?;
        if !value.is_finite() {
            return Err(format!("\"{part}\" is not finite"));
        }
        *slot = value;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn triples() {
        assert_eq!(parse_triple("1, -0.5,2e-1").unwrap(), [1.0, -0.5, 0.2]);
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,x,2").is_err());
        assert!(parse_triple("1,inf,2").is_err());
    }
}
