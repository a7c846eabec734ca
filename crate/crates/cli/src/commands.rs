//! Subcommand implementations. Each writes its primary output to `out` and
//! diagnostics to `err`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use stokes_mle::bench::{run_bench, AGREEMENT_TOLERANCE};
use stokes_mle::oracle::{oracle_mle, OracleConfig};
use stokes_mle::projector::projection_trajectory;
use stokes_mle::simulator::{simulate, Mode, SimulationSpec};
use stokes_mle::suite::{run_all, run_suite, Suite};
use stokes_mle::{project_mle, temporal_estimate, StokesVector, WeightVector};

use crate::cli::{
    BenchArgs, CheckArgs, Command, EstimateArgs, InputFormat, OutputFormat, SimulateArgs, SimulationMode,
    SuiteChoice, TrajectoryArgs,
};
use crate::counts_file::{self, Format};
use crate::error::CliError;
use crate::report::{format_number, EstimateReport, OracleCheck};

/// Points this close outside the unit sphere are treated as pure states.
const SPHERE_SLACK: f64 = 1e-12;

pub fn run(command: &Command, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Estimate(args) => with_output(args.out.as_deref(), |out| estimate(args, out)),
        Command::Simulate(args) => with_output(args.out.as_deref(), |out| simulate_counts(args, out)),
        Command::Bench(args) => with_output(args.out.as_deref(), |out| bench(args, out, err)),
        Command::Trajectories(args) => with_output(args.out.as_deref(), |out| trajectories(args, out)),
        Command::Check(args) => check(args, &mut io::stdout().lock()),
    }
}

fn with_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let mut buffer = Vec::new();
            body(&mut buffer)?;
            fs::write(path, buffer)?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

pub fn estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match &args.input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            text
        }
    };
    let format = match args.format {
        InputFormat::Json => Format::Json,
        InputFormat::Csv => Format::Csv,
        InputFormat::Auto => match args.input.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => counts_file::sniff(&text),
        },
    };
    let counts = counts_file::parse(&text, format)?;
    let report = estimate_report(&counts, args.oracle)?;
    out.write_all(report.to_json().as_bytes())?;
    Ok(())
}

pub fn estimate_report(counts: &stokes_mle::CountRecord, with_oracle: bool) -> Result<EstimateReport, CliError> {
    let (xi_hat, weights) = temporal_estimate(counts)?;
    let projection = project_mle(&xi_hat, &weights)?;
    let oracle = if with_oracle {
        let xi_star = oracle_mle(&xi_hat, &weights, &OracleConfig::default())?;
        Some(OracleCheck { xi_star, max_discrepancy: xi_star.max_abs_diff(&projection.xi_star) })
    } else {
        None
    };
    Ok(EstimateReport { xi_hat, weights, projection, oracle })
}

fn physical_state(xi: [f64; 3]) -> Result<StokesVector, CliError> {
    let norm_squared: f64 = xi.iter().map(|v| v * v).sum();
    if norm_squared > 1.0 + SPHERE_SLACK {
        return Err(CliError::Input(format!("--xi: |xi|^2 = {norm_squared} exceeds 1")));
    }
    if norm_squared > 1.0 {
        return Ok(StokesVector::pure(xi)?);
    }
    StokesVector::new(xi).map_err(|e| CliError::Input(format!("--xi: {e}")))
}

fn weights_from(ratios: [f64; 3], flag: &str) -> Result<WeightVector, CliError> {
    WeightVector::from_ratios(ratios).map_err(|e| CliError::Input(format!("{flag}: {e}")))
}

pub fn simulate_counts(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let xi_true = physical_state(args.xi)?;
    let mode = match args.mode {
        SimulationMode::Standard => {
            if args.s.is_some() {
                return Err(CliError::Input("--s: only valid with --mode randomized".into()));
            }
            Mode::Standard { shots_per_axis: args.shots }
        }
        SimulationMode::Randomized => Mode::Randomized {
            weights: weights_from(args.s.unwrap_or([1.0; 3]), "--s")?,
            shots: args.shots,
        },
    };
    if args.shots == 0 {
        return Err(CliError::Input("--N: must be at least 1".into()));
    }
    let counts = simulate(&SimulationSpec { xi_true, mode, seed: args.seed })?;
    let format = match args.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Csv => Format::Csv,
    };
    out.write_all(counts_file::emit(&counts, format).as_bytes())?;
    Ok(())
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let report = run_bench(args.trials as usize, args.seed, &OracleConfig::default())?;
    writeln!(out, "trial,xi_hat_1,xi_hat_2,xi_hat_3,projection_ms,oracle_ms,discrepancy")?;
    for (index, trial) in report.trials.iter().enumerate() {
        let [a, b, c] = trial.xi_hat.components().map(format_number);
        writeln!(
            out,
            "{index},{a},{b},{c},{},{},{}",
            format_number(trial.projection.as_secs_f64() * 1e3),
            format_number(trial.oracle.as_secs_f64() * 1e3),
            format_number(trial.discrepancy),
        )?;
    }
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    writeln!(err, "method,mean_ms,median_ms")?;
    writeln!(err, "projection,{:.6},{:.6}", ms(report.projection.mean), ms(report.projection.median))?;
    writeln!(err, "oracle,{:.6},{:.6}", ms(report.oracle.mean), ms(report.oracle.median))?;
    writeln!(err, "speedup,{:.2}", report.speedup())?;
    writeln!(err, "max_discrepancy,{:e}", report.max_discrepancy)?;
    if !report.methods_agree() {
        return Err(CliError::Numerical(format!(
            "methods disagree by {:e} (tolerance {AGREEMENT_TOLERANCE:e})",
            report.max_discrepancy
        )));
    }
    Ok(())
}

/// Exterior nodes of the lattice {−1 + 2k/grid}² in `plane`.
pub fn lattice_starts(args: &TrajectoryArgs) -> Vec<StokesVector> {
    let (first, second) = args.plane.axes();
    let g = args.grid;
    let coordinate = |k: u64| -1.0 + 2.0 * k as f64 / g as f64;
    let mut starts = Vec::new();
    for i in 0..=g {
        for j in 0..=g {
            let mut xi = [0.0; 3];
            xi[first] = coordinate(i);
            xi[second] = coordinate(j);
            if xi.iter().map(|v| v * v).sum::<f64>() > 1.0 {
                starts.push(StokesVector::new(xi).expect("lattice lies in the cube"));
            }
        }
    }
    starts
}

pub fn trajectories(args: &TrajectoryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let weights = weights_from(args.s, "--s")?;
    let starts = match args.start {
        Some(start) => {
            let xi = StokesVector::new(start).map_err(|e| CliError::Input(format!("--start: {e}")))?;
            if xi.norm_squared() <= 1.0 {
                return Err(CliError::Input("--start: point must lie outside the unit ball".into()));
            }
            vec![xi]
        }
        None => lattice_starts(args),
    };
    writeln!(out, "trajectory_id,sample_index,xi1,xi2,xi3")?;
    for (id, start) in starts.iter().enumerate() {
        let path = projection_trajectory(start, &weights, args.samples as usize)?;
        for (index, point) in path.iter().enumerate() {
            let [a, b, c] = point.components().map(format_number);
            writeln!(out, "{id},{index},{a},{b},{c}")?;
        }
    }
    Ok(())
}

pub fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let outcomes = match args.suite {
        SuiteChoice::All => run_all(args.seed)?,
        SuiteChoice::Infogeo => run_suite(Suite::Infogeo, args.seed)?,
        SuiteChoice::Projector => run_suite(Suite::Projector, args.seed)?,
        SuiteChoice::Simulator => run_suite(Suite::Simulator, args.seed)?,
    };
    for outcome in &outcomes {
        writeln!(out, "{outcome}")?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed)?;
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}
