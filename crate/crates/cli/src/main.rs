//! `unitfield`: harmonic unit vector fields from the command line.
//!
//! Exit status: 0 on success or PASS, 1 on a usage error, 2 on a numerical
//! failure or a FAIL verdict.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod family;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unitfield::charts::ChartId;

use family::{parse_chart, parse_triple, FamilyArgs, FAMILY_HELP};
use report::{Emitter, Format, Sink, OUT_DIR_ENV};

/// A request that is malformed, as opposed to one that failed numerically.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A completed computation whose verdict is FAIL.
#[derive(Debug)]
pub struct Failed(pub String);

impl fmt::Display for Failed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

#[derive(Parser, Debug)]
#[command(name = "unitfield", version, about = "Harmonic unit vector fields on R³ and H³", after_help = FAMILY_HELP)]
pub struct Cli {
    /// Output encoding; json unless stated otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file. Relative paths are taken inside the output directory
    /// when one is set.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Directory for reports written under their default names.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    /// Omit the timestamp so identical requests give identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate unit fields and their bending.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Harmonicity checks on a grid.
    #[command(subcommand)]
    Check(CheckCmd),
    /// The pendulum profile v_q(r).
    #[command(subcommand)]
    Pendulum(PendulumCmd),
    /// Second variation of the H-parallel field.
    #[command(subcommand)]
    Stability(StabilityCmd),
    /// Streamlines and their diagnostics.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// The reproduction table.
    #[command(subcommand)]
    Repro(ReproCmd),
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Point `c1,c2,c3`; repeat for several points.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_triple)]
    pub point: Vec<[f64; 3]>,
    /// Chart of the points.
    #[arg(long, value_parser = parse_chart)]
    pub chart: Option<ChartId>,
}

#[derive(Subcommand, Debug)]
pub enum FieldCmd {
    /// Frame components and polar angles of σ at points.
    #[command(after_help = FAMILY_HELP)]
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        points: PointArgs,
    },
    /// Bending |∇σ|² at points, closed form and finite differences.
    #[command(after_help = FAMILY_HELP)]
    Bending {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Finite-difference step.
        #[arg(long, default_value_t = unitfield::charts::DEFAULT_STEP)]
        h: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Points per axis of the default grid.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Distance kept from the singular set.
    #[arg(long, default_value_t = unitfield::residuals::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Chart of an explicit grid; needs --axis three times.
    #[arg(long, value_parser = parse_chart, requires = "axis")]
    pub grid_chart: Option<ChartId>,
    /// Axis `min,max,count` of an explicit grid, in chart order.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_triple, requires = "grid_chart")]
    pub axis: Vec<[f64; 3]>,
    /// Finite-difference step.
    #[arg(long, default_value_t = unitfield::charts::DEFAULT_STEP)]
    pub h: f64,
    /// Residual tolerance.
    #[arg(long, default_value_t = unitfield::residuals::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// |∇*∇σ − |∇σ|²σ| from finite differences of σ.
    #[command(after_help = FAMILY_HELP)]
    Harmonic {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// The reduced equations for the polar angles (u, v).
    #[command(after_help = FAMILY_HELP)]
    Reduced {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Harmonic-map test on H³: geodesic and solenoidal.
    #[command(after_help = FAMILY_HELP)]
    Map {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ProfileMethod {
    ClosedForm,
    Shooting,
}

#[derive(Subcommand, Debug)]
pub enum PendulumCmd {
    /// Tabulate v_q, v_q' and the bending on a log grid.
    Solve {
        /// Initial slope q = v'(0).
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        /// Number of radii.
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ProfileMethod::ClosedForm)]
        method: ProfileMethod,
        /// Integrator tolerance for shooting.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum StabilityCmd {
    /// H(R, δ) by closed form and quadrature, at a point or on a lattice.
    Hessian {
        /// Inner radius R of the bump.
        #[arg(long, conflicts_with = "lattice")]
        r: Option<f64>,
        /// Width δ of the bump.
        #[arg(long, conflicts_with = "lattice")]
        delta: Option<f64>,
        /// Lattice size n (n × n points).
        #[arg(long)]
        lattice: Option<usize>,
        /// R range `min,max` of the lattice.
        #[arg(long, default_value = "0.1,10")]
        r_range: String,
        /// δ range `min,max` of the lattice.
        #[arg(long, default_value = "0.1,5")]
        delta_range: String,
        /// Relative quadrature tolerance.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// The thresholds δ_s and δ_u.
    Thresholds {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// The radius R₀ beyond which H(R, δ₀) < 0.
    R0 {
        #[arg(long, default_value_t = 1.471008)]
        delta0: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum FlowCmd {
    /// Integrate a streamline with RK4 at fixed arc-length step.
    #[command(after_help = FAMILY_HELP)]
    Trace {
        #[command(flatten)]
        family: FamilyArgs,
        /// Start point, Cartesian (R³) or half-space (H³) coordinates.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_triple)]
        start: [f64; 3],
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Number of steps.
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Helix (p = ±π/2) or fountain (p = 0) diagnostics of euclid-pendulum.
    #[command(after_help = FAMILY_HELP)]
    Diagnose {
        #[command(flatten)]
        family: FamilyArgs,
        /// Helix radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        /// Fountain start point `x,y,z`; repeat for several.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_triple)]
        start: Vec<[f64; 3]>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Steps per fountain streamline.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReproCmd {
    /// Run every row of the reproduction table (default format: table).
    All {
        /// Run only the row with this id.
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let emitter = Emitter {
        command: &argv[1..],
        deterministic: cli.deterministic,
        format: cli.format,
        sink: Sink {
            output: cli.output.clone(),
            out_dir: cli.out_dir.clone(),
        },
    };
    match commands::run(&cli.command, &emitter) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.downcast_ref::<Usage>().is_some() { 1 } else { 2 };
            let kind = if e.downcast_ref::<Failed>().is_some() {
                "FAIL"
            } else if code == 1 {
                "usage error"
            } else {
                "error"
            };
            eprintln!("unitfield: {kind}: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
