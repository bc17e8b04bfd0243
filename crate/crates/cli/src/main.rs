//! Command-line front end for `casimir-pfa`.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use casimir_pfa::{Error, ErrorClass};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Curvature corrections to the proximity force approximation.
#[derive(Debug, Parser)]
#[command(name = "casimir-pfa", version, about)]
pub struct Cli {
    /// Directory for output files and the run manifest.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gradient coefficients α, β₁, β₂, β×, θ₁ for a boundary condition or pair.
    Coeffs(CoeffsArgs),
    /// E/E_PFA of a geometry over a separation sweep.
    Geometry(GeometryArgs),
    /// Matching of a tabulated perturbative kernel against the plate law.
    KernelMatch(KernelMatchArgs),
    /// Constrained Padé approximant of the sphere-plate force.
    #[command(subcommand)]
    Pade(PadeCommand),
    /// Dirichlet sphere-plate multipole oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Fit θ₁, θ₂ to an energy curve.
    FitTheta(FitThetaArgs),
    /// Data for the E/E_PFA versus d/R figure.
    Figure1(Figure1Args),
    /// Fitted and exact θ₁ for D, N and EM.
    Table1(Table1Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::Geometry(_) => "geometry",
            Command::KernelMatch(_) => "kernel-match",
            Command::Pade(p) => match p {
                PadeCommand::Build { .. } => "pade build",
                PadeCommand::Eval { .. } => "pade eval",
                PadeCommand::Thetas { .. } => "pade thetas",
                PadeCommand::Poles { .. } => "pade poles",
                PadeCommand::Curve { .. } => "pade curve",
            },
            Command::Oracle(o) => match o {
                OracleCommand::Energy { .. } => "oracle energy",
                OracleCommand::Curve { .. } => "oracle curve",
                OracleCommand::Ae { .. } => "oracle ae",
            },
            Command::FitTheta(_) => "fit-theta",
            Command::Figure1(_) => "figure1",
            Command::Table1(_) => "table1",
        }
    }
}

/// Separation grid: comma-separated values or `lo:hi:n` (log-spaced).
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    if let Some((lo, rest)) = s.split_once(':') {
        let (hi, n) = rest
            .split_once(':')
            .ok_or_else(|| format!("`{s}`: expected lo:hi:n"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("`{lo}` is not a number"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("`{hi}` is not a number"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a count"))?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(format!("`{s}`: need 0 < lo < hi and n ≥ 2"));
        }
        let step = (hi / lo).ln() / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
        v[n - 1] = hi;
        return Ok(Grid(v));
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty grid".into());
    }
    Ok(Grid(v))
}

/// Closed interval `lo:hi`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Range(pub f64, pub f64);

fn parse_range(s: &str) -> Result<Range, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("`{s}`: expected lo:hi"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("`{a}` is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("`{b}` is not a number"))?;
    if !(b > a) {
        return Err(format!("`{s}`: upper bound must exceed lower bound"));
    }
    Ok(Range(a, b))
}

#[derive(Debug, Args, Serialize)]
pub struct CoeffsArgs {
    /// Kind (D, N, EM, DN, ND) or surface pair such as `D/N`.
    #[arg(long)]
    pub bc: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    SpherePlate,
    TwoSpheres,
    Hyperboloid,
    Cylinders,
    Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Closed,
    Quadrature,
}

#[derive(Debug, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    #[arg(long, default_value = "D")]
    pub bc: String,
    /// Values of d/R (d/length for profiles).
    #[arg(long, value_parser = parse_grid, default_value = "0.001:0.1:9")]
    pub sweep: Grid,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Second radius for two spheres or cylinders (defaults to --radius).
    #[arg(long)]
    pub radius2: Option<f64>,
    /// Hyperboloid asymmetry λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Cylinder inclinations in radians.
    #[arg(long, value_parser = parse_grid, default_value = "1.5707963267948966")]
    pub theta: Grid,
    /// Upper surface as a JSON descriptor or an `x,y,H` grid CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Length scale dividing d for profile sweeps.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    #[arg(long, default_value_t = 0.5)]
    pub slope_cap: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct KernelMatchArgs {
    /// CSV with columns `k,d,G` and optionally `mu`.
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long, default_value = "D")]
    pub bc: String,
    /// Separations to check (default: every d in the table).
    #[arg(long, value_parser = parse_grid)]
    pub d: Option<Grid>,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FixtureArgs {
    /// Series fixture `{"bc", "j0", "coefficients", "source"}`.
    #[arg(long)]
    pub fixture: PathBuf,
    /// Use only the first N coefficients.
    #[arg(long)]
    pub n: Option<usize>,
    /// Resum the energy instead of the force.
    #[arg(long)]
    pub energy: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PadeCommand {
    /// Build the approximant and print its coefficients.
    Build {
        #[command(flatten)]
        #[serde(flatten)]
        fixture: FixtureArgs,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate f = R²F (or E·R with --energy) at r = R/d.
    Eval {
        #[command(flatten)]
        #[serde(flatten)]
        fixture: FixtureArgs,
        #[arg(long, value_parser = parse_grid)]
        r: Grid,
    },
    /// θ₁, θ₂ of the short-distance expansion, with sensitivity to n.
    Thetas {
        #[command(flatten)]
        #[serde(flatten)]
        fixture: FixtureArgs,
        #[arg(long)]
        json: bool,
    },
    /// Positive real denominator roots up to --r-max.
    Poles {
        #[command(flatten)]
        #[serde(flatten)]
        fixture: FixtureArgs,
        #[arg(long, default_value_t = 100.0)]
        r_max: f64,
        #[arg(long)]
        json: bool,
    },
    /// Energy curve E/E_PFA over a d/R sweep.
    Curve {
        #[command(flatten)]
        #[serde(flatten)]
        fixture: FixtureArgs,
        #[arg(long, value_parser = parse_grid, default_value = "0.01:10:60")]
        sweep: Grid,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 40)]
    pub ell_max: usize,
    #[arg(long, default_value_t = 80)]
    pub kappa_nodes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Aitken extrapolation from ell_max − 8, ell_max − 4 and ell_max.
    #[arg(long)]
    pub extrapolate: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCommand {
    /// Energy at one separation.
    Energy {
        #[command(flatten)]
        #[serde(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        d_over_r: f64,
        #[arg(long)]
        json: bool,
    },
    /// E/E_PFA over a grid, with truncation errors.
    Curve {
        #[command(flatten)]
        #[serde(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_parser = parse_grid, default_value = "0.1,0.15,0.2,0.3,0.5,0.7,1")]
        grid: Grid,
    },
    /// Large-distance force coefficients from oracle energies at d/R ≥ 5.
    Ae {
        #[command(flatten)]
        #[serde(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_parser = parse_grid, default_value = "5:40:12")]
        grid: Grid,
        #[arg(long, default_value_t = 4)]
        m: usize,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct FitThetaArgs {
    /// Curve CSV with header `d_over_R,E_over_EPFA`.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long, value_parser = parse_range, default_value = "0.1:0.5")]
    pub range: Range,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct Figure1Args {
    /// Directory holding ae_D.json, ae_N.json, ae_EM.json.
    #[arg(long)]
    pub fixtures: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "D,N,EM")]
    pub bc: Vec<String>,
    #[arg(long, value_parser = parse_grid, default_value = "0.01:5:60")]
    pub sweep: Grid,
    /// d/R values for the D oracle points.
    #[arg(long, value_parser = parse_grid, default_value = "0.1,0.15,0.2,0.3,0.5,0.7,1")]
    pub oracle_grid: Grid,
    #[arg(long, default_value_t = 40)]
    pub ell_max: usize,
    #[arg(long, default_value_t = 80)]
    pub kappa_nodes: usize,
    /// Report raw truncated oracle values instead of extrapolating in ell_max.
    #[arg(long)]
    pub raw_oracle: bool,
    /// Skip the oracle points.
    #[arg(long)]
    pub no_oracle: bool,
    /// Numerical points for a condition as `BC=FILE` (curve CSV).
    #[arg(long = "external")]
    pub external: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct Table1Args {
    /// Curves for the fit column as `BC=FILE`; D defaults to the oracle.
    #[arg(long = "curve")]
    pub curves: Vec<String>,
    #[arg(long, value_parser = parse_range, default_value = "0.1:0.5")]
    pub range: Range,
    /// d/R values of the D oracle curve.
    #[arg(long, value_parser = parse_grid, default_value = "0.1,0.125,0.15,0.175,0.2,0.25,0.3,0.35,0.4,0.45,0.5")]
    pub oracle_grid: Grid,
    #[arg(long, default_value_t = 40)]
    pub ell_max: usize,
    #[arg(long, default_value_t = 80)]
    pub kappa_nodes: usize,
    #[arg(long)]
    pub raw_oracle: bool,
    #[arg(long)]
    pub no_oracle: bool,
    #[arg(long)]
    pub json: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Usage | ErrorClass::Io => 2,
        ErrorClass::Domain => 3,
        ErrorClass::Numerical => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
