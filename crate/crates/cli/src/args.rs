use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "henon-tm",
    version,
    about = "Weighted Trudinger-Moser functional on the unit disk",
    long_about = "Evaluates, rearranges, transforms and maximizes the functional \
                  ∫_B (e^{γu²} - 1)|x|^α dx over radial profiles with unit Dirichlet norm.\n\n\
                  Exit codes: 0 success, 1 failed verification, 2 invalid input or \
                  precondition violation, 3 optimizer did not converge."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Weight exponent α ≥ 0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// γ/4π.
    #[arg(long = "gamma-factor", default_value_t = 1.0)]
    pub gamma_factor: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Map {
    /// v(ρ) = u(ρ^ε)/√ε.
    Ssw,
    SswInverse,
    /// w(t) = √(4π) v(e^{-t/2}); needs v(1) = 0.
    Moser,
    MoserInverse,
    /// Power map followed by the Moser map.
    ToHalfline,
    FromHalfline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateReport {
    /// Closed-form pieces of the half-line integral.
    Pieces,
    /// Node table of the piecewise-linear candidate.
    Profile,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Functional and Dirichlet norm of a profile file, or of Moser profiles.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Radial (`r,u`) or half-line (`t,w`) profile file.
        #[arg(long, required_unless_present = "moser")]
        profile: Option<PathBuf>,
        /// Comma-separated Moser indices n to evaluate instead of a file.
        #[arg(long, value_delimiter = ',', conflicts_with = "profile")]
        moser: Option<Vec<u32>>,
        /// Concentrate Moser profiles at this distance from the origin (disk of radius 1 - offset).
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Distribution function, rearrangement and Pólya-Szegő ratio of a polar sample.
    Rearrange {
        #[command(flatten)]
        common: Common,
        /// Polar sample file (`nr,ntheta` header, then rows).
        #[arg(long, required_unless_present = "profile")]
        sample: Option<PathBuf>,
        /// Radial non-increasing profile file; uses the closed-form rearrangement.
        #[arg(long, conflicts_with = "sample")]
        profile: Option<PathBuf>,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Apply a change of variables to a profile and check the matching identity.
    Transform {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = Map::Ssw)]
        map: Map,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The explicit test profile and its closed-form value.
    Candidate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = CandidateReport::Pieces)]
        report: CandidateReport,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Maximize the radial functional (γ ≤ 4π).
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        opt: OptimizeArgs,
    },
    /// Optimizer, candidate and bound over a list of α.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated α values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        alphas: Vec<f64>,
        #[command(flatten)]
        opt: OptimizeArgs,
    },
    /// Largest α for which the candidate beats the concentration level.
    Threshold {
        /// Bisection tolerance on α.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Quick self-checks of the closed forms and identities.
    Verify {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also run the optimizer-based checks (slower).
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    /// Grid nodes on [0, T].
    #[arg(long, default_value_t = 2049)]
    pub grid: usize,
    /// Truncation T of the half-line; default depends on γ and α.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Relative improvement below which the ascent stops.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long = "max-iters", default_value_t = 5000)]
    pub max_iters: usize,
    /// `candidate`, `moser:N`, or a half-line profile file.
    #[arg(long, default_value = "candidate")]
    pub init: String,
}
