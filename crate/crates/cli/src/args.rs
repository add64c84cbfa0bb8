use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swg_core::analysis::{Discretization, RunOptions};
use swg_core::assembly::{BcMode, BoundaryProjection, MeshsizeRule};
use swg_core::mesh::Domain;
use swg_core::problems::{get_problem, ConstantCoefficients, ProblemId, ProblemSpec};
use swg_core::solver::{SolveConfig, SolveMethod};
use swg_core::{Result, SwgError};

#[derive(Debug, Parser)]
#[command(
    name = "swg",
    version,
    about = "Simplified weak Galerkin experiments on rectangular meshes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence table of the SWG scheme.
    Run(RunArgs),
    /// Convergence table of the 5- or 7-point finite difference scheme.
    Fd(FdArgs),
    /// Discrete maximum principle report.
    Dmp(DmpArgs),
    /// Compare the SWG system with the 7-point scheme entry by entry.
    Equiv(EquivArgs),
    /// Print the built-in problems.
    ListProblems,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Inverse meshsizes, increasing.
    #[arg(long, alias = "n", value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct FdArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = "7", value_parser = ["5", "7"])]
    pub scheme: String,
    /// Ignored by the 5-point scheme.
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, alias = "n", value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DmpArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "4",
        allow_negative_numbers = true
    )]
    pub kappa: Vec<f64>,
    #[arg(
        long,
        alias = "n",
        value_delimiter = ',',
        required_unless_present = "x_breaks"
    )]
    pub ns: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        requires = "y_breaks",
        conflicts_with = "ns"
    )]
    pub x_breaks: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "x_breaks")]
    pub y_breaks: Option<Vec<f64>>,
    /// Defaults to fd7 for fd1 and fd2, swg otherwise.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub kappa: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// tc1, tc2, tc3, fd1, fd2 or custom.
    #[arg(long, default_value = "tc1")]
    pub problem: String,
    /// Custom problem: diagonal diffusion `a11,a22`.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Custom problem: constant convection `b1,b2`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Option<Vec<f64>>,
    /// Custom problem: reaction coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Custom problem: source term.
    #[arg(long, allow_negative_numbers = true)]
    pub f: Option<f64>,
    /// Custom problem: Dirichlet value.
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Custom problem: rectangle `x0,x1,y0,y1`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = BcArg::Eliminate)]
    pub bc: BcArg,
    #[arg(long, default_value_t = 1e8)]
    pub penalty_weight: f64,
    /// Evaluation of the boundary edge averages.
    #[arg(long, value_enum, default_value_t = QbArg::Midpoint)]
    pub qb: QbArg,
    /// Meshsize in the stabilizer.
    #[arg(long, value_enum, default_value_t = MeshsizeArg::Global)]
    pub meshsize: MeshsizeArg,
    /// Write each assembled matrix in coordinate format.
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Direct,
    Iterative,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Eliminate,
    Penalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QbArg {
    Midpoint,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshsizeArg {
    Global,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Swg,
    Fd5,
    Fd7,
}

impl From<MethodArg> for Discretization {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Swg => Discretization::Swg,
            MethodArg::Fd5 => Discretization::Fd5,
            MethodArg::Fd7 => Discretization::Fd7,
        }
    }
}

impl CommonArgs {
    pub fn run_options(&self, method: Discretization, kappa: f64) -> RunOptions {
        let mut opts = RunOptions::new(method, kappa);
        opts.bc_mode = match self.bc {
            BcArg::Eliminate => BcMode::Eliminate,
            BcArg::Penalty => BcMode::Penalty {
                weight: self.penalty_weight,
            },
        };
        opts.projection = match self.qb {
            QbArg::Midpoint => BoundaryProjection::Midpoint,
            QbArg::Simpson => BoundaryProjection::Simpson,
        };
        opts.meshsize = match self.meshsize {
            MeshsizeArg::Global => MeshsizeRule::GlobalMax,
            MeshsizeArg::Harmonic => MeshsizeRule::ElementHarmonic,
        };
        let method = match self.solver {
            SolverArg::Direct => SolveMethod::Direct,
            SolverArg::Iterative => SolveMethod::Iterative,
            SolverArg::Auto => SolveMethod::Auto,
        };
        opts.solver = SolveConfig {
            method,
            tol: self.tol,
            max_iter: self.max_iter,
        };
        opts
    }
}

fn pair(name: &str, v: &Option<Vec<f64>>, default: [f64; 2]) -> Result<[f64; 2]> {
    match v.as_deref() {
        None => Ok(default),
        Some([a, b]) => Ok([*a, *b]),
        Some(other) => Err(SwgError::SingularConfig(format!(
            "--{name} takes two comma-separated values, got {}",
            other.len()
        ))),
    }
}

impl ProblemArgs {
    fn has_custom_flags(&self) -> bool {
        self.alpha.is_some()
            || self.beta.is_some()
            || self.c.is_some()
            || self.f.is_some()
            || self.g.is_some()
            || self.domain.is_some()
    }

    pub fn resolve(&self) -> Result<ProblemSpec> {
        let id: ProblemId = self.problem.parse()?;
        if id != ProblemId::Custom {
            if self.has_custom_flags() {
                return Err(SwgError::SingularConfig(
                    "coefficient flags apply only to --problem custom".into(),
                ));
            }
            return get_problem(id);
        }
        let d = ConstantCoefficients::default();
        let [a11, a22] = pair("alpha", &self.alpha, [1.0, 1.0])?;
        let domain = match self.domain.as_deref() {
            None => d.domain,
            Some(&[x0, x1, y0, y1]) => {
                if !(x0 < x1 && y0 < y1) {
                    return Err(SwgError::InvalidGrid(format!(
                        "domain needs x0 < x1 and y0 < y1, got {x0},{x1},{y0},{y1}"
                    )));
                }
                Domain::new(x0, x1, y0, y1)
            }
            Some(other) => {
                return Err(SwgError::SingularConfig(format!(
                    "--domain takes four comma-separated values, got {}",
                    other.len()
                )))
            }
        };
        ProblemSpec::custom(ConstantCoefficients {
            alpha: [[a11, 0.0], [0.0, a22]],
            beta: pair("beta", &self.beta, d.beta)?,
            c: self.c.unwrap_or(d.c),
            f: self.f.unwrap_or(d.f),
            g: self.g.unwrap_or(d.g),
            domain,
        })
    }
}
