use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gabench::ga::{CrossoverKind, NichingSettings, PoolConfig, RunOptions, STANDARD_ALGORITHMS};
use gabench::LocalOptSettings;

#[derive(Parser, Debug)]
#[command(name = "gabench", version, about = "Pool-based genetic algorithm benchmarks")]
#[command(after_help = "Exit codes: 0 success, 2 configuration error, 3 run failure, 4 validation failure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One GA run; prints steps-to-solution and the best value.
    Solve(SolveArgs),
    /// Steps-to-solution versus dimension with a fitted power law.
    Sweep(SweepArgs),
    /// Repeated runs at one dimension with scatter statistics.
    Scatter(ScatterArgs),
    /// Randomized-Gaussian landscapes.
    #[command(subcommand)]
    Grunge(GrungeCommand),
    /// Gradient, known-minimum and pool-invariant checks.
    Validate(ValidateArgs),
}

/// Objective selection.
#[derive(Args, Debug, Clone)]
pub struct Target {
    /// ackley, ackley-simplified-grad, rastrigin, schwefel, schafferf7,
    /// schafferf6, lunacek or grunge:<landscape file>.
    #[arg(long, short = 'f')]
    pub function: String,

    /// Minima catalog whose global minimum becomes the target value
    /// (landscape functions).
    #[arg(long)]
    pub catalog: Option<PathBuf>,

    /// Explicit target value, overriding the built-in one.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,
}

/// GA tunables shared by every command that runs the algorithm.
#[derive(Args, Debug, Clone)]
pub struct GaArgs {
    /// Enable L-BFGS local optimization of every new individual.
    #[arg(long)]
    pub locopt: bool,

    /// Niching grid cells per dimension; niching is off unless given.
    #[arg(long)]
    pub niche_cells: Option<u32>,

    /// Maximum number of individuals per niche.
    #[arg(long, default_value_t = 100)]
    pub mnic: u32,

    /// Reject children for full niches instead of replacing the niche's worst.
    #[arg(long)]
    pub niche_reject: bool,

    /// Number of individuals kept in the pool.
    #[arg(long, default_value_t = PoolConfig::default().pool_size)]
    pub pool_size: usize,

    /// Members closer than this in fitness count as duplicates.
    #[arg(long, default_value_t = PoolConfig::default().fitness_diversity)]
    pub diversity: f64,

    /// Probability of a one-gene mutation per child.
    #[arg(long, default_value_t = PoolConfig::default().mutation_probability)]
    pub mutation: f64,

    /// Width of the father-rank distribution as a fraction of the pool.
    #[arg(long, default_value_t = PoolConfig::default().father_rank_shape)]
    pub father_shape: f64,

    /// Standard deviation of the Germany cut as a fraction of the genome.
    #[arg(long, default_value_t = PoolConfig::default().germany_cut_shape)]
    pub cut_shape: f64,

    /// Success once the best value is within this of the target.
    #[arg(long, default_value_t = PoolConfig::default().termination_epsilon)]
    pub epsilon: f64,

    /// Global optimization steps before a run counts as failed.
    #[arg(long, default_value_t = PoolConfig::default().max_steps)]
    pub max_steps: u64,

    /// Initialization draws allowed per pool slot.
    #[arg(long, default_value_t = PoolConfig::default().fill_attempt_factor)]
    pub fill_factor: usize,

    /// L-BFGS correction pairs.
    #[arg(long, default_value_t = LocalOptSettings::default().memory_pairs)]
    pub lbfgs_memory: usize,

    /// L-BFGS stops when successive values differ by less than this.
    #[arg(long, default_value_t = LocalOptSettings::default().fitness_tol)]
    pub fitness_tol: f64,

    /// L-BFGS stops when the gradient max-norm drops below this.
    #[arg(long, default_value_t = LocalOptSettings::default().gradient_tol)]
    pub gradient_tol: f64,

    /// L-BFGS iteration limit per local optimization.
    #[arg(long, default_value_t = LocalOptSettings::default().max_iterations)]
    pub lbfgs_iterations: usize,

    /// Worker threads; 1 gives reproducible runs. Defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Audit the pool after every step.
    #[arg(long)]
    pub audit: bool,
}

impl GaArgs {
    pub fn options(&self, algorithm: CrossoverKind, seed: u64) -> RunOptions {
        let config = PoolConfig {
            pool_size: self.pool_size,
            fitness_diversity: self.diversity,
            mutation_probability: self.mutation,
            father_rank_shape: self.father_shape,
            germany_cut_shape: self.cut_shape,
            termination_epsilon: self.epsilon,
            max_steps: self.max_steps,
            fill_attempt_factor: self.fill_factor,
        };
        let local = self.locopt.then(|| LocalOptSettings {
            memory_pairs: self.lbfgs_memory,
            fitness_tol: self.fitness_tol,
            gradient_tol: self.gradient_tol,
            max_iterations: self.lbfgs_iterations,
            ..LocalOptSettings::default()
        });
        let niching = self.niche_cells.map(|cells| NichingSettings {
            replace: !self.niche_reject,
            ..NichingSettings::new(cells, self.mnic)
        });
        let workers = self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });
        RunOptions {
            algorithm,
            config,
            local,
            niching,
            seed,
            workers,
            audit: self.audit,
        }
    }
}

fn algorithms_default() -> Vec<CrossoverKind> {
    STANDARD_ALGORITHMS.to_vec()
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub target: Target,

    /// Number of variables.
    #[arg(long, short = 'd')]
    pub dim: usize,

    /// holland, germany or portugal:<k>.
    #[arg(long, default_value = "germany")]
    pub algo: CrossoverKind,

    /// Random seed; identical seeds give identical single-worker runs.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[command(flatten)]
    pub ga: GaArgs,

    /// Records CSV for the run.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub target: Target,

    /// Comma-separated, strictly increasing dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,

    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_values_t = algorithms_default())]
    pub algos: Vec<CrossoverKind>,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    /// Runs use seeds seed+1 ..= seed+repeats.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub ga: GaArgs,

    /// Series CSV with fitted exponents.
    #[arg(long, default_value = "series.csv")]
    pub output: PathBuf,

    /// Raw per-run records CSV.
    #[arg(long)]
    pub records: Option<PathBuf>,

    /// Gnuplot script of the series.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub target: Target,

    /// Number of variables.
    #[arg(long, short = 'd')]
    pub dim: usize,

    #[arg(long, value_delimiter = ',', default_values_t = algorithms_default())]
    pub algos: Vec<CrossoverKind>,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub ga: GaArgs,

    /// Summary CSV.
    #[arg(long, default_value = "scatter.csv")]
    pub output: PathBuf,

    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GrungeCommand {
    /// Draw a landscape and write it to a file.
    Gen(GenArgs),
    /// Enumerate the local minima of a landscape.
    Enum(EnumArgs),
    /// Run the GA against a landscape with the target from its catalog.
    Solve(GrungeSolveArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Dimension.
    #[arg(long)]
    pub m: usize,

    /// Number of Gaussians.
    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub depth_min: f64,

    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    pub depth_max: f64,

    #[arg(long, default_value_t = 0.5)]
    pub width_min: f64,

    #[arg(long, default_value_t = 5.0)]
    pub width_max: f64,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lower: f64,

    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub upper: f64,

    /// Allow positive weights (bumps) as well as wells.
    #[arg(long)]
    pub mixed_sign: bool,

    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct EnumArgs {
    #[arg(long, short = 'l')]
    pub landscape: PathBuf,

    /// Grid points per dimension.
    #[arg(long, default_value_t = 10)]
    pub grid: usize,

    /// Use this many uniformly random starts instead of the grid.
    #[arg(long)]
    pub multistart: Option<u64>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Distance under which two converged points are one minimum.
    #[arg(long, default_value_t = 1e-4)]
    pub merge_tol: f64,

    #[arg(long, short = 'o')]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct GrungeSolveArgs {
    #[arg(long, short = 'l')]
    pub landscape: PathBuf,

    #[arg(long)]
    pub catalog: Option<PathBuf>,

    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,

    #[arg(long, default_value = "germany")]
    pub algo: CrossoverKind,

    /// Random seed; identical seeds give identical single-worker runs.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[command(flatten)]
    pub ga: GaArgs,

    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Restrict the suite to one function (name or grunge:<file>).
    #[arg(long, short = 'f')]
    pub function: Option<String>,

    /// Random points per gradient check.
    #[arg(long, default_value_t = 100)]
    pub points: usize,

    /// Pool-audited GA steps per invariant check.
    #[arg(long, default_value_t = 2000)]
    pub steps: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
