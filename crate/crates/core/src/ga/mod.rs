//! Pool-based (steady-state) genetic algorithm.
//!
//! A fixed-size pool sorted by fitness is updated one child at a time: two
//! parents are mated, both children are crossed, mutated and optionally
//! locally optimized, and the fitter child replaces the worst pool member if
//! it is better and passes the diversity (and niching) rules.

mod engine;
mod niching;
mod operators;
mod pool;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use engine::{
    breed, global_step, initialize_pool, run, worker_rng, InitStats, RunOptions, RunOutcome,
    StepOutcome,
};
pub use niching::{cell_of, niche_check, CellKey, NicheDecision, NichingGrid, NichingSettings};
pub use operators::{
    crossover, crossover_at, father_rank, germany_cut, mutate, portugal_cuts, select_parents,
};
pub use pool::{Genome, Insertion, Pool, Rejection};

/// Tunables of the pool algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolConfig {
    pub pool_size: usize,
    /// Two members whose fitness differs by less than this count as the same.
    pub fitness_diversity: f64,
    pub mutation_probability: f64,
    /// Width of the half-normal father-rank distribution, as a fraction of the pool.
    pub father_rank_shape: f64,
    /// Standard deviation of the Germany cut position, as a fraction of the genome.
    pub germany_cut_shape: f64,
    /// A run succeeds once the best fitness is within this of the target value.
    pub termination_epsilon: f64,
    pub max_steps: u64,
    /// Initialization gives up after `pool_size * fill_attempt_factor` draws.
    pub fill_attempt_factor: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            pool_size: 1000,
            fitness_diversity: 1e-8,
            mutation_probability: 0.05,
            father_rank_shape: 0.1,
            germany_cut_shape: 0.3,
            termination_epsilon: 1e-6,
            max_steps: 10_000_000,
            fill_attempt_factor: 10,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pool_size < 2 {
            return Err(Error::Parameter("pool_size must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::Parameter(format!(
                "mutation_probability {} outside [0, 1]",
                self.mutation_probability
            )));
        }
        if !(self.father_rank_shape > 0.0) || !(self.germany_cut_shape > 0.0) {
            return Err(Error::Parameter("rank and cut shapes must be positive".into()));
        }
        if !(self.fitness_diversity >= 0.0) || !(self.termination_epsilon >= 0.0) {
            return Err(Error::Parameter(
                "fitness_diversity and termination_epsilon must be non-negative".into(),
            ));
        }
        if self.fill_attempt_factor == 0 {
            return Err(Error::Parameter("fill_attempt_factor must be at least 1".into()));
        }
        Ok(())
    }
}

/// Crossover operator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossoverKind {
    /// No crossover; children are copies of the parents.
    Holland,
    /// One cut, normally distributed around the middle of the genome.
    Germany,
    /// `k` uniformly placed cuts.
    Portugal(usize),
}

/// The six operators compared throughout the benchmarks.
pub const STANDARD_ALGORITHMS: [CrossoverKind; 6] = [
    CrossoverKind::Holland,
    CrossoverKind::Germany,
    CrossoverKind::Portugal(1),
    CrossoverKind::Portugal(3),
    CrossoverKind::Portugal(5),
    CrossoverKind::Portugal(7),
];

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossoverKind::Holland => f.write_str("Holland"),
            CrossoverKind::Germany => f.write_str("Germany"),
            CrossoverKind::Portugal(k) => write!(f, "Portugal:{k}"),
        }
    }
}

impl FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "holland" => Ok(CrossoverKind::Holland),
            "germany" => Ok(CrossoverKind::Germany),
            _ => {
                let k = lower
                    .strip_prefix("portugal:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))?;
                Ok(CrossoverKind::Portugal(k))
            }
        }
    }
}
