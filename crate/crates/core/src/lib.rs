//! Evolutionary global optimization benchmarking.
//!
//! - [`functions`]: analytic benchmark objectives with gradients and known optima.
//! - [`grunge`]: randomized-Gaussian landscapes and exhaustive minima enumeration.
//! - [`localopt`]: L-BFGS local minimization.
//! - [`ga`]: the pool-based genetic algorithm.
//! - [`harness`]: repeated runs, dimension sweeps, fits and exports.

pub mod error;
pub mod functions;
pub mod ga;
pub mod grunge;
pub mod harness;
pub mod localopt;

pub use error::{Error, Result};
pub use functions::{lookup_function, Bounds, FunctionKind, FunctionSpec, Objective};
pub use ga::{run, CrossoverKind, PoolConfig, RunOptions};
pub use grunge::{GrungeLandscape, MinimaCatalog};
pub use harness::RunRecord;
pub use localopt::{minimize, LocalOptSettings, LocalOptStatus};
