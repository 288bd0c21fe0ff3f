use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::niching::NichingSettings;
use super::operators::{crossover, mutate, select_parents};
use super::pool::{Genome, Insertion, Pool};
use super::{CrossoverKind, PoolConfig};
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, Objective};
use crate::harness::RunRecord;
use crate::localopt::{minimize, LocalOptSettings};

/// Everything that defines one GA run besides the objective.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub algorithm: CrossoverKind,
    pub config: PoolConfig,
    /// Local optimization of every new individual when set.
    pub local: Option<LocalOptSettings>,
    pub niching: Option<NichingSettings>,
    pub seed: u64,
    /// Worker threads sharing the pool. One worker gives bitwise
    /// reproducible runs.
    pub workers: usize,
    /// Audit the pool after every step and fail the run on a violation.
    pub audit: bool,
}

impl RunOptions {
    pub fn new(algorithm: CrossoverKind, seed: u64) -> Self {
        RunOptions {
            algorithm,
            config: PoolConfig::default(),
            local: None,
            niching: None,
            seed,
            workers: 1,
            audit: false,
        }
    }

    pub fn with_local(mut self) -> Self {
        self.local = Some(LocalOptSettings::default());
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        self.config.validate()?;
        if let Some(l) = &self.local {
            l.validate()?;
        }
        if let Some(n) = &self.niching {
            n.validate()?;
        }
        if self.workers == 0 {
            return Err(Error::Parameter("at least one worker is required".into()));
        }
        if let CrossoverKind::Portugal(k) = self.algorithm {
            if k == 0 || k + 1 > dim {
                return Err(Error::Operator(format!(
                    "Portugal:{k} needs at least {} dimensions, objective has {dim}",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic generator for `stream` of a run seeded with `seed`.
/// Stream 0 initializes the pool, stream `w + 1` drives worker `w`.
pub fn worker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Evaluates `genes`, locally optimizing them first when requested. Returns
/// `None` for non-finite results.
fn evaluate(
    f: &dyn Objective,
    genes: Vec<f64>,
    local: Option<&LocalOptSettings>,
    iterations: &mut u64,
) -> Option<Genome> {
    match local {
        Some(s) => {
            let r = minimize(f, &genes, s).ok()?;
            *iterations += r.iterations as u64;
            r.value.is_finite().then_some(Genome {
                genes: r.x,
                fitness: r.value,
            })
        }
        None => {
            let fitness = f.value(&genes);
            fitness.is_finite().then_some(Genome { genes, fitness })
        }
    }
}

/// Result of initialization.
#[derive(Clone, Debug)]
pub struct InitStats {
    pub draws: usize,
    pub local_iterations: u64,
}

/// Fills a pool with uniformly drawn (and optionally locally optimized)
/// individuals, redrawing those that violate the diversity or niche rules.
///
/// If the draw budget runs out first the pool starts partially filled;
/// fewer than two members is an error.
pub fn initialize_pool(
    f: &dyn Objective,
    cfg: &PoolConfig,
    local: Option<&LocalOptSettings>,
    niching: Option<NichingSettings>,
    seed: u64,
) -> Result<(Pool, InitStats)> {
    cfg.validate()?;
    let bounds = f.bounds();
    let mut rng = worker_rng(seed, 0);
    let mut pool = Pool::new(cfg.pool_size, cfg.fitness_diversity, niching, bounds);
    let budget = cfg.pool_size.saturating_mul(cfg.fill_attempt_factor);
    let mut stats = InitStats {
        draws: 0,
        local_iterations: 0,
    };
    while !pool.is_full() && stats.draws < budget {
        stats.draws += 1;
        let genes = bounds.sample_point(f.dim(), &mut rng);
        if let Some(g) = evaluate(f, genes, local, &mut stats.local_iterations) {
            pool.insert(g);
        }
    }
    if pool.len() < 2 {
        return Err(Error::Initialization(format!(
            "only {} distinct individual(s) after {} draws",
            pool.len(),
            stats.draws
        )));
    }
    Ok((pool, stats))
}

/// Crosses two parents, mutates and evaluates both children and returns
/// the fitter one (the first on ties).
pub fn breed<R: Rng + ?Sized>(
    mother: &[f64],
    father: &[f64],
    f: &dyn Objective,
    kind: CrossoverKind,
    cfg: &PoolConfig,
    local: Option<&LocalOptSettings>,
    rng: &mut R,
    local_iterations: &mut u64,
) -> Result<Option<Genome>> {
    let bounds = f.bounds();
    let (mut c1, mut c2) = crossover(mother, father, kind, cfg, rng)?;
    mutate(&mut c1, &bounds, cfg.mutation_probability, rng);
    mutate(&mut c2, &bounds, cfg.mutation_probability, rng);
    let a = evaluate(f, c1, local, local_iterations);
    let b = evaluate(f, c2, local, local_iterations);
    Ok(match (a, b) {
        (Some(a), Some(b)) => Some(if a.fitness <= b.fitness { a } else { b }),
        (a, b) => a.or(b),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// `None` when neither child had a finite fitness.
    pub insertion: Option<Insertion>,
    pub child_fitness: Option<f64>,
    pub best_fitness: f64,
}

impl StepOutcome {
    pub fn is_error(&self) -> bool {
        self.insertion.is_none()
    }
}

/// One global optimization step: mating, crossover, mutation, optional
/// local optimization and insertion of the fitter child.
pub fn global_step<R: Rng + ?Sized>(
    pool: &mut Pool,
    f: &dyn Objective,
    kind: CrossoverKind,
    cfg: &PoolConfig,
    local: Option<&LocalOptSettings>,
    rng: &mut R,
) -> Result<StepOutcome> {
    let mut iters = 0;
    step_inner(pool, f, kind, cfg, local, rng, &mut iters)
}

fn step_inner<R: Rng + ?Sized>(
    pool: &mut Pool,
    f: &dyn Objective,
    kind: CrossoverKind,
    cfg: &PoolConfig,
    local: Option<&LocalOptSettings>,
    rng: &mut R,
    iters: &mut u64,
) -> Result<StepOutcome> {
    let (mi, fi) = select_parents(pool.members(), cfg, rng);
    let members = pool.members();
    let child = breed(
        &members[mi].genes,
        &members[fi].genes,
        f,
        kind,
        cfg,
        local,
        rng,
        iters,
    )?;
    let child_fitness = child.as_ref().map(|c| c.fitness);
    let insertion = child.map(|c| pool.insert(c));
    Ok(StepOutcome {
        insertion,
        child_fitness,
        best_fitness: pool.best().map_or(f64::INFINITY, |b| b.fitness),
    })
}

/// Detailed result of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub best: Genome,
    pub options: RunOptions,
    pub initial_pool_size: usize,
    pub init: InitStats,
    pub accepted_steps: u64,
    pub step_errors: u64,
    /// Local optimization iterations spent in global steps.
    pub step_local_iterations: u64,
}

struct Shared {
    pool: Mutex<Pool>,
    steps: AtomicU64,
    solved_at: AtomicU64,
    done: AtomicBool,
    accepted: AtomicU64,
    errors: AtomicU64,
    iterations: AtomicU64,
    failure: Mutex<Option<Error>>,
}

/// Runs the GA until the best fitness is within `termination_epsilon` of the
/// target value or `max_steps` steps have been taken.
pub fn run(f: &FunctionSpec, opts: &RunOptions) -> Result<RunOutcome> {
    opts.validate(f.dim)?;
    let target = f.require_target()?;
    let threshold = target + opts.config.termination_epsilon;
    let started = Instant::now();

    let (pool, init) = initialize_pool(
        f,
        &opts.config,
        opts.local.as_ref(),
        opts.niching,
        opts.seed,
    )?;
    if opts.audit {
        pool.audit().map_err(Error::Validation)?;
    }
    let initial_pool_size = pool.len();
    let solved_initially = pool.best().is_some_and(|b| b.fitness <= threshold);

    let shared = Shared {
        pool: Mutex::new(pool),
        steps: AtomicU64::new(0),
        solved_at: AtomicU64::new(if solved_initially { 0 } else { u64::MAX }),
        done: AtomicBool::new(solved_initially),
        accepted: AtomicU64::new(0),
        errors: AtomicU64::new(0),
        iterations: AtomicU64::new(0),
        failure: Mutex::new(None),
    };

    if !solved_initially {
        if opts.workers == 1 {
            single_worker(f, opts, threshold, &shared)?;
        } else {
            std::thread::scope(|scope| {
                for w in 0..opts.workers {
                    let shared = &shared;
                    scope.spawn(move || worker(f, opts, threshold, shared, w as u64));
                }
            });
            if let Some(e) = shared.failure.lock().unwrap().take() {
                return Err(e);
            }
        }
    }

    let pool = shared.pool.into_inner().unwrap();
    let best = pool.best().cloned().expect("initialized pool is never empty");
    let solved_at = shared.solved_at.load(Ordering::SeqCst);
    let success = solved_at != u64::MAX;
    let steps = if success {
        solved_at
    } else {
        shared.steps.load(Ordering::SeqCst).min(opts.config.max_steps)
    };
    let record = RunRecord {
        function: f.name.clone(),
        dim: f.dim,
        algorithm: opts.algorithm,
        locopt: opts.local.is_some(),
        niching: opts.niching,
        seed: opts.seed,
        steps,
        success,
        best_value: best.fitness,
        wall_ms: started.elapsed().as_millis() as u64,
    };
    Ok(RunOutcome {
        record,
        best,
        options: opts.clone(),
        initial_pool_size,
        init,
        accepted_steps: shared.accepted.load(Ordering::SeqCst),
        step_errors: shared.errors.load(Ordering::SeqCst),
        step_local_iterations: shared.iterations.load(Ordering::SeqCst),
    })
}

fn single_worker(f: &FunctionSpec, opts: &RunOptions, threshold: f64, shared: &Shared) -> Result<()> {
    let mut rng = worker_rng(opts.seed, 1);
    let mut pool = shared.pool.lock().unwrap();
    let mut iters = 0;
    let mut best = pool.best().map_or(f64::INFINITY, |b| b.fitness);
    let mut step = 0;
    let mut accepted = 0;
    let mut errors = 0;
    while step < opts.config.max_steps {
        step += 1;
        let out = step_inner(
            &mut pool,
            f,
            opts.algorithm,
            &opts.config,
            opts.local.as_ref(),
            &mut rng,
            &mut iters,
        )?;
        match out.insertion {
            Some(i) if i.accepted() => accepted += 1,
            Some(_) => {}
            None => errors += 1,
        }
        if opts.audit {
            pool.audit().map_err(Error::Validation)?;
            if out.best_fitness > best {
                return Err(Error::Validation(format!(
                    "best fitness rose from {best} to {} at step {step}",
                    out.best_fitness
                )));
            }
        }
        best = out.best_fitness;
        if best <= threshold {
            shared.solved_at.store(step, Ordering::SeqCst);
            break;
        }
    }
    shared.steps.store(step, Ordering::SeqCst);
    shared.accepted.store(accepted, Ordering::SeqCst);
    shared.errors.store(errors, Ordering::SeqCst);
    shared.iterations.store(iters, Ordering::SeqCst);
    Ok(())
}

fn worker(f: &FunctionSpec, opts: &RunOptions, threshold: f64, shared: &Shared, w: u64) {
    let mut rng = worker_rng(opts.seed, w + 1);
    let cfg = &opts.config;
    let mut iters = 0;
    while !shared.done.load(Ordering::SeqCst) {
        let step = shared.steps.fetch_add(1, Ordering::SeqCst) + 1;
        if step > cfg.max_steps {
            break;
        }
        let (mother, father) = {
            let pool = shared.pool.lock().unwrap();
            let (mi, fi) = select_parents(pool.members(), cfg, &mut rng);
            (pool.members()[mi].genes.clone(), pool.members()[fi].genes.clone())
        };
        let child = match breed(
            &mother,
            &father,
            f,
            opts.algorithm,
            cfg,
            opts.local.as_ref(),
            &mut rng,
            &mut iters,
        ) {
            Ok(c) => c,
            Err(e) => {
                *shared.failure.lock().unwrap() = Some(e);
                shared.done.store(true, Ordering::SeqCst);
                break;
            }
        };
        let Some(child) = child else {
            shared.errors.fetch_add(1, Ordering::SeqCst);
            continue;
        };
        let mut pool = shared.pool.lock().unwrap();
        if pool.insert(child).accepted() {
            shared.accepted.fetch_add(1, Ordering::SeqCst);
        }
        if opts.audit {
            if let Err(msg) = pool.audit() {
                *shared.failure.lock().unwrap() = Some(Error::Validation(msg));
                shared.done.store(true, Ordering::SeqCst);
                break;
            }
        }
        if pool.best().is_some_and(|b| b.fitness <= threshold) {
            shared.solved_at.fetch_min(step, Ordering::SeqCst);
            shared.done.store(true, Ordering::SeqCst);
        }
    }
    shared.iterations.fetch_add(iters, Ordering::SeqCst);
}
