mod args;
mod validate;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use gabench::ga::{run, CrossoverKind, RunOptions};
use gabench::grunge::{self, EnumerateOptions, GenerateOptions};
use gabench::harness::{self, config_echo, repeat_runs, ScalingSeries};
use gabench::{lookup_function, Bounds, FunctionKind, FunctionSpec, GrungeLandscape, MinimaCatalog, RunRecord};

use args::*;

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Run(m) => write!(f, "run failed: {m}"),
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl From<gabench::Error> for Failure {
    fn from(e: gabench::Error) -> Self {
        use gabench::Error as E;
        match e {
            E::NonFinite { .. } | E::Initialization(_) => Failure::Run(e.to_string()),
            E::Validation(_) => Failure::Validation(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Scatter(a) => scatter(a),
        Command::Grunge(GrungeCommand::Gen(a)) => grunge_gen(a),
        Command::Grunge(GrungeCommand::Enum(a)) => grunge_enum(a),
        Command::Grunge(GrungeCommand::Solve(a)) => grunge_solve(a),
        Command::Validate(a) => validate::run_suite(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gabench: {f}");
            ExitCode::from(f.code())
        }
    }
}

/// Builds the objective and fills in its target from a catalog or an
/// explicit value.
fn resolve(t: &Target, dim: usize) -> CliResult<FunctionSpec> {
    let mut spec = lookup_function(&t.function, dim)?;
    if let Some(path) = &t.catalog {
        spec = with_catalog(spec, path)?;
    }
    if let Some(v) = t.target {
        spec = spec.with_target(v, None);
    }
    if spec.target_value.is_none() {
        return Err(Failure::Config(format!(
            "{} has no known target; run `gabench grunge enum` and pass --catalog, or give --target",
            spec.name
        )));
    }
    Ok(spec)
}

fn with_catalog(spec: FunctionSpec, path: &Path) -> CliResult<FunctionSpec> {
    let cat = MinimaCatalog::load(path)?;
    let best = cat
        .global_min()
        .ok_or_else(|| Failure::Config(format!("catalog {} is empty", path.display())))?;
    if best.location.len() != spec.dim {
        return Err(Failure::Config(format!(
            "catalog {} is {}-dimensional, objective is {}",
            path.display(),
            best.location.len(),
            spec.dim
        )));
    }
    let (v, x) = (best.value, best.location.clone());
    Ok(spec.with_target(v, Some(x)))
}

fn echo(spec: &FunctionSpec, opts: &RunOptions, extra: &[String]) -> Vec<String> {
    let mut lines = vec![
        format!("function={}", spec.name),
        format!("dim={}", spec.dim),
        format!("target={}", spec.target_value.unwrap_or(f64::NAN)),
        format!("bounds={},{}", spec.bounds.lower, spec.bounds.upper),
    ];
    lines.extend(extra.iter().cloned());
    lines.extend(config_echo(opts));
    lines
}

fn report(r: &RunRecord) {
    if r.success {
        println!(
            "{}[{}] {}: solved in {} steps, best {:.12e} ({} ms)",
            r.function, r.dim, r.algorithm, r.steps, r.best_value, r.wall_ms
        );
    } else {
        println!(
            "{}[{}] {}: not solved after {} steps, best {:.12e} ({} ms)",
            r.function, r.dim, r.algorithm, r.steps, r.best_value, r.wall_ms
        );
    }
}

fn single_run(spec: &FunctionSpec, opts: &RunOptions, output: Option<&Path>, extra: &[String]) -> CliResult {
    let out = run(spec, opts)?;
    report(&out.record);
    if let Some(path) = output {
        harness::export_records(std::slice::from_ref(&out.record), path, &echo(spec, opts, extra))?;
    }
    if out.record.success {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "target {} not reached within {} steps",
            spec.target_value.unwrap_or(f64::NAN),
            opts.config.max_steps
        )))
    }
}

fn solve(a: SolveArgs) -> CliResult {
    let spec = resolve(&a.target, a.dim)?;
    let opts = a.ga.options(a.algo, a.seed);
    single_run(&spec, &opts, a.output.as_deref(), &[])
}

/// Runs every (algorithm, dimension) cell, reporting failures per cell
/// instead of aborting the whole sweep.
fn sweep(a: SweepArgs) -> CliResult {
    if a.dims.is_empty() || a.dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Config("--dims must be strictly increasing".into()));
    }
    if a.repeats == 0 {
        return Err(Failure::Config("--repeats must be at least 1".into()));
    }
    let mut series = Vec::new();
    let mut all_records = Vec::new();
    let mut name = a.target.function.clone();
    let mut solved = 0usize;
    let mut first_spec = None;
    for &alg in &a.algos {
        let template = a.ga.options(alg, a.seed);
        let mut records = Vec::new();
        for &d in &a.dims {
            let cell = resolve(&a.target, d).and_then(|spec| {
                name.clone_from(&spec.name);
                first_spec.get_or_insert_with(|| spec.clone());
                repeat_runs(&spec, &template, a.repeats, a.seed).map_err(Failure::from)
            });
            match cell {
                Ok(reps) => {
                    let s = &reps.summary;
                    println!(
                        "{alg} dim {d}: {}/{} solved, mean steps {:.1}",
                        s.successes, s.runs, s.average
                    );
                    solved += s.successes;
                    records.extend(reps.records());
                }
                Err(e) => eprintln!("{alg} dim {d}: {e}"),
            }
        }
        if records.is_empty() {
            continue;
        }
        let s = ScalingSeries::from_records(&name, alg, records);
        match &s.fit {
            Ok(fit) => println!(
                "{alg}: steps ~ {:.4} * d^{:.4} (log residual {:.3}, dims {}..{})",
                fit.prefactor, fit.exponent, fit.residual, fit.dim_range.0, fit.dim_range.1
            ),
            Err(reason) => eprintln!("warning: {alg}: no fit: {reason}"),
        }
        all_records.extend(s.records.iter().cloned());
        series.push(s);
    }
    let dims: Vec<String> = a.dims.iter().map(|d| d.to_string()).collect();
    let extra = [
        format!("dims={}", dims.join(",")),
        format!("algos={}", a.algos.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")),
        format!("repeats={}", a.repeats),
    ];
    let lines = match &first_spec {
        Some(spec) => echo(spec, &a.ga.options(a.algos[0], a.seed), &extra),
        None => return Err(Failure::Config("no sweep cell could be configured".into())),
    };
    harness::export_series(&series, &a.output, &lines)?;
    if let Some(p) = &a.records {
        harness::export_records(&all_records, p, &lines)?;
    }
    if let Some(p) = &a.plot {
        match harness::emit_plot_script(&series, p) {
            Ok(()) => {}
            Err(e) => eprintln!("warning: no plot written: {e}"),
        }
    }
    if solved == 0 {
        return Err(Failure::Run("no run in the sweep reached the target".into()));
    }
    Ok(())
}

fn scatter(a: ScatterArgs) -> CliResult {
    let spec = resolve(&a.target, a.dim)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &alg in &a.algos {
        let reps = repeat_runs(&spec, &a.ga.options(alg, a.seed), a.repeats, a.seed)?;
        let s = &reps.summary;
        println!(
            "{alg:<11} {}/{} solved  max {:.0} ({:.1}%)  min {:.0} ({:.1}%)  average {:.1}  std {:.1}  median {:.1}",
            s.successes, s.runs, s.max, s.max_dev_pct, s.min, s.min_dev_pct, s.average, s.std_dev, s.median
        );
        records.extend(reps.records());
        rows.push(reps.summary);
    }
    let extra = [format!("repeats={}", a.repeats)];
    let lines = echo(&spec, &a.ga.options(a.algos[0], a.seed), &extra);
    harness::export_summaries(&rows, &a.output, &lines)?;
    if let Some(p) = &a.records {
        harness::export_records(&records, p, &lines)?;
    }
    if rows.iter().all(|r| r.unsolved()) {
        return Err(Failure::Run("no run reached the target".into()));
    }
    Ok(())
}

fn grunge_gen(a: GenArgs) -> CliResult {
    let opts = GenerateOptions {
        depth: (a.depth_min, a.depth_max),
        width: (a.width_min, a.width_max),
        bounds: Bounds::new(a.lower, a.upper)?,
        mixed_sign: a.mixed_sign,
    };
    let l = grunge::generate(a.m, a.n, a.seed, &opts)?;
    l.save(&a.output)?;
    println!("{} written to {}", l.name(), a.output.display());
    Ok(())
}

fn grunge_enum(a: EnumArgs) -> CliResult {
    let l = GrungeLandscape::load(&a.landscape)?;
    let opts = EnumerateOptions::new(a.grid, a.merge_tol);
    let cat = match a.multistart {
        Some(n) => grunge::multistart(&l, n, a.seed, &opts)?,
        None => grunge::enumerate(&l, &opts)?,
    };
    cat.save(&a.output)?;
    let best = cat.global_min().map_or(f64::NAN, |m| m.value);
    println!(
        "{}: {} minima, global minimum {best:.12}, {} plateau and {} failed starts",
        l.name(),
        cat.entries.len(),
        cat.plateau_starts,
        cat.failed_starts
    );
    if cat.entries.is_empty() {
        return Err(Failure::Run("no minimum found".into()));
    }
    Ok(())
}

fn grunge_solve(a: GrungeSolveArgs) -> CliResult {
    let l = GrungeLandscape::load(&a.landscape)?;
    let dim = l.dim();
    let mut spec = FunctionSpec::new(FunctionKind::Grunge(Arc::new(l)), dim)?;
    if let Some(p) = &a.catalog {
        spec = with_catalog(spec, p)?;
    }
    if let Some(v) = a.target {
        spec = spec.with_target(v, None);
    }
    if spec.target_value.is_none() {
        return Err(Failure::Config(format!(
            "{} has no known global minimum; enumerate it first with `gabench grunge enum` and pass --catalog",
            spec.name
        )));
    }
    let opts = a.ga.options(a.algo, a.seed);
    let extra = [format!("landscape={}", a.landscape.display())];
    single_run(&spec, &opts, a.output.as_deref(), &extra)
}

/// Algorithms that can run at `dim`.
pub fn applicable(algos: &[CrossoverKind], dim: usize) -> Vec<CrossoverKind> {
    algos
        .iter()
        .copied()
        .filter(|a| match a {
            CrossoverKind::Portugal(k) => *k < dim,
            _ => true,
        })
        .collect()
}
