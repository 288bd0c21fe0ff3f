use gabench::functions::{LunacekParams, RASTRIGIN_LIMIT, SCHWEFEL_LIMIT};
use gabench::ga::{run, NichingSettings, RunOptions, STANDARD_ALGORITHMS};
use gabench::{lookup_function, FunctionKind, FunctionSpec, Objective};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::ValidateArgs;
use crate::{applicable, CliResult, Failure};

const BUILTIN: [(&str, usize); 7] = [
    ("ackley", 6),
    ("ackley-simplified-grad", 1),
    ("rastrigin", 6),
    ("schwefel", 6),
    ("schafferf7", 6),
    ("schafferf6", 2),
    ("lunacek", 6),
];

struct Row {
    function: String,
    check: &'static str,
    pass: bool,
    detail: String,
}

pub fn run_suite(a: ValidateArgs) -> CliResult {
    let targets: Vec<(String, usize)> = match &a.function {
        None => BUILTIN.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
        Some(f) => match BUILTIN.iter().find(|(n, _)| n == f) {
            Some((n, d)) => vec![(n.to_string(), *d)],
            None if f.starts_with("grunge:") => vec![(f.clone(), 0)],
            None => return Err(Failure::Config(format!("unknown function `{f}`"))),
        },
    };
    let mut rows = Vec::new();
    for (name, dim) in targets {
        let spec = if dim == 0 {
            // Landscapes carry their own dimension.
            load_landscape(&name)
        } else {
            lookup_function(&name, dim).map_err(|e| e.to_string())
        };
        let spec = match spec {
            Ok(s) => s,
            Err(e) => {
                rows.push(Row { function: name, check: "load", pass: false, detail: e });
                continue;
            }
        };
        rows.push(gradient_row(&spec, a.points, a.seed));
        if let Some(r) = minimum_row(&spec) {
            rows.push(r);
        }
        rows.extend(invariant_rows(&spec, a.steps, a.seed));
    }

    println!("{:<24} {:<18} {:<6} detail", "function", "check", "result");
    for r in &rows {
        println!(
            "{:<24} {:<18} {:<6} {}",
            r.function,
            r.check,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Validation(format!("{failed} of {} checks failed", rows.len())));
    }
    Ok(())
}

fn load_landscape(name: &str) -> Result<FunctionSpec, String> {
    let path = name.trim_start_matches("grunge:");
    let l = gabench::GrungeLandscape::load(std::path::Path::new(path)).map_err(|e| e.to_string())?;
    lookup_function(name, l.dim()).map_err(|e| e.to_string())
}

fn near_kink(f: &FunctionSpec, x: &[f64]) -> bool {
    match &f.kind {
        FunctionKind::Ackley | FunctionKind::AckleySimplifiedGradient => {
            x.iter().map(|v| v * v).sum::<f64>() < 1e-4
        }
        FunctionKind::Rastrigin => x.iter().any(|v| (v.abs() - RASTRIGIN_LIMIT).abs() < 1e-3),
        FunctionKind::Schwefel => {
            x.iter().any(|v| v.abs() < 1e-2 || (v.abs() - SCHWEFEL_LIMIT).abs() < 1e-2)
        }
        FunctionKind::SchafferF7 | FunctionKind::SchafferF6 => {
            x.windows(2).any(|w| w[0].hypot(w[1]) < 1e-2)
        }
        FunctionKind::Lunacek(p) => lunacek_switch(p, x) < 1e-3,
        FunctionKind::Grunge(_) => false,
    }
}

fn lunacek_switch(p: &LunacekParams, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s1: f64 = x.iter().map(|v| (v - p.mu1).powi(2)).sum();
    let s2: f64 = x.iter().map(|v| (v - p.mu2()).powi(2)).sum();
    (s1 - p.d * n - p.s * s2).abs()
}

fn gradient_row(f: &FunctionSpec, points: usize, seed: u64) -> Row {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < points {
        let x = f.bounds.sample_point(f.dim, &mut rng);
        if near_kink(f, &x) {
            continue;
        }
        done += 1;
        let mut g = vec![0.0; f.dim];
        f.gradient(&x, &mut g);
        let mut xp = x.clone();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..f.dim {
            let h = 1e-6 * (1.0 + x[j].abs());
            xp[j] = x[j] + h;
            let up = f.value(&xp);
            xp[j] = x[j] - h;
            let fd = (up - f.value(&xp)) / (2.0 * h);
            xp[j] = x[j];
            num += (fd - g[j]).powi(2);
            den += g[j] * g[j];
        }
        let err = f64::sqrt(num) / f64::sqrt(den).max(1e-2);
        worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
    }
    Row {
        function: f.to_string(),
        check: "gradient",
        pass: worst < 1e-5,
        detail: format!("max relative error {worst:.2e} over {points} points"),
    }
}

fn minimum_row(f: &FunctionSpec) -> Option<Row> {
    let (target, x) = (f.target_value?, f.target_point.as_ref()?);
    let v = f.value(x);
    let tol = if matches!(f.kind, FunctionKind::Schwefel) { 1e-3 * f.dim as f64 } else { 1e-12 };
    Some(Row {
        function: f.to_string(),
        check: "known minimum",
        pass: (v - target).abs() <= tol,
        detail: format!("f(argmin) = {v:.3e}, expected {target:.3e}"),
    })
}

/// Audited runs never stop early: the target is unreachable, so every
/// step goes through the pool audit.
fn invariant_rows(f: &FunctionSpec, steps: u64, seed: u64) -> Vec<Row> {
    let spec = f.clone().with_target(f64::NEG_INFINITY, None);
    let mut rows = Vec::new();
    for alg in applicable(&STANDARD_ALGORITHMS, f.dim).into_iter().take(3) {
        for niching in [None, Some(NichingSettings::new(4, 10))] {
            let mut o = RunOptions::new(alg, seed);
            o.config.pool_size = 100;
            o.config.max_steps = steps;
            o.config.termination_epsilon = 0.0;
            o.niching = niching;
            o.audit = true;
            let label = if niching.is_some() { "pool+niche audit" } else { "pool audit" };
            let (pass, detail) = match run(&spec, &o) {
                Ok(out) => (true, format!("{alg}: {} steps, best {:.3e}", out.record.steps, out.best.fitness)),
                Err(e) => (false, format!("{alg}: {e}")),
            };
            rows.push(Row { function: f.to_string(), check: label, pass, detail });
        }
    }
    rows
}
