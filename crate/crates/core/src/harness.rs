//! Experiment orchestration: repeated runs, dimension sweeps, scatter
//! statistics, power-law fits and their CSV / plot-script exports.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::ga::{run, CrossoverKind, NichingSettings, RunOptions, RunOutcome};

/// Header of the records CSV.
pub const RECORD_COLUMNS: [&str; 11] = [
    "function",
    "dim",
    "algorithm",
    "locopt",
    "niching",
    "mnic",
    "seed",
    "steps",
    "success",
    "best_value",
    "wall_ms",
];

/// Header of the series CSV.
pub const SERIES_COLUMNS: [&str; 7] = [
    "function",
    "algorithm",
    "dim",
    "mean_steps",
    "std_steps",
    "n_success",
    "n_fail",
];

/// One GA run, as stored in the records CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub function: String,
    pub dim: usize,
    pub algorithm: CrossoverKind,
    pub locopt: bool,
    pub niching: Option<NichingSettings>,
    pub seed: u64,
    /// Global steps taken; steps-to-solution when `success`.
    pub steps: u64,
    pub success: bool,
    pub best_value: f64,
    /// Informational only.
    pub wall_ms: u64,
}

/// Descriptive statistics over the successful runs of one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterSummary {
    pub function: String,
    pub dim: usize,
    pub algorithm: CrossoverKind,
    pub locopt: bool,
    pub runs: usize,
    pub successes: usize,
    pub max: f64,
    pub min: f64,
    pub average: f64,
    pub median: f64,
    pub std_dev: f64,
    /// `|max - average| / average * 100`.
    pub max_dev_pct: f64,
    /// `|min - average| / average * 100`.
    pub min_dev_pct: f64,
}

impl ScatterSummary {
    /// No run reached the target.
    pub fn unsolved(&self) -> bool {
        self.successes == 0
    }

    pub fn from_records(records: &[RunRecord]) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::Parameter("no records to summarize".into()))?;
        let mut steps: Vec<f64> = records
            .iter()
            .filter(|r| r.success)
            .map(|r| r.steps as f64)
            .collect();
        steps.sort_by(f64::total_cmp);
        let s = Stats::of(&steps);
        let dev = |x: f64| {
            if s.mean > 0.0 {
                (x - s.mean).abs() / s.mean * 100.0
            } else {
                0.0
            }
        };
        Ok(ScatterSummary {
            function: first.function.clone(),
            dim: first.dim,
            algorithm: first.algorithm,
            locopt: first.locopt,
            runs: records.len(),
            successes: steps.len(),
            max: s.max,
            min: s.min,
            average: s.mean,
            median: s.median,
            std_dev: s.std,
            max_dev_pct: dev(s.max),
            min_dev_pct: dev(s.min),
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Stats {
    mean: f64,
    std: f64,
    median: f64,
    min: f64,
    max: f64,
}

impl Stats {
    /// `sorted` must be ascending. Empty input gives NaNs.
    fn of(sorted: &[f64]) -> Stats {
        let n = sorted.len();
        if n == 0 {
            return Stats {
                mean: f64::NAN,
                std: f64::NAN,
                median: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        Stats {
            mean,
            std,
            median,
            min: sorted[0],
            max: sorted[n - 1],
        }
    }
}

/// Runs with seeds `master_seed + 1 ..= master_seed + count`.
#[derive(Clone, Debug)]
pub struct Repeats {
    pub outcomes: Vec<RunOutcome>,
    pub summary: ScatterSummary,
}

impl Repeats {
    pub fn records(&self) -> Vec<RunRecord> {
        self.outcomes.iter().map(|o| o.record.clone()).collect()
    }
}

pub fn repeat_runs(
    f: &FunctionSpec,
    template: &RunOptions,
    count: usize,
    master_seed: u64,
) -> Result<Repeats> {
    if count == 0 {
        return Err(Error::Parameter("repeat count must be at least 1".into()));
    }
    let outcomes = (1..=count as u64)
        .into_par_iter()
        .map(|i| {
            let mut opts = template.clone();
            opts.seed = master_seed + i;
            run(f, &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<RunRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    let summary = ScatterSummary::from_records(&records)?;
    Ok(Repeats { outcomes, summary })
}

/// Least-squares fit of `log(steps) = log(prefactor) + exponent * log(dim)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub dim_range: (usize, usize),
}

pub fn fit_power_law(points: &[(usize, f64)]) -> Result<PowerFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(d, s)| *d > 0 && s.is_finite() && *s > 0.0)
        .map(|&(d, s)| ((d as f64).ln(), s.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return Err(Error::NoFit(format!(
            "{} usable point(s); at least 2 dimensions with successes are required",
            pts.len()
        )));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::NoFit("all points share one dimension".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let dims = points.iter().map(|p| p.0);
    Ok(PowerFit {
        exponent,
        prefactor: intercept.exp(),
        residual,
        dim_range: (dims.clone().min().unwrap_or(0), dims.max().unwrap_or(0)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub dim: usize,
    pub mean_steps: f64,
    pub std_steps: f64,
    pub median_steps: f64,
    pub n_success: usize,
    pub n_fail: usize,
}

impl SeriesPoint {
    pub fn from_records(dim: usize, records: &[RunRecord]) -> Self {
        let mut steps: Vec<f64> = records
            .iter()
            .filter(|r| r.success)
            .map(|r| r.steps as f64)
            .collect();
        steps.sort_by(f64::total_cmp);
        let s = Stats::of(&steps);
        SeriesPoint {
            dim,
            mean_steps: s.mean,
            std_steps: s.std,
            median_steps: s.median,
            n_success: steps.len(),
            n_fail: records.len() - steps.len(),
        }
    }
}

/// Steps-to-solution versus dimension for one algorithm.
#[derive(Clone, Debug)]
pub struct ScalingSeries {
    pub function: String,
    pub algorithm: CrossoverKind,
    pub points: Vec<SeriesPoint>,
    pub records: Vec<RunRecord>,
    /// `Err` carries the reason no exponent could be fitted.
    pub fit: std::result::Result<PowerFit, String>,
}

impl ScalingSeries {
    /// Builds the series from raw records (grouped by dimension) and fits
    /// the mean steps of successful runs.
    pub fn from_records(function: &str, algorithm: CrossoverKind, records: Vec<RunRecord>) -> Self {
        let mut dims: Vec<usize> = records.iter().map(|r| r.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        let points: Vec<SeriesPoint> = dims
            .iter()
            .map(|&d| {
                let at: Vec<RunRecord> = records.iter().filter(|r| r.dim == d).cloned().collect();
                SeriesPoint::from_records(d, &at)
            })
            .collect();
        let usable: Vec<(usize, f64)> = points
            .iter()
            .filter(|p| p.n_success > 0)
            .map(|p| (p.dim, p.mean_steps))
            .collect();
        let fit = fit_power_law(&usable).map_err(|e| e.to_string());
        ScalingSeries {
            function: function.to_string(),
            algorithm,
            points,
            records,
            fit,
        }
    }
}

/// Repeats `repeats` runs at every dimension and fits the scaling exponent.
pub fn dimension_sweep<F>(
    make: F,
    dims: &[usize],
    template: &RunOptions,
    repeats: usize,
    master_seed: u64,
) -> Result<ScalingSeries>
where
    F: Fn(usize) -> Result<FunctionSpec>,
{
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "sweep dimensions must be non-empty and strictly increasing".into(),
        ));
    }
    let mut records = Vec::new();
    let mut name = String::new();
    for &d in dims {
        let f = make(d)?;
        name.clone_from(&f.name);
        records.extend(repeat_runs(&f, template, repeats, master_seed)?.records());
    }
    Ok(ScalingSeries::from_records(&name, template.algorithm, records))
}

// ---------------------------------------------------------------------------
// Export

/// `key=value` lines describing a run configuration, written as `#`
/// comments at the top of every CSV.
pub fn config_echo(opts: &RunOptions) -> Vec<String> {
    let c = &opts.config;
    let mut lines = vec![
        format!("algorithm={}", opts.algorithm),
        format!("pool_size={}", c.pool_size),
        format!("fitness_diversity={}", c.fitness_diversity),
        format!("mutation_probability={}", c.mutation_probability),
        format!("father_rank_shape={}", c.father_rank_shape),
        format!("germany_cut_shape={}", c.germany_cut_shape),
        format!("termination_epsilon={}", c.termination_epsilon),
        format!("max_steps={}", c.max_steps),
        format!("fill_attempt_factor={}", c.fill_attempt_factor),
        format!("workers={}", opts.workers),
        format!("seed={}", opts.seed),
    ];
    match &opts.local {
        Some(l) => lines.extend([
            "locopt=true".to_string(),
            format!("memory_pairs={}", l.memory_pairs),
            format!("fitness_tol={}", l.fitness_tol),
            format!("gradient_tol={}", l.gradient_tol),
            format!("max_iterations={}", l.max_iterations),
            format!("armijo={}", l.armijo),
            format!("curvature={}", l.curvature),
        ]),
        None => lines.push("locopt=false".to_string()),
    }
    lines.push(format!("niching={}", niching_column(opts.niching)));
    lines.push(format!("mnic={}", opts.niching.map_or(0, |n| n.mnic)));
    lines
}

fn write_echo<W: Write>(w: &mut W, echo: &[String]) -> Result<()> {
    for line in echo {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

fn niching_column(n: Option<NichingSettings>) -> String {
    match n {
        None => "off".into(),
        Some(s) if s.replace => s.cells_per_dim.to_string(),
        Some(s) => format!("{}-reject", s.cells_per_dim),
    }
}

fn parse_niching(col: &str, mnic: u32, line: usize) -> Result<Option<NichingSettings>> {
    if col == "off" {
        return Ok(None);
    }
    let (cells, replace) = match col.strip_suffix("-reject") {
        Some(c) => (c, false),
        None => (col, true),
    };
    let cells_per_dim = cells
        .parse::<u32>()
        .map_err(|_| Error::parse(line, format!("invalid niching `{col}`")))?;
    let s = NichingSettings {
        cells_per_dim,
        mnic,
        replace,
    };
    s.validate().map_err(|e| Error::parse(line, e.to_string()))?;
    Ok(Some(s))
}

/// Writes the records CSV, preceded by `#` configuration comments.
pub fn write_records<W: Write>(records: &[RunRecord], mut out: W, echo: &[String]) -> Result<()> {
    write_echo(&mut out, echo)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.function.clone(),
            r.dim.to_string(),
            r.algorithm.to_string(),
            r.locopt.to_string(),
            niching_column(r.niching),
            r.niching.map_or(0, |n| n.mnic).to_string(),
            r.seed.to_string(),
            r.steps.to_string(),
            r.success.to_string(),
            r.best_value.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a records CSV written by [`write_records`]; `#` lines are skipped.
pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(RECORD_COLUMNS.iter().copied()) {
        return Err(Error::parse(1, "unexpected records header"));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != RECORD_COLUMNS.len() {
            return Err(Error::parse(line, format!("expected 11 fields, found {}", row.len())));
        }
        let field = |i: usize| &row[i];
        let num = |i: usize| -> Result<u64> {
            field(i)
                .parse::<u64>()
                .map_err(|_| Error::parse(line, format!("invalid {} `{}`", RECORD_COLUMNS[i], field(i))))
        };
        let flag = |i: usize| -> Result<bool> {
            field(i)
                .parse::<bool>()
                .map_err(|_| Error::parse(line, format!("invalid {} `{}`", RECORD_COLUMNS[i], field(i))))
        };
        let mnic = u32::try_from(num(5)?)
            .map_err(|_| Error::parse(line, "mnic out of range"))?;
        out.push(RunRecord {
            function: field(0).to_string(),
            dim: num(1)? as usize,
            algorithm: field(2)
                .parse()
                .map_err(|e: Error| Error::parse(line, e.to_string()))?,
            locopt: flag(3)?,
            niching: parse_niching(field(4), mnic, line)?,
            seed: num(6)?,
            steps: num(7)?,
            success: flag(8)?,
            best_value: field(9)
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("invalid best_value `{}`", field(9))))?,
            wall_ms: num(10)?,
        });
    }
    Ok(out)
}

/// Writes the series CSV with one `#fit` row per fitted algorithm.
pub fn write_series<W: Write>(series: &[ScalingSeries], mut out: W, echo: &[String]) -> Result<()> {
    write_echo(&mut out, echo)?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(SERIES_COLUMNS)?;
        for s in series {
            for p in &s.points {
                w.write_record([
                    s.function.clone(),
                    s.algorithm.to_string(),
                    p.dim.to_string(),
                    p.mean_steps.to_string(),
                    p.std_steps.to_string(),
                    p.n_success.to_string(),
                    p.n_fail.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    for s in series {
        match &s.fit {
            Ok(fit) => writeln!(
                out,
                "#fit {} {} {} {} dims={}..{}",
                s.algorithm, fit.exponent, fit.prefactor, fit.residual, fit.dim_range.0, fit.dim_range.1
            )?,
            Err(reason) => writeln!(out, "#nofit {} {reason}", s.algorithm)?,
        }
    }
    Ok(())
}

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "function",
    "dim",
    "algorithm",
    "locopt",
    "runs",
    "successes",
    "max",
    "max_dev_pct",
    "min",
    "min_dev_pct",
    "average",
    "std",
    "median",
];

pub fn write_summaries<W: Write>(rows: &[ScatterSummary], mut out: W, echo: &[String]) -> Result<()> {
    write_echo(&mut out, echo)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in rows {
        w.write_record([
            s.function.clone(),
            s.dim.to_string(),
            s.algorithm.to_string(),
            s.locopt.to_string(),
            s.runs.to_string(),
            s.successes.to_string(),
            s.max.to_string(),
            s.max_dev_pct.to_string(),
            s.min.to_string(),
            s.min_dev_pct.to_string(),
            s.average.to_string(),
            s.std_dev.to_string(),
            s.median.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::file(path, e))
}

pub fn export_records(records: &[RunRecord], path: &Path, echo: &[String]) -> Result<()> {
    write_records(records, create(path)?, echo)
}

pub fn import_records(path: &Path) -> Result<Vec<RunRecord>> {
    read_records(File::open(path).map_err(|e| Error::file(path, e))?)
}

pub fn export_series(series: &[ScalingSeries], path: &Path, echo: &[String]) -> Result<()> {
    write_series(series, create(path)?, echo)
}

pub fn export_summaries(rows: &[ScatterSummary], path: &Path, echo: &[String]) -> Result<()> {
    write_summaries(rows, create(path)?, echo)
}

/// Gnuplot script drawing mean steps versus dimension on log axes, one
/// curve and one fitted power law per algorithm.
pub fn plot_script(series: &[ScalingSeries]) -> Result<String> {
    let drawn: Vec<&ScalingSeries> = series
        .iter()
        .filter(|s| s.points.iter().any(|p| p.n_success > 0))
        .collect();
    if drawn.is_empty() {
        return Err(Error::Parameter("nothing to plot: series has no solved points".into()));
    }
    let mut out = String::new();
    let title = &drawn[0].function;
    let _ = writeln!(out, "# steps to solution versus dimension for {title}");
    let _ = writeln!(out, "set terminal pngcairo size 900,650");
    let _ = writeln!(out, "set output 'scaling.png'");
    let _ = writeln!(out, "set title '{}'", title.replace('\'', "''"));
    let _ = writeln!(out, "set logscale xy");
    let _ = writeln!(out, "set xlabel 'dimension'");
    let _ = writeln!(out, "set ylabel 'global optimization steps'");
    let _ = writeln!(out, "set key top left");
    for (i, s) in drawn.iter().enumerate() {
        let _ = writeln!(out, "$data{i} << EOD");
        for p in s.points.iter().filter(|p| p.n_success > 0) {
            let _ = writeln!(out, "{} {} {}", p.dim, p.mean_steps, p.std_steps);
        }
        let _ = writeln!(out, "EOD");
        if let Ok(fit) = &s.fit {
            let _ = writeln!(out, "fit{i}(x) = {} * x**{}", fit.prefactor, fit.exponent);
        }
    }
    let mut parts = Vec::new();
    for (i, s) in drawn.iter().enumerate() {
        let color = i + 1;
        parts.push(format!(
            "$data{i} using 1:2 with linespoints lc {color} pt 7 title '{}'",
            s.algorithm
        ));
        if let Ok(fit) = &s.fit {
            parts.push(format!(
                "fit{i}(x) with lines lc {color} dt 2 title '{} fit d^{{{:.2}}}'",
                s.algorithm, fit.exponent
            ));
        }
    }
    let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
    Ok(out)
}

/// Writes [`plot_script`] to `path`; nothing is written on error.
pub fn emit_plot_script(series: &[ScalingSeries], path: &Path) -> Result<()> {
    let script = plot_script(series)?;
    std::fs::write(path, script).map_err(|e| Error::file(path, e))
}
