//! Randomized-Gaussian landscapes (GRUNGE).
//!
//! A landscape is a sum of `N` Gaussians in `M` dimensions,
//! `f(x) = sum_i w_i exp(-z_i |x - c_i|^2)`, with random weights `w_i`,
//! widths `z_i` and centers `c_i`. Its global minimum is not known by
//! construction, so [`enumerate`] locally optimizes from every node of a
//! regular grid and collects the distinct minima into a [`MinimaCatalog`].
//!
//! Landscape file layout (text, one record per line):
//!
//! ```text
//! GRUNGE 1
//! M N
//! w z c_1 ... c_M        (N lines)
//! BOUNDS lo hi
//! ```
//!
//! Catalog file layout: `MINIMA <count>`, then `value x_1 ... x_M hits` per
//! line in ascending order of value.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::{Bounds, Objective};
use crate::localopt::{minimize, LocalOptSettings};

pub const FORMAT_VERSION: u32 = 1;

/// Largest grid enumeration accepted by [`enumerate`].
pub const MAX_ENUMERATION_STARTS: f64 = 1e8;

/// Converged points whose value is this close to zero (relative to the
/// deepest weight) sit on a flat patch between Gaussians and are not minima.
const PLATEAU_TOL: f64 = 1e-10;

/// Sampling ranges for [`generate`].
#[derive(Clone, Debug, PartialEq)]
pub struct GenerateOptions {
    /// Weight range; negative values are wells.
    pub depth: (f64, f64),
    /// Width (exponent scale) range.
    pub width: (f64, f64),
    pub bounds: Bounds,
    /// Allow weights of either sign.
    pub mixed_sign: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            depth: (-10.0, -0.1),
            width: (0.5, 5.0),
            bounds: Bounds {
                lower: 0.0,
                upper: 10.0,
            },
            mixed_sign: false,
        }
    }
}

impl GenerateOptions {
    fn validate(&self) -> Result<()> {
        let (dlo, dhi) = self.depth;
        let (wlo, whi) = self.width;
        if !(dlo.is_finite() && dhi.is_finite() && dlo <= dhi) {
            return Err(Error::Parameter(format!("bad depth range [{dlo}, {dhi}]")));
        }
        if !self.mixed_sign && dhi >= 0.0 {
            return Err(Error::Parameter(format!(
                "depth range [{dlo}, {dhi}] must be negative unless mixed signs are enabled"
            )));
        }
        if !(wlo > 0.0 && whi.is_finite() && wlo <= whi) {
            return Err(Error::Parameter(format!(
                "width range [{wlo}, {whi}] must be positive"
            )));
        }
        Bounds::new(self.bounds.lower, self.bounds.upper)?;
        Ok(())
    }
}

/// Parameters of one randomized-Gaussian objective.
#[derive(Clone, Debug, PartialEq)]
pub struct GrungeLandscape {
    dim: usize,
    weights: Vec<f64>,
    widths: Vec<f64>,
    /// Row-major, one `dim`-vector per Gaussian.
    centers: Vec<f64>,
    pub bounds: Bounds,
}

/// Draws a landscape; identical arguments give an identical landscape.
pub fn generate(m: usize, n: usize, seed: u64, opts: &GenerateOptions) -> Result<GrungeLandscape> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter(format!(
            "landscape needs M >= 1 and N >= 1, got M={m} N={n}"
        )));
    }
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(n);
    let mut widths = Vec::with_capacity(n);
    let mut centers = Vec::with_capacity(n * m);
    for _ in 0..n {
        weights.push(rng.random_range(opts.depth.0..=opts.depth.1));
        widths.push(rng.random_range(opts.width.0..=opts.width.1));
        for _ in 0..m {
            centers.push(opts.bounds.sample(&mut rng));
        }
    }
    Ok(GrungeLandscape {
        dim: m,
        weights,
        widths,
        centers,
        bounds: opts.bounds,
    })
}

impl GrungeLandscape {
    /// Builds a landscape from explicit parameters; `centers` holds one
    /// vector per Gaussian.
    pub fn new(
        weights: Vec<f64>,
        widths: Vec<f64>,
        centers: Vec<Vec<f64>>,
        bounds: Bounds,
    ) -> Result<Self> {
        let dim = centers.first().map_or(0, Vec::len);
        if centers.iter().any(|c| c.len() != dim) {
            return Err(Error::Validation(
                "all centers must have the same dimension".into(),
            ));
        }
        let l = GrungeLandscape {
            dim,
            weights,
            widths,
            centers: centers.concat(),
            bounds,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if self.dim == 0 || n == 0 {
            return Err(Error::Validation("landscape needs M >= 1 and N >= 1".into()));
        }
        if self.widths.len() != n || self.centers.len() != n * self.dim {
            return Err(Error::Validation(format!(
                "inconsistent sizes: {n} weights, {} widths, {} center coordinates for M={}",
                self.widths.len(),
                self.centers.len(),
                self.dim
            )));
        }
        Bounds::new(self.bounds.lower, self.bounds.upper)
            .map_err(|e| Error::Validation(e.to_string()))?;
        for (i, (&w, &z)) in self.weights.iter().zip(&self.widths).enumerate() {
            if !w.is_finite() {
                return Err(Error::Validation(format!("gaussian {i}: weight {w} is not finite")));
            }
            if !(z > 0.0 && z.is_finite()) {
                return Err(Error::Validation(format!(
                    "gaussian {i}: width {z} must be positive"
                )));
            }
            if let Some(c) = self.center(i).iter().find(|c| !self.bounds.contains(**c)) {
                return Err(Error::Validation(format!(
                    "gaussian {i}: center coordinate {c} outside bounds"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gaussian_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    /// `GRUNGE[M,N]`.
    pub fn name(&self) -> String {
        format!("GRUNGE[{},{}]", self.dim, self.weights.len())
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w *= factor);
        out
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.dim,
                x.len()
            )));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value_unchecked(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut g = vec![0.0; self.dim];
        self.value_gradient_unchecked(x, &mut g);
        Ok(g)
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for ((w, z), c) in self
            .weights
            .iter()
            .zip(&self.widths)
            .zip(self.centers.chunks_exact(self.dim))
        {
            let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            sum += w * (-z * r2).exp();
        }
        sum
    }

    pub(crate) fn value_gradient_unchecked(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut sum = 0.0;
        for ((w, z), c) in self
            .weights
            .iter()
            .zip(&self.widths)
            .zip(self.centers.chunks_exact(self.dim))
        {
            let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            let term = w * (-z * r2).exp();
            if term == 0.0 {
                continue;
            }
            sum += term;
            let k = -2.0 * z * term;
            for ((g, a), b) in grad.iter_mut().zip(x).zip(c) {
                *g += k * (a - b);
            }
        }
        sum
    }

    /// Serializes to the text format. Numbers use the shortest decimal
    /// form that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "GRUNGE {FORMAT_VERSION}");
        let _ = writeln!(out, "{} {}", self.dim, self.weights.len());
        for i in 0..self.weights.len() {
            let _ = write!(out, "{} {}", self.weights[i], self.widths[i]);
            for c in self.center(i) {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "BOUNDS {} {}", self.bounds.lower, self.bounds.upper);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::file(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        fs::read_to_string(path)
            .map_err(|e| Error::file(path, e))?
            .parse()
    }
}

impl Objective for GrungeLandscape {
    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> Bounds {
        self.bounds
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.value_gradient_unchecked(x, grad);
    }

    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.value_gradient_unchecked(x, grad)
    }
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

impl FromStr for GrungeLandscape {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |expect: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of file, expected {expect}")))
        };

        let (ln, header) = next("header")?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("GRUNGE") {
            return Err(Error::parse(ln, "missing `GRUNGE` header"));
        }
        let version = tok
            .next()
            .ok_or_else(|| Error::parse(ln, "missing format version"))?;
        if version != FORMAT_VERSION.to_string() {
            return Err(Error::Version {
                found: version.to_string(),
                expected: FORMAT_VERSION,
            });
        }

        let (ln, sizes) = next("`M N`")?;
        let sizes: Vec<&str> = sizes.split_whitespace().collect();
        if sizes.len() != 2 {
            return Err(Error::parse(ln, "expected `M N`"));
        }
        let m = parse_usize(sizes[0], ln, "dimension")?;
        let n = parse_usize(sizes[1], ln, "gaussian count")?;
        if m == 0 || n == 0 {
            return Err(Error::parse(ln, "M and N must be positive"));
        }

        // Cap preallocation; the counts come from untrusted input.
        let cap = n.min(1 << 16);
        let mut weights = Vec::with_capacity(cap);
        let mut widths = Vec::with_capacity(cap);
        let mut centers = Vec::with_capacity(cap.saturating_mul(m).min(1 << 20));
        for i in 0..n {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::parse(i + 3, format!("truncated: gaussian {i} of {n} missing")))?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != m + 2 {
                return Err(Error::parse(
                    ln,
                    format!("expected {} numbers, found {}", m + 2, toks.len()),
                ));
            }
            weights.push(parse_f64(toks[0], ln, "weight")?);
            widths.push(parse_f64(toks[1], ln, "width")?);
            for t in &toks[2..] {
                centers.push(parse_f64(t, ln, "center coordinate")?);
            }
        }

        let bounds_line = n + 3;
        let (ln, row) = lines
            .next()
            .ok_or_else(|| Error::parse(bounds_line, "truncated: missing BOUNDS line"))?;
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "BOUNDS" {
            return Err(Error::parse(ln, "expected `BOUNDS lo hi`"));
        }
        let bounds = Bounds {
            lower: parse_f64(toks[1], ln, "lower bound")?,
            upper: parse_f64(toks[2], ln, "upper bound")?,
        };
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(Error::parse(ln, format!("unexpected trailing content `{extra}`")));
        }

        let l = GrungeLandscape {
            dim: m,
            weights,
            widths,
            centers,
            bounds,
        };
        l.validate()?;
        Ok(l)
    }
}

// ---------------------------------------------------------------------------
// Minima enumeration

/// One distinct local minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub location: Vec<f64>,
    pub value: f64,
    /// Number of starts that converged into it.
    pub hits: u64,
}

/// Distinct minima sorted ascending by value; the first entry is the global
/// minimum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MinimaCatalog {
    pub entries: Vec<Minimum>,
    /// Starts that converged onto a flat patch.
    pub plateau_starts: u64,
    /// Starts whose local optimization did not reach a stationary point.
    pub failed_starts: u64,
}

impl MinimaCatalog {
    pub fn global_min(&self) -> Option<&Minimum> {
        self.entries.first()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "MINIMA {}", self.entries.len());
        for e in &self.entries {
            let _ = write!(out, "{}", e.value);
            for x in &e.location {
                let _ = write!(out, " {x}");
            }
            let _ = writeln!(out, " {}", e.hits);
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::file(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        fs::read_to_string(path)
            .map_err(|e| Error::file(path, e))?
            .parse()
    }
}

impl FromStr for MinimaCatalog {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty catalog"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "MINIMA" {
            return Err(Error::parse(ln, "expected `MINIMA <count>`"));
        }
        let count = parse_usize(toks[1], ln, "entry count")?;
        let mut entries = Vec::with_capacity(count.min(1 << 16));
        let mut dim = None;
        for i in 0..count {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::parse(i + 2, format!("truncated: entry {i} of {count} missing")))?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(Error::parse(ln, "expected `value x_1 ... x_M hits`"));
            }
            let m = toks.len() - 2;
            if *dim.get_or_insert(m) != m {
                return Err(Error::parse(ln, "inconsistent entry dimension"));
            }
            let value = parse_f64(toks[0], ln, "value")?;
            let location = toks[1..=m]
                .iter()
                .map(|t| parse_f64(t, ln, "coordinate"))
                .collect::<Result<Vec<_>>>()?;
            let hits = toks[m + 1]
                .parse::<u64>()
                .map_err(|_| Error::parse(ln, format!("invalid hit count `{}`", toks[m + 1])))?;
            if !value.is_finite() || location.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(ln, "non-finite number"));
            }
            if let Some(prev) = entries.last().map(|e: &Minimum| e.value) {
                if value < prev {
                    return Err(Error::parse(ln, "entries are not sorted by value"));
                }
            }
            entries.push(Minimum {
                location,
                value,
                hits,
            });
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(Error::parse(ln, format!("unexpected trailing content `{extra}`")));
        }
        Ok(MinimaCatalog {
            entries,
            ..Default::default()
        })
    }
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub grid_points_per_dim: usize,
    /// Euclidean distance under which two converged points are the same minimum.
    pub merge_tol: f64,
    pub local: LocalOptSettings,
    /// A converged point counts as stationary below this gradient 2-norm.
    pub stationary_tol: f64,
}

impl EnumerateOptions {
    pub fn new(grid_points_per_dim: usize, merge_tol: f64) -> Self {
        EnumerateOptions {
            grid_points_per_dim,
            merge_tol,
            local: LocalOptSettings {
                // Polish to a stationary point rather than stopping on a
                // small change in value.
                fitness_tol: 0.0,
                gradient_tol: 1e-10,
                ..Default::default()
            },
            stationary_tol: 1e-6,
        }
    }
}

/// Outcome of one start, before merging.
#[derive(Clone, Debug)]
pub enum StartOutcome {
    Minimum(Vec<f64>, f64),
    Plateau,
    Failed,
}

/// Locally optimizes from `x0` and classifies the end point. Stationary
/// points that are not minima (saddles reached along a symmetry line) are
/// nudged off and re-optimized a few times before the start is abandoned.
pub fn classify_start(l: &GrungeLandscape, x0: &[f64], opts: &EnumerateOptions) -> StartOutcome {
    let deepest = l.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let mut start = x0.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(x0.iter().fold(0u64, |h, v| {
        h.rotate_left(7) ^ v.to_bits()
    }));
    for _ in 0..=SADDLE_ESCAPES {
        let Ok(r) = minimize(l, &start, &opts.local) else {
            return StartOutcome::Failed;
        };
        let mut g = vec![0.0; l.dim];
        let v = l.value_gradient_unchecked(&r.x, &mut g);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm >= opts.stationary_tol {
            return StartOutcome::Failed;
        }
        if v.abs() <= PLATEAU_TOL * deepest {
            return StartOutcome::Plateau;
        }
        if hessian(l, &r.x).cholesky().is_some() {
            return StartOutcome::Minimum(r.x, v);
        }
        let w = l.bounds.width();
        start = r
            .x
            .iter()
            .map(|&xi| xi + 1e-4 * w * rng.random_range(-1.0..1.0))
            .collect();
    }
    StartOutcome::Failed
}

const SADDLE_ESCAPES: usize = 4;

/// Central-difference Hessian from analytic gradients, symmetrized.
fn hessian(l: &GrungeLandscape, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let (mut gp, mut gm) = (vec![0.0; n], vec![0.0; n]);
    for j in 0..n {
        let step = 1e-5 * (1.0 + x[j].abs());
        xp[j] = x[j] + step;
        l.value_gradient_unchecked(&xp, &mut gp);
        xp[j] = x[j] - step;
        l.value_gradient_unchecked(&xp, &mut gm);
        xp[j] = x[j];
        for i in 0..n {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    (&h + h.transpose()) * 0.5
}

/// Merges classified starts into a catalog. Points are visited in the given
/// order, so ties in value keep the order of first discovery.
pub fn merge_outcomes<I>(outcomes: I, merge_tol: f64) -> MinimaCatalog
where
    I: IntoIterator<Item = StartOutcome>,
{
    let mut cat = MinimaCatalog::default();
    for o in outcomes {
        match o {
            StartOutcome::Plateau => cat.plateau_starts += 1,
            StartOutcome::Failed => cat.failed_starts += 1,
            StartOutcome::Minimum(x, v) => {
                let window = 1e-7 * (1.0 + v.abs());
                let hit = cat.entries.iter_mut().find(|e| {
                    (e.value - v).abs() <= window && {
                        let d2: f64 = e
                            .location
                            .iter()
                            .zip(&x)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        d2.sqrt() <= merge_tol
                    }
                });
                match hit {
                    Some(e) => {
                        e.hits += 1;
                        if v < e.value {
                            e.value = v;
                            e.location = x;
                        }
                    }
                    None => cat.entries.push(Minimum {
                        location: x,
                        value: v,
                        hits: 1,
                    }),
                }
            }
        }
    }
    cat.entries.sort_by(|a, b| a.value.total_cmp(&b.value));
    cat
}

/// Grid node `index` of a `points^dim` grid spanning `bounds` edge to edge.
pub fn grid_node(index: u64, points: usize, dim: usize, bounds: Bounds) -> Vec<f64> {
    let step = bounds.width() / (points - 1) as f64;
    let mut rest = index;
    let mut x = vec![0.0; dim];
    for xj in x.iter_mut().rev() {
        let k = rest % points as u64;
        rest /= points as u64;
        *xj = bounds.lower + k as f64 * step;
    }
    x
}

/// Runs a local optimization from every node of the grid and returns the
/// distinct minima.
pub fn enumerate(l: &GrungeLandscape, opts: &EnumerateOptions) -> Result<MinimaCatalog> {
    let g = opts.grid_points_per_dim;
    if g < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points per dimension, got {g}"
        )));
    }
    if !(opts.merge_tol > 0.0) {
        return Err(Error::Parameter("merge tolerance must be positive".into()));
    }
    opts.local.validate()?;
    let starts = (g as f64).powi(l.dim as i32);
    if starts > MAX_ENUMERATION_STARTS {
        return Err(Error::GridTooLarge {
            starts,
            limit: MAX_ENUMERATION_STARTS,
        });
    }
    let total = starts as u64;
    let outcomes: Vec<StartOutcome> = (0..total)
        .into_par_iter()
        .map(|i| classify_start(l, &grid_node(i, g, l.dim, l.bounds), opts))
        .collect();
    Ok(merge_outcomes(outcomes, opts.merge_tol))
}

/// Enumeration by uniformly random starts instead of a grid.
pub fn multistart(
    l: &GrungeLandscape,
    starts: u64,
    seed: u64,
    opts: &EnumerateOptions,
) -> Result<MinimaCatalog> {
    opts.local.validate()?;
    let outcomes: Vec<StartOutcome> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let x0 = l.bounds.sample_point(l.dim, &mut rng);
            classify_start(l, &x0, opts)
        })
        .collect();
    Ok(merge_outcomes(outcomes, opts.merge_tol))
}
