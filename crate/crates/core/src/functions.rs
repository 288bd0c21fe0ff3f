//! Closed-form benchmark objectives.
//!
//! Every function comes with an analytic gradient, a search box and its known
//! global minimum. Rastrigin and Schwefel carry a harmonic penalty outside
//! the box so that unconstrained local optimization stays inside it.
//!
//! The free functions (`ackley_value`, `rastrigin_gradient`, ...) validate
//! their input and are the reference entry points. [`FunctionSpec`] wraps a
//! function together with its dimension and bounds and implements
//! [`Objective`], the interface the optimizers consume.

use std::f64::consts::{E, PI};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grunge::GrungeLandscape;

const TAU: f64 = 2.0 * PI;

/// Box half-width used by Rastrigin, outside of which the harmonic penalty applies.
pub const RASTRIGIN_LIMIT: f64 = 5.12;
/// Box half-width used by Schwefel.
pub const SCHWEFEL_LIMIT: f64 = 500.0;
/// Per-dimension offset in the Schwefel definition.
pub const SCHWEFEL_OFFSET: f64 = 418.9829;
/// Location of the Schwefel minimum in each coordinate (the rounded literature
/// value is 420.9687).
pub const SCHWEFEL_ARGMIN: f64 = 420.968_746_359_982;
/// Schwefel value per dimension at [`SCHWEFEL_ARGMIN`]. The offset constant is
/// rounded, so the minimum is slightly above zero.
pub const SCHWEFEL_MIN_PER_DIM: f64 = 1.272_756_629_372_521_4e-5;

/// An objective the local and global optimizers can drive.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn bounds(&self) -> Bounds;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes the gradient at `x` into `grad`.
    fn gradient(&self, x: &[f64], grad: &mut [f64]);

    /// Value and gradient together; implementations override this when the
    /// two share intermediate sums.
    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.gradient(x, grad);
        self.value(x)
    }
}

/// Per-dimension search interval, identical for every coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(Error::Parameter(format!(
                "bounds require finite lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Bounds { lower, upper })
    }

    pub const fn symmetric(half_width: f64) -> Self {
        Bounds {
            lower: -half_width,
            upper: half_width,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    /// Uniform draw from `[lower, upper]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.random_range(self.lower..=self.upper)
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        (0..dim).map(|_| self.sample(rng)).collect()
    }
}

/// Which dimensions a function accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimRule {
    AnyN,
    Fixed2,
    /// Defined on consecutive coordinate pairs, so at least two dimensions.
    PairsOverN,
}

impl DimRule {
    pub fn check(self, name: &str, dim: usize) -> Result<()> {
        let ok = match self {
            DimRule::AnyN => dim >= 1,
            DimRule::Fixed2 => dim == 2,
            DimRule::PairsOverN => dim >= 2,
        };
        if ok {
            Ok(())
        } else {
            let need = match self {
                DimRule::AnyN => "at least 1 dimension",
                DimRule::Fixed2 => "exactly 2 dimensions",
                DimRule::PairsOverN => "at least 2 dimensions",
            };
            Err(Error::Dimension(format!("{name} requires {need}, got {dim}")))
        }
    }
}

/// Constants of Lunacek's double-funnel function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LunacekParams {
    /// Center of the optimal funnel.
    pub mu1: f64,
    /// Depth offset of the deceptive funnel.
    pub d: f64,
    /// Scale (breadth) of the deceptive funnel.
    pub s: f64,
}

impl Default for LunacekParams {
    fn default() -> Self {
        LunacekParams {
            mu1: 2.5,
            d: 1.0,
            s: 0.7,
        }
    }
}

impl LunacekParams {
    pub fn new(mu1: f64, d: f64, s: f64) -> Result<Self> {
        let p = LunacekParams { mu1, d, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.mu1.is_finite() || !self.d.is_finite() {
            return Err(Error::Parameter(format!(
                "lunacek needs finite mu1, d and s > 0, got {self:?}"
            )));
        }
        let radicand = (self.mu1 * self.mu1 - self.d) / self.s;
        if radicand < 0.0 {
            return Err(Error::Parameter(format!(
                "lunacek (mu1^2 - d)/s = {radicand} is negative; mu2 undefined"
            )));
        }
        Ok(())
    }

    /// Center of the deceptive funnel.
    pub fn mu2(&self) -> f64 {
        -((self.mu1 * self.mu1 - self.d) / self.s).sqrt()
    }
}

fn nonempty(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        Err(Error::Dimension("input vector is empty".into()))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Ackley

pub fn ackley_value(x: &[f64]) -> Result<f64> {
    nonempty(x)?;
    Ok(kernels::ackley(x, None))
}

pub fn ackley_gradient(x: &[f64]) -> Result<Vec<f64>> {
    nonempty(x)?;
    let mut g = vec![0.0; x.len()];
    kernels::ackley(x, Some(&mut g));
    Ok(g)
}

/// Ackley gradient with the per-coordinate intermediates, which decouples
/// the dimensions. Not the gradient of [`ackley_value`] for n > 1.
pub fn ackley_gradient_simplified(x: &[f64]) -> Result<Vec<f64>> {
    nonempty(x)?;
    let mut g = vec![0.0; x.len()];
    kernels::ackley_simplified_gradient(x, &mut g);
    Ok(g)
}

// ---------------------------------------------------------------------------
// Rastrigin

pub fn rastrigin_value(x: &[f64]) -> Result<f64> {
    nonempty(x)?;
    Ok(kernels::rastrigin(x, None))
}

pub fn rastrigin_gradient(x: &[f64]) -> Result<Vec<f64>> {
    nonempty(x)?;
    let mut g = vec![0.0; x.len()];
    kernels::rastrigin(x, Some(&mut g));
    Ok(g)
}

// ---------------------------------------------------------------------------
// Schwefel

pub fn schwefel_value(x: &[f64]) -> Result<f64> {
    nonempty(x)?;
    Ok(kernels::schwefel(x, None))
}

pub fn schwefel_gradient(x: &[f64]) -> Result<Vec<f64>> {
    nonempty(x)?;
    let mut g = vec![0.0; x.len()];
    kernels::schwefel(x, Some(&mut g));
    Ok(g)
}

// ---------------------------------------------------------------------------
// Schaffer F7 and F6

pub fn schafferf7_value(x: &[f64]) -> Result<f64> {
    DimRule::PairsOverN.check("schafferf7", x.len())?;
    Ok(kernels::schafferf7(x, None))
}

pub fn schafferf7_gradient(x: &[f64]) -> Result<Vec<f64>> {
    DimRule::PairsOverN.check("schafferf7", x.len())?;
    let mut g = vec![0.0; x.len()];
    kernels::schafferf7(x, Some(&mut g));
    Ok(g)
}

pub fn schafferf6_value(x: &[f64]) -> Result<f64> {
    DimRule::Fixed2.check("schafferf6", x.len())?;
    Ok(kernels::schafferf6(x, None))
}

pub fn schafferf6_gradient(x: &[f64]) -> Result<Vec<f64>> {
    DimRule::Fixed2.check("schafferf6", x.len())?;
    let mut g = vec![0.0; 2];
    kernels::schafferf6(x, Some(&mut g));
    Ok(g)
}

// ---------------------------------------------------------------------------
// Lunacek

pub fn lunacek_value(x: &[f64], p: &LunacekParams) -> Result<f64> {
    nonempty(x)?;
    p.validate()?;
    Ok(kernels::lunacek(x, p, None))
}

pub fn lunacek_gradient(x: &[f64], p: &LunacekParams) -> Result<Vec<f64>> {
    nonempty(x)?;
    p.validate()?;
    let mut g = vec![0.0; x.len()];
    kernels::lunacek(x, p, Some(&mut g));
    Ok(g)
}

/// Unchecked evaluation kernels. Each computes the value and, when asked,
/// writes the gradient in the same pass.
mod kernels {
    use super::*;

    pub(super) fn ackley(x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let n = x.len() as f64;
        let (sumsq, sumcos) = x.iter().fold((0.0, 0.0), |(sq, c), &xi| {
            (sq + xi * xi, c + (TAU * xi).cos())
        });
        let sa = (sumsq / n).sqrt();
        let b = sumcos / n;
        if let Some(g) = grad {
            for (gi, &xi) in g.iter_mut().zip(x) {
                *gi = ackley_grad_element(xi, sa, b, n);
            }
        }
        // -20 exp(-0.2 sa) - exp(b) + 20 + e, arranged to be exact at the origin.
        -20.0 * (-0.2 * sa).exp_m1() + (E - b.exp())
    }

    #[inline]
    fn ackley_grad_element(xi: f64, sa: f64, b: f64, n: f64) -> f64 {
        let radial = if sa > 0.0 {
            4.0 * xi * (-0.2 * sa).exp() / (n * sa)
        } else {
            0.0
        };
        radial + TAU * (TAU * xi).sin() * b.exp() / n
    }

    pub(super) fn ackley_simplified_gradient(x: &[f64], g: &mut [f64]) {
        let n = x.len() as f64;
        for (gi, &xi) in g.iter_mut().zip(x) {
            let sa = (xi * xi / n).sqrt();
            let b = (TAU * xi).cos() / n;
            *gi = ackley_grad_element(xi, sa, b, n);
        }
    }

    pub(super) fn rastrigin(x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let mut sum = 0.0;
        for &xi in x {
            sum += if xi.abs() > RASTRIGIN_LIMIT {
                10.0 * xi * xi + 10.0
            } else {
                xi * xi - 10.0 * (TAU * xi).cos() + 10.0
            };
        }
        if let Some(g) = grad {
            for (gi, &xi) in g.iter_mut().zip(x) {
                *gi = if xi.abs() > RASTRIGIN_LIMIT {
                    20.0 * xi
                } else {
                    2.0 * xi + 20.0 * PI * (TAU * xi).sin()
                };
            }
        }
        sum
    }

    pub(super) fn schwefel(x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let mut sum = SCHWEFEL_OFFSET * x.len() as f64;
        for &xi in x {
            sum += if xi.abs() > SCHWEFEL_LIMIT {
                0.02 * xi * xi
            } else {
                -xi * xi.abs().sqrt().sin()
            };
        }
        if let Some(g) = grad {
            for (gi, &xi) in g.iter_mut().zip(x) {
                *gi = if xi.abs() > SCHWEFEL_LIMIT {
                    0.04 * xi
                } else if xi == 0.0 {
                    0.0
                } else {
                    // -x sin(sqrt|x|) is odd, so its derivative is even in x.
                    let r = xi.abs().sqrt();
                    -r.sin() - 0.5 * r * r.cos()
                };
            }
        }
        sum
    }

    pub(super) fn schafferf7(x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let pairs = (x.len() - 1) as f64;
        let mut acc = 0.0;
        for w in x.windows(2) {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            acc += s.sqrt() * ((50.0 * s.powf(0.2)).sin() + 1.0);
        }
        let mean = acc / pairs;
        if let Some(g) = grad {
            g.iter_mut().for_each(|v| *v = 0.0);
            let outer = 2.0 * mean / pairs;
            for i in 0..x.len() - 1 {
                let (a, b) = (x[i], x[i + 1]);
                let s = (a * a + b * b).sqrt();
                if s == 0.0 {
                    continue;
                }
                let p = s.powf(0.2);
                let ds = 0.5 / s.sqrt() * ((50.0 * p).sin() + 1.0)
                    + 10.0 * s.powf(-0.3) * (50.0 * p).cos();
                g[i] += outer * ds * a / s;
                g[i + 1] += outer * ds * b / s;
            }
        }
        mean * mean
    }

    pub(super) fn schafferf6(x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (a, b) = (x[0], x[1]);
        let r2 = a * a + b * b;
        let r = r2.sqrt();
        let denom = 1.0 + 0.001 * r2;
        let sin_r = r.sin();
        let num = sin_r * sin_r - 0.5;
        if let Some(g) = grad {
            if r == 0.0 {
                g[0] = 0.0;
                g[1] = 0.0;
            } else {
                // d/dx sin^2(r) = sin(2r) x / r ; d/dx denom = 0.002 x
                let radial = (2.0 * r).sin() / r / (denom * denom) - 0.004 * num / denom.powi(3);
                g[0] = radial * a;
                g[1] = radial * b;
            }
        }
        0.5 + num / (denom * denom)
    }

    pub(super) fn lunacek(x: &[f64], p: &LunacekParams, grad: Option<&mut [f64]>) -> f64 {
        let mu2 = p.mu2();
        let n = x.len() as f64;
        let mut sphere1 = 0.0;
        let mut sphere2 = 0.0;
        let mut ripple = 0.0;
        for &xi in x {
            sphere1 += (xi - p.mu1) * (xi - p.mu1);
            sphere2 += (xi - mu2) * (xi - mu2);
            ripple += 1.0 - (TAU * (xi - p.mu1)).cos();
        }
        let second = p.d * n + p.s * sphere2;
        let first_active = sphere1 <= second;
        if let Some(g) = grad {
            for (gi, &xi) in g.iter_mut().zip(x) {
                let funnel = if first_active {
                    2.0 * (xi - p.mu1)
                } else {
                    2.0 * p.s * (xi - mu2)
                };
                *gi = funnel + 20.0 * PI * (TAU * (xi - p.mu1)).sin();
            }
        }
        sphere1.min(second) + 10.0 * ripple
    }
}

// ---------------------------------------------------------------------------
// FunctionSpec

/// The objective behind a [`FunctionSpec`].
#[derive(Clone, Debug)]
pub enum FunctionKind {
    Ackley,
    /// Ackley values with the decoupled per-coordinate gradient.
    AckleySimplifiedGradient,
    Rastrigin,
    Schwefel,
    SchafferF7,
    SchafferF6,
    Lunacek(LunacekParams),
    Grunge(Arc<GrungeLandscape>),
}

impl FunctionKind {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Ackley => "ackley",
            FunctionKind::AckleySimplifiedGradient => "ackley-simplified-grad",
            FunctionKind::Rastrigin => "rastrigin",
            FunctionKind::Schwefel => "schwefel",
            FunctionKind::SchafferF7 => "schafferf7",
            FunctionKind::SchafferF6 => "schafferf6",
            FunctionKind::Lunacek(_) => "lunacek",
            FunctionKind::Grunge(_) => "grunge",
        }
    }

    pub fn dim_rule(&self) -> DimRule {
        match self {
            FunctionKind::SchafferF7 => DimRule::PairsOverN,
            FunctionKind::SchafferF6 => DimRule::Fixed2,
            _ => DimRule::AnyN,
        }
    }
}

/// Names accepted by [`lookup_function`], besides `grunge:<file>`.
pub const FUNCTION_NAMES: [&str; 7] = [
    "ackley",
    "ackley-simplified-grad",
    "rastrigin",
    "schwefel",
    "schafferf7",
    "schafferf6",
    "lunacek",
];

/// A benchmark objective bound to a dimension, with bounds and known optimum.
#[derive(Clone, Debug)]
pub struct FunctionSpec {
    pub name: String,
    pub kind: FunctionKind,
    pub dim: usize,
    pub bounds: Bounds,
    /// Global-minimum value; `None` for landscapes whose minima have not
    /// been enumerated yet.
    pub target_value: Option<f64>,
    pub target_point: Option<Vec<f64>>,
}

impl FunctionSpec {
    /// Builds the spec with the standard bounds and optimum for `kind`.
    pub fn new(kind: FunctionKind, dim: usize) -> Result<Self> {
        let name = kind.name().to_string();
        kind.dim_rule().check(&name, dim)?;
        let (bounds, target_value, target_point) = match &kind {
            FunctionKind::Ackley | FunctionKind::AckleySimplifiedGradient => {
                (Bounds::symmetric(32.768), Some(0.0), Some(vec![0.0; dim]))
            }
            FunctionKind::Rastrigin => (
                Bounds::symmetric(RASTRIGIN_LIMIT),
                Some(0.0),
                Some(vec![0.0; dim]),
            ),
            FunctionKind::Schwefel => (
                Bounds::symmetric(SCHWEFEL_LIMIT),
                Some(SCHWEFEL_MIN_PER_DIM * dim as f64),
                Some(vec![SCHWEFEL_ARGMIN; dim]),
            ),
            FunctionKind::SchafferF7 | FunctionKind::SchafferF6 => {
                (Bounds::symmetric(100.0), Some(0.0), Some(vec![0.0; dim]))
            }
            FunctionKind::Lunacek(p) => {
                p.validate()?;
                (Bounds::symmetric(5.0), Some(0.0), Some(vec![p.mu1; dim]))
            }
            FunctionKind::Grunge(l) => {
                if l.dim() != dim {
                    return Err(Error::Dimension(format!(
                        "landscape {} has {} dimensions, requested {dim}",
                        l.name(),
                        l.dim()
                    )));
                }
                (l.bounds, None, None)
            }
        };
        let name = match &kind {
            FunctionKind::Grunge(l) => l.name(),
            _ => name,
        };
        Ok(FunctionSpec {
            name,
            kind,
            dim,
            bounds,
            target_value,
            target_point,
        })
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_target(mut self, value: f64, point: Option<Vec<f64>>) -> Self {
        self.target_value = Some(value);
        self.target_point = point;
        self
    }

    /// Target value or [`Error::MissingTarget`].
    pub fn require_target(&self) -> Result<f64> {
        self.target_value
            .ok_or_else(|| Error::MissingTarget(self.name.clone()))
    }

    fn eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            FunctionKind::Ackley => kernels::ackley(x, grad),
            FunctionKind::AckleySimplifiedGradient => {
                if let Some(g) = grad {
                    kernels::ackley_simplified_gradient(x, g);
                }
                kernels::ackley(x, None)
            }
            FunctionKind::Rastrigin => kernels::rastrigin(x, grad),
            FunctionKind::Schwefel => kernels::schwefel(x, grad),
            FunctionKind::SchafferF7 => kernels::schafferf7(x, grad),
            FunctionKind::SchafferF6 => kernels::schafferf6(x, grad),
            FunctionKind::Lunacek(p) => kernels::lunacek(x, p, grad),
            FunctionKind::Grunge(l) => match grad {
                Some(g) => l.value_gradient_unchecked(x, g),
                None => l.value_unchecked(x),
            },
        }
    }
}

impl Objective for FunctionSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> Bounds {
        self.bounds
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x, None)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.eval(x, Some(grad));
    }

    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.eval(x, Some(grad))
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.dim)
    }
}

/// Resolves a function name to a spec of the requested dimension.
///
/// `grunge:<file>` loads a landscape file; its target stays unknown until a
/// catalog supplies it.
pub fn lookup_function(name: &str, dim: usize) -> Result<FunctionSpec> {
    let kind = match name {
        "ackley" => FunctionKind::Ackley,
        "ackley-simplified-grad" => FunctionKind::AckleySimplifiedGradient,
        "rastrigin" => FunctionKind::Rastrigin,
        "schwefel" => FunctionKind::Schwefel,
        "schafferf7" => FunctionKind::SchafferF7,
        "schafferf6" => FunctionKind::SchafferF6,
        "lunacek" => FunctionKind::Lunacek(LunacekParams::default()),
        other => match other.strip_prefix("grunge:") {
            Some(path) if !path.is_empty() => {
                let landscape = GrungeLandscape::load(Path::new(path))?;
                FunctionKind::Grunge(Arc::new(landscape))
            }
            _ => return Err(Error::UnknownFunction(other.to_string())),
        },
    };
    FunctionSpec::new(kind, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_a_dimension_error() {
        assert!(matches!(ackley_value(&[]), Err(Error::Dimension(_))));
        assert!(matches!(rastrigin_gradient(&[]), Err(Error::Dimension(_))));
        assert!(matches!(schafferf7_value(&[1.0]), Err(Error::Dimension(_))));
        assert!(matches!(
            schafferf6_value(&[1.0, 2.0, 3.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn origin_values() {
        for n in [1, 2, 7, 200] {
            let z = vec![0.0; n];
            assert_eq!(ackley_value(&z).unwrap(), 0.0);
            assert_eq!(rastrigin_value(&z).unwrap(), 0.0);
            assert!(ackley_gradient(&z).unwrap().iter().all(|&g| g == 0.0));
            assert!(ackley_gradient_simplified(&z)
                .unwrap()
                .iter()
                .all(|&g| g == 0.0));
            let s = schwefel_value(&z).unwrap();
            assert!((s - SCHWEFEL_OFFSET * n as f64).abs() < 1e-9);
        }
        assert_eq!(schafferf7_value(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(schafferf6_value(&[0.0; 2]).unwrap(), 0.0);
        assert_eq!(schafferf6_gradient(&[0.0; 2]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(schafferf7_gradient(&[0.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_evaluated_points() {
        let expected = -20.0 * (-0.1f64).exp() - (-1.0f64).exp() + 20.0 + E;
        assert!((ackley_value(&[0.5]).unwrap() - expected).abs() < 1e-13);
        assert!((rastrigin_value(&[6.0]).unwrap() - 370.0).abs() < 1e-12);

        let s = 5.0f64;
        let f7 = (s.sqrt() * ((50.0 * s.powf(0.2)).sin() + 1.0)).powi(2);
        assert!((schafferf7_value(&[3.0, 4.0]).unwrap() - f7).abs() < 1e-12);

        let r2 = (PI / 2.0).powi(2);
        let f6 = 0.5 + 0.5 / (1.0 + 0.001 * r2).powi(2);
        assert!((schafferf6_value(&[PI / 2.0, 0.0]).unwrap() - f6).abs() < 1e-14);
    }

    #[test]
    fn lunacek_mu2_and_optimum() {
        let p = LunacekParams::default();
        assert!((p.mu2() + 7.5f64.sqrt()).abs() < 1e-15);
        assert!((p.mu2() - (-2.738_612_788)).abs() < 1e-9);
        assert_eq!(lunacek_value(&[2.5; 10], &p).unwrap(), 0.0);

        let at_mu2 = lunacek_value(&[p.mu2(); 10], &p).unwrap();
        let ripple = 10.0 * 10.0 * (1.0 - (TAU * (p.mu2() - p.mu1)).cos());
        assert!((at_mu2 - (p.d * 10.0 + ripple)).abs() < 1e-10);
        assert!(at_mu2 > 0.0);
    }

    #[test]
    fn lunacek_rejects_negative_radicand() {
        assert!(matches!(
            LunacekParams::new(0.5, 1.0, 0.7),
            Err(Error::Parameter(_))
        ));
        let bad = LunacekParams {
            mu1: 0.5,
            d: 1.0,
            s: 0.7,
        };
        assert!(lunacek_value(&[0.0], &bad).is_err());
    }

    #[test]
    fn simplified_gradient_matches_exact_in_one_dimension() {
        for i in -300..=300 {
            let x = [i as f64 * 0.1093];
            let (a, b) = (ackley_gradient(&x).unwrap()[0], ackley_gradient_simplified(&x).unwrap()[0]);
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0), "{x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn equal_coordinates_give_equal_ackley_gradient() {
        let g = ackley_gradient(&[1.7; 9]).unwrap();
        assert!(g.iter().all(|&v| v == g[0]));
    }

    #[test]
    fn lookup_wires_bounds_and_targets() {
        let a = lookup_function("ackley", 200).unwrap();
        assert_eq!(a.bounds, Bounds::symmetric(32.768));
        assert_eq!(a.target_value, Some(0.0));

        let s = lookup_function("schwefel", 10).unwrap();
        assert_eq!(s.bounds, Bounds::symmetric(500.0));
        let tp = s.target_point.as_ref().unwrap();
        assert!(tp.iter().all(|&v| (v - 420.9687).abs() < 5e-5));

        assert!(matches!(
            lookup_function("schafferf6", 3),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            lookup_function("sphere", 3),
            Err(Error::UnknownFunction(_))
        ));
        assert!(matches!(
            lookup_function("grunge:", 3),
            Err(Error::UnknownFunction(_))
        ));
    }

    #[test]
    fn known_optima_evaluate_to_target() {
        for name in FUNCTION_NAMES {
            for dim in [2, 10, 50] {
                let spec = lookup_function(name, dim).or_else(|_| lookup_function(name, 2));
                let spec = spec.unwrap();
                let x = spec.target_point.clone().unwrap();
                let v = spec.value(&x);
                assert!(
                    (v - spec.target_value.unwrap()).abs() < 1e-9,
                    "{name} at optimum: {v}"
                );
            }
        }
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(1.0, 1.0).is_err());
        assert!(Bounds::new(f64::NAN, 1.0).is_err());
        assert!(Bounds::new(-1.0, 1.0).unwrap().contains(1.0));
    }
}
