//! Limited-memory BFGS with a strong-Wolfe line search.
//!
//! Minimization is unconstrained. Functions that need to stay inside a box
//! carry their own exterior penalty.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::functions::Objective;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOptSettings {
    /// Number of stored (s, y) correction pairs.
    pub memory_pairs: usize,
    /// Stop when successive accepted values differ by less than this.
    /// Zero disables the criterion.
    pub fitness_tol: f64,
    /// Stop when the gradient max-norm falls below this.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Strong-Wolfe curvature constant: an accepted step has
    /// `|slope| <= curvature * |initial slope|`.
    pub curvature: f64,
    /// Trial evaluations allowed per line search.
    pub max_line_search: usize,
    /// Keep a per-iteration trace in the result.
    pub record_trace: bool,
}

impl Default for LocalOptSettings {
    fn default() -> Self {
        LocalOptSettings {
            memory_pairs: 5,
            fitness_tol: 1e-8,
            gradient_tol: 1e-8,
            max_iterations: 5000,
            armijo: 1e-4,
            curvature: 0.9,
            max_line_search: 40,
            record_trace: false,
        }
    }
}

impl LocalOptSettings {
    pub fn validate(&self) -> Result<()> {
        if self.memory_pairs == 0 {
            return Err(Error::Parameter("memory_pairs must be at least 1".into()));
        }
        if !(self.fitness_tol >= 0.0) || !(self.gradient_tol > 0.0) {
            return Err(Error::Parameter(
                "tolerances must be positive (fitness_tol may be 0 to disable it)".into(),
            ));
        }
        if !(self.armijo > 0.0 && self.armijo < self.curvature && self.curvature < 1.0) {
            return Err(Error::Parameter(format!(
                "line search constants need 0 < armijo < curvature < 1, got {} and {}",
                self.armijo, self.curvature
            )));
        }
        if self.max_line_search == 0 {
            return Err(Error::Parameter("max_line_search must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOptStatus {
    Converged,
    MaxIterations,
    LineSearchFailure,
}

/// One accepted step of the iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineStep {
    pub value_before: f64,
    pub value_after: f64,
    pub step: f64,
    /// Directional derivative at the start of the step.
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct LocalOptResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub status: LocalOptStatus,
    pub iterations: usize,
    pub evaluations: usize,
    /// Max-norm of the gradient at `x`.
    pub gradient_norm: f64,
    pub trace: Vec<LineStep>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn finite(v: f64, g: &[f64]) -> bool {
    v.is_finite() && g.iter().all(|x| x.is_finite())
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Two-loop recursion: writes `-H g` into `d`.
fn search_direction(pairs: &VecDeque<Pair>, g: &[f64], d: &mut [f64], alpha: &mut Vec<f64>) {
    d.iter_mut().zip(g).for_each(|(di, gi)| *di = -gi);
    alpha.clear();
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, d);
        d.iter_mut().zip(&p.y).for_each(|(di, yi)| *di -= a * yi);
        alpha.push(a);
    }
    if let Some(last) = pairs.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        d.iter_mut().for_each(|di| *di *= gamma);
    }
    for (p, a) in pairs.iter().zip(alpha.iter().rev()) {
        let b = p.rho * dot(&p.y, d);
        d.iter_mut().zip(&p.s).for_each(|(di, si)| *di += (a - b) * si);
    }
}

/// Line search along `d` from `x`: bracketing followed by interpolating
/// zoom, aiming for the strong Wolfe conditions. The lowest trial that
/// satisfies sufficient decrease is kept in `x_best`/`g_best` even when the
/// curvature condition is never met.
struct Probe<'a> {
    f: &'a dyn Objective,
    x: &'a [f64],
    d: &'a [f64],
    fx: f64,
    slope: f64,
    settings: &'a LocalOptSettings,
    x_trial: &'a mut Vec<f64>,
    g_trial: &'a mut Vec<f64>,
    x_best: &'a mut Vec<f64>,
    g_best: &'a mut Vec<f64>,
    /// (value, step) of the best sufficient-decrease trial so far.
    best: Option<(f64, f64)>,
    evaluations: usize,
}

impl Probe<'_> {
    /// Returns `(value, slope)` at `step`.
    fn eval(&mut self, step: f64) -> Result<(f64, f64)> {
        for ((xt, xi), di) in self.x_trial.iter_mut().zip(self.x).zip(self.d) {
            *xt = xi + step * di;
        }
        let ft = self.f.value_gradient(self.x_trial, self.g_trial);
        self.evaluations += 1;
        if !finite(ft, self.g_trial) {
            return Err(Error::NonFinite {
                iterate: self.x_trial.clone(),
            });
        }
        if self.sufficient(step, ft) && self.best.is_none_or(|(fb, _)| ft < fb) {
            self.x_best.copy_from_slice(self.x_trial);
            self.g_best.copy_from_slice(self.g_trial);
            self.best = Some((ft, step));
        }
        Ok((ft, dot(self.g_trial, self.d)))
    }

    /// Sufficient decrease, and an actual decrease once rounding swallows
    /// the Armijo term.
    fn sufficient(&self, step: f64, ft: f64) -> bool {
        ft <= self.fx + self.settings.armijo * step * self.slope && ft < self.fx
    }

    fn curvature_met(&self, slope: f64) -> bool {
        slope.abs() <= -self.settings.curvature * self.slope
    }

    /// Makes the accepted trial the best one regardless of value ordering.
    fn accept(&mut self, step: f64, ft: f64) {
        if self.best != Some((ft, step)) {
            self.x_best.copy_from_slice(self.x_trial);
            self.g_best.copy_from_slice(self.g_trial);
            self.best = Some((ft, step));
        }
    }

    fn search(&mut self, first: f64) -> Result<()> {
        let budget = self.settings.max_line_search;
        let (mut a_prev, mut f_prev, mut s_prev) = (0.0, self.fx, self.slope);
        let mut a = first;
        let mut used = 0;
        while used < budget {
            used += 1;
            let (fa, sa) = self.eval(a)?;
            if !self.sufficient(a, fa) || (used > 1 && fa >= f_prev) {
                return self.zoom((a_prev, f_prev, s_prev), (a, fa, sa), budget - used);
            }
            if self.curvature_met(sa) {
                self.accept(a, fa);
                return Ok(());
            }
            if sa >= 0.0 {
                return self.zoom((a, fa, sa), (a_prev, f_prev, s_prev), budget - used);
            }
            (a_prev, f_prev, s_prev) = (a, fa, sa);
            a *= 2.0;
        }
        Ok(())
    }

    /// `lo` satisfies sufficient decrease (or is the origin) and has the
    /// lower value; the minimizer lies between `lo` and `hi`.
    fn zoom(&mut self, mut lo: (f64, f64, f64), mut hi: (f64, f64, f64), budget: usize) -> Result<()> {
        for _ in 0..budget {
            let (a_lo, f_lo, s_lo) = lo;
            let (a_hi, f_hi, _) = hi;
            let width = a_hi - a_lo;
            // Minimizer of the quadratic through f_lo, s_lo and f_hi.
            let denom = 2.0 * (f_hi - f_lo - s_lo * width);
            let mut a = if denom > 0.0 {
                a_lo - s_lo * width * width / denom
            } else {
                a_lo + 0.5 * width
            };
            let (left, right) = if width > 0.0 { (a_lo, a_hi) } else { (a_hi, a_lo) };
            let margin = 0.1 * width.abs();
            a = a.clamp(left + margin, right - margin);
            if margin <= f64::EPSILON * a.abs() {
                break;
            }
            let (fa, sa) = self.eval(a)?;
            if !self.sufficient(a, fa) || fa >= f_lo {
                hi = (a, fa, sa);
            } else {
                if self.curvature_met(sa) {
                    self.accept(a, fa);
                    return Ok(());
                }
                if sa * (a_hi - a_lo) >= 0.0 {
                    hi = lo;
                }
                lo = (a, fa, sa);
            }
        }
        Ok(())
    }
}

/// Minimizes `f` from `x0`.
///
/// The returned value never exceeds `f(x0)`. Non-finite values or gradients
/// abort with [`Error::NonFinite`] carrying the offending point.
pub fn minimize(f: &dyn Objective, x0: &[f64], s: &LocalOptSettings) -> Result<LocalOptResult> {
    s.validate()?;
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::Dimension(format!(
            "start point has {} coordinates, objective expects {n}",
            x0.len()
        )));
    }

    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f.value_gradient(&x, &mut g);
    let mut evaluations = 1;
    if !finite(fx, &g) {
        return Err(Error::NonFinite { iterate: x });
    }

    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(s.memory_pairs);
    let mut d = vec![0.0; n];
    let mut alpha_buf = Vec::with_capacity(s.memory_pairs);
    let mut x_trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut x_best = vec![0.0; n];
    let mut g_best = vec![0.0; n];
    let mut trace = Vec::new();

    let mut status = LocalOptStatus::MaxIterations;
    let mut iterations = 0;

    if max_norm(&g) < s.gradient_tol {
        status = LocalOptStatus::Converged;
    } else {
        while iterations < s.max_iterations {
            search_direction(&pairs, &g, &mut d, &mut alpha_buf);
            let mut slope = dot(&g, &d);
            if !(slope < 0.0) {
                pairs.clear();
                d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
                slope = dot(&g, &d);
            }
            let step = if pairs.is_empty() {
                1.0 / dot(&d, &d).sqrt()
            } else {
                1.0
            };

            let mut probe = Probe {
                f,
                x: &x,
                d: &d,
                fx,
                slope,
                settings: s,
                x_trial: &mut x_trial,
                g_trial: &mut g_trial,
                x_best: &mut x_best,
                g_best: &mut g_best,
                best: None,
                evaluations: 0,
            };
            let found = probe.search(step);
            evaluations += probe.evaluations;
            let accepted = probe.best;
            found?;

            let Some((f_new, step)) = accepted else {
                if pairs.is_empty() {
                    status = LocalOptStatus::LineSearchFailure;
                    break;
                }
                // Stale curvature information: retry along steepest descent.
                pairs.clear();
                continue;
            };
            iterations += 1;
            if s.record_trace {
                trace.push(LineStep {
                    value_before: fx,
                    value_after: f_new,
                    step,
                    slope,
                });
            }

            // Correction pair; curvature-violating pairs are skipped.
            let sv: Vec<f64> = x_best.iter().zip(&x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g_best.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&sv, &yv);
            if sy > f64::EPSILON * dot(&sv, &sv).sqrt() * dot(&yv, &yv).sqrt() && sy > 0.0 {
                if pairs.len() == s.memory_pairs {
                    pairs.pop_front();
                }
                pairs.push_back(Pair {
                    s: sv,
                    y: yv,
                    rho: 1.0 / sy,
                });
            }

            let delta = (fx - f_new).abs();
            std::mem::swap(&mut x, &mut x_best);
            std::mem::swap(&mut g, &mut g_best);
            fx = f_new;

            if max_norm(&g) < s.gradient_tol || delta < s.fitness_tol {
                status = LocalOptStatus::Converged;
                break;
            }
        }
    }

    let gradient_norm = max_norm(&g);
    Ok(LocalOptResult {
        x,
        value: fx,
        status,
        iterations,
        evaluations,
        gradient_norm,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{lookup_function, Bounds};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Bowl(usize);

    impl Objective for Bowl {
        fn dim(&self) -> usize {
            self.0
        }
        fn bounds(&self) -> Bounds {
            Bounds::symmetric(10.0)
        }
        fn value(&self, x: &[f64]) -> f64 {
            x.iter().map(|v| v * v).sum()
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            g.iter_mut().zip(x).for_each(|(gi, xi)| *gi = 2.0 * xi);
        }
    }

    struct Broken;

    impl Objective for Broken {
        fn dim(&self) -> usize {
            1
        }
        fn bounds(&self) -> Bounds {
            Bounds::symmetric(1.0)
        }
        fn value(&self, x: &[f64]) -> f64 {
            if x[0] < 0.5 {
                f64::NAN
            } else {
                x[0] * x[0]
            }
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            g[0] = 2.0 * x[0];
        }
    }

    #[test]
    fn quadratic_bowl_reaches_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x0: Vec<f64> = (0..50).map(|_| rng.random_range(-10.0..10.0)).collect();
        let r = minimize(&Bowl(50), &x0, &LocalOptSettings::default()).unwrap();
        assert_eq!(r.status, LocalOptStatus::Converged);
        assert!(r.iterations <= 60, "{} iterations", r.iterations);
        assert!(r.x.iter().all(|v| v.abs() < 1e-6), "{:?}", r.x);
    }

    #[test]
    fn start_at_minimum_returns_unchanged() {
        let r = minimize(&Bowl(4), &[0.0; 4], &LocalOptSettings::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.status, LocalOptStatus::Converged);
        assert_eq!(r.x, vec![0.0; 4]);
    }

    #[test]
    fn non_finite_is_an_error_with_iterate() {
        match minimize(&Broken, &[0.2], &LocalOptSettings::default()) {
            Err(Error::NonFinite { iterate }) => assert_eq!(iterate, vec![0.2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_settings_and_dimension() {
        let s = LocalOptSettings {
            memory_pairs: 0,
            ..Default::default()
        };
        assert!(minimize(&Bowl(2), &[1.0, 1.0], &s).is_err());
        assert!(matches!(
            minimize(&Bowl(2), &[1.0], &LocalOptSettings::default()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn trace_is_monotone_and_sufficient() {
        let f = lookup_function("rastrigin", 8).unwrap();
        let s = LocalOptSettings {
            record_trace: true,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x0 = f.bounds.sample_point(8, &mut rng);
            let r = minimize(&f, &x0, &s).unwrap();
            assert!(r.value <= f.value(&x0));
            for step in &r.trace {
                assert!(step.value_after <= step.value_before);
                assert!(
                    step.value_after <= step.value_before + s.armijo * step.step * step.slope
                );
            }
        }
    }
}
