//! Derivative-free minimization of the training loss.
//!
//! Two standard methods behind one interface: Nelder-Mead simplex
//! (default) and SPSA. Both are deterministic given the seed, count every
//! objective evaluation against the budget, and report the best point
//! actually evaluated. The interface admits further methods (the
//! original experiments used a trust-region method with the same
//! call shape).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError {
    #[error("budget {budget} too small for {arity} parameters (need at least arity + 2)")]
    BudgetTooSmall { budget: usize, arity: usize },
    #[error("probability and label lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("initial point must be non-empty and finite")]
    BadInitialPoint,
}

/// Which derivative-free method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NelderMead,
    Spsa,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "nelder_mead" | "nelder-mead" => Some(Method::NelderMead),
            "spsa" => Some(Method::Spsa),
            _ => None,
        }
    }
}

/// Nelder-Mead coefficients and the SPSA gain schedules. Declared
/// defaults; all configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptOptions {
    /// Nelder-Mead reflection coefficient.
    pub reflection: f64,
    /// Nelder-Mead expansion coefficient.
    pub expansion: f64,
    /// Nelder-Mead contraction coefficient.
    pub contraction: f64,
    /// Nelder-Mead shrink coefficient.
    pub shrink: f64,
    /// Initial simplex offset added to each axis of `x0`.
    pub simplex_step: f64,
    /// SPSA step numerator: `a_k = spsa_a / (k + spsa_a_offset)^0.602`.
    pub spsa_a: f64,
    pub spsa_a_offset: f64,
    /// SPSA perturbation numerator: `c_k = spsa_c / (k + 1)^0.101`.
    pub spsa_c: f64,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            simplex_step: 0.25,
            spsa_a: 0.1,
            spsa_a_offset: 11.0,
            spsa_c: 0.1,
        }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub best_params: Vec<T>,
    pub best_loss: T,
    /// `(evaluation index, loss)` for every objective evaluation, in order.
    pub history: Vec<(usize, T)>,
    pub evals_used: usize,
}

struct Tracker<'a, T, F> {
    f: &'a mut F,
    budget: usize,
    history: Vec<(usize, T)>,
    best_params: Vec<T>,
    best_loss: T,
}

impl<'a, T: Real, F: FnMut(&[T]) -> T> Tracker<'a, T, F> {
    fn new(f: &'a mut F, budget: usize) -> Self {
        Tracker {
            f,
            budget,
            history: Vec::new(),
            best_params: Vec::new(),
            best_loss: T::infinity(),
        }
    }

    fn remaining(&self) -> usize {
        self.budget - self.history.len()
    }

    /// Evaluate and record; panics if called past the budget (callers
    /// check `remaining` first).
    fn eval(&mut self, x: &[T]) -> T {
        assert!(self.remaining() > 0, "objective evaluated past its budget");
        let y = (self.f)(x);
        self.history.push((self.history.len(), y));
        if y < self.best_loss {
            self.best_loss = y;
            self.best_params = x.to_vec();
        }
        y
    }

    fn finish(self) -> OptResult<T> {
        let evals_used = self.history.len();
        OptResult {
            best_params: self.best_params,
            best_loss: self.best_loss,
            history: self.history,
            evals_used,
        }
    }
}

/// Minimize `f` from `x0` with the given evaluation budget.
///
/// Deterministic given `(f, x0, method, budget, seed)`; the seed only
/// matters for SPSA's perturbation draws.
pub fn minimize<T: Real>(
    f: &mut impl FnMut(&[T]) -> T,
    x0: &[T],
    method: Method,
    budget: usize,
    seed: u64,
) -> Result<OptResult<T>, OptimizeError> {
    minimize_with(f, x0, method, budget, seed, &OptOptions::default())
}

/// [`minimize`] with explicit coefficients.
pub fn minimize_with<T: Real>(
    f: &mut impl FnMut(&[T]) -> T,
    x0: &[T],
    method: Method,
    budget: usize,
    seed: u64,
    opts: &OptOptions,
) -> Result<OptResult<T>, OptimizeError> {
    if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
        return Err(OptimizeError::BadInitialPoint);
    }
    if budget < x0.len() + 2 {
        return Err(OptimizeError::BudgetTooSmall { budget, arity: x0.len() });
    }
    let mut tracker = Tracker::new(f, budget);
    match method {
        Method::NelderMead => nelder_mead(&mut tracker, x0, opts),
        Method::Spsa => spsa(&mut tracker, x0, seed, opts),
    }
    Ok(tracker.finish())
}

fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(
    tracker: &mut Tracker<T, F>,
    x0: &[T],
    opts: &OptOptions,
) {
    let n = x0.len();
    let alpha = T::from_f64(opts.reflection).unwrap();
    let gamma = T::from_f64(opts.expansion).unwrap();
    let rho = T::from_f64(opts.contraction).unwrap();
    let sigma = T::from_f64(opts.shrink).unwrap();
    let step = T::from_f64(opts.simplex_step).unwrap();

    // initial simplex: x0 plus axis perturbations
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    {
        let y = tracker.eval(x0);
        simplex.push((x0.to_vec(), y));
    }
    for i in 0..n {
        if tracker.remaining() == 0 {
            return;
        }
        let mut v = x0.to_vec();
        v[i] = v[i] + step;
        let y = tracker.eval(&v);
        simplex.push((v, y));
    }

    loop {
        // stable sort keeps earlier vertices first on ties
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if tracker.remaining() == 0 {
            return;
        }
        let centroid: Vec<T> = (0..n)
            .map(|j| {
                simplex[..n].iter().map(|(v, _)| v[j]).sum::<T>()
                    / T::from_usize(n).unwrap()
            })
            .collect();
        let worst = simplex[n].clone();
        let reflected: Vec<T> = (0..n)
            .map(|j| centroid[j] + alpha * (centroid[j] - worst.0[j]))
            .collect();
        let fr = tracker.eval(&reflected);

        if fr < simplex[0].1 {
            // try to expand
            if tracker.remaining() == 0 {
                return;
            }
            let expanded: Vec<T> = (0..n)
                .map(|j| centroid[j] + gamma * (reflected[j] - centroid[j]))
                .collect();
            let fe = tracker.eval(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            // contract toward the better of worst/reflected
            if tracker.remaining() == 0 {
                return;
            }
            let (base, fbase) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
            let contracted: Vec<T> = (0..n)
                .map(|j| centroid[j] + rho * (base[j] - centroid[j]))
                .collect();
            let fc = tracker.eval(&contracted);
            if fc < fbase {
                simplex[n] = (contracted, fc);
            } else {
                // shrink everything toward the best vertex
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    if tracker.remaining() == 0 {
                        return;
                    }
                    for j in 0..n {
                        vertex.0[j] = best[j] + sigma * (vertex.0[j] - best[j]);
                    }
                    vertex.1 = tracker.eval(&vertex.0);
                }
            }
        }
    }
}

fn spsa<T: Real, F: FnMut(&[T]) -> T>(
    tracker: &mut Tracker<T, F>,
    x0: &[T],
    seed: u64,
    opts: &OptOptions,
) {
    let n = x0.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = x0.to_vec();
    tracker.eval(&x);
    let mut k = 0usize;
    while tracker.remaining() >= 2 {
        let kf = k as f64;
        let a_k = T::from_f64(opts.spsa_a / (kf + opts.spsa_a_offset).powf(0.602)).unwrap();
        let c_k = T::from_f64(opts.spsa_c / (kf + 1.0).powf(0.101)).unwrap();
        let delta: Vec<T> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { T::one() } else { -T::one() })
            .collect();
        let plus: Vec<T> = x.iter().zip(&delta).map(|(&xi, &d)| xi + c_k * d).collect();
        let minus: Vec<T> = x.iter().zip(&delta).map(|(&xi, &d)| xi - c_k * d).collect();
        let y_plus = tracker.eval(&plus);
        let y_minus = tracker.eval(&minus);
        let diff = (y_plus - y_minus) / (T::from_f64(2.0).unwrap() * c_k);
        for (xi, &d) in x.iter_mut().zip(&delta) {
            // rademacher delta: 1/d = d
            *xi = *xi - a_k * diff * d;
        }
        k += 1;
    }
    if tracker.remaining() > 0 {
        tracker.eval(&x);
    }
}

/// Mean binary cross-entropy `-(1/N) sum [y log p + (1-y) log(1-p)]`,
/// with probabilities clamped to `[1e-7, 1 - 1e-7]`.
pub fn cross_entropy<T: Real>(probs: &[T], labels: &[u8]) -> Result<T, OptimizeError> {
    if probs.len() != labels.len() {
        return Err(OptimizeError::LengthMismatch(probs.len(), labels.len()));
    }
    let eps = T::from_f64(crate::model::PROB_EPS).unwrap();
    let total: T = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.max(eps).min(T::one() - eps);
            if y == 1 {
                -p.ln()
            } else {
                -(T::one() - p).ln()
            }
        })
        .sum();
    Ok(total / T::from_usize(probs.len()).unwrap())
}
