//! Minimization over the probability simplex by exponentiated gradient
//! (entropic mirror descent) with a monotone step-size rule.
//!
//! Iterates live in the log domain, `q = softmax(theta)`, so coordinates can
//! approach zero without leaving the simplex. A trial step is accepted only
//! if it lowers the objective; accepted steps double the step size and
//! rejected ones halve it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::RandomStream;

/// Lower clamp on log-weights relative to the largest one.
const LOG_FLOOR: f64 = -700.0;
/// Rejections shrink the step by this factor at most this many times in a row.
const MAX_HALVINGS: u32 = 64;
/// Log-domain steps below this cannot move `q` in double precision.
const STEP_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexOptConfig {
    /// Total number of starts, fixed starts included.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once an accepted step improves by less than `tol * |f|`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SimplexOptConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iters: 5000, tol: 1e-10, seed: 0 }
    }
}

impl SimplexOptConfig {
    pub fn light(seed: u64) -> Self {
        Self { restarts: 3, max_iters: 2000, tol: 1e-10, seed }
    }
}

/// Best point found. `value` is an upper bound on the infimum.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub evals: usize,
}

/// Objective value and gradient with respect to `q`.
pub trait SimplexObjective: Sync {
    fn eval(&self, q: &[f64]) -> Result<(f64, Vec<f64>)>;
}

impl<F> SimplexObjective for F
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + Sync,
{
    fn eval(&self, q: &[f64]) -> Result<(f64, Vec<f64>)> {
        self(q)
    }
}

fn softmax(theta: &[f64]) -> Vec<f64> {
    let top = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = theta.iter().map(|&t| (t - top).max(LOG_FLOOR).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn log_weights(q: &[f64]) -> Vec<f64> {
    q.iter().map(|&x| if x > 0.0 { x.ln().max(LOG_FLOOR) } else { LOG_FLOOR }).collect()
}

struct Run {
    value: f64,
    q: Vec<f64>,
    converged: bool,
    iterations: usize,
    evals: usize,
}

fn descend(obj: &dyn SimplexObjective, start: &[f64], cfg: &SimplexOptConfig) -> Result<Run> {
    let mut theta = log_weights(start);
    let mut q = softmax(&theta);
    let (mut f, mut g) = obj.eval(&q)?;
    let mut evals = 1;
    if !f.is_finite() {
        return Ok(Run { value: f, q, converged: false, iterations: 0, evals });
    }
    let mut eta = {
        let gbar: f64 = q.iter().zip(&g).map(|(a, b)| a * b).sum();
        let spread = g.iter().map(|x| (x - gbar).abs()).fold(0.0, f64::max);
        if spread > 0.0 {
            1.0 / spread
        } else {
            1.0
        }
    };
    let mut halvings = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let gbar: f64 = q.iter().zip(&g).map(|(a, b)| a * b).sum();
        let spread = g.iter().map(|x| (x - gbar).abs()).fold(0.0, f64::max);
        if eta * spread <= STEP_FLOOR {
            // The step no longer changes the iterate at working precision.
            converged = true;
            break;
        }
        let trial_theta: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t - eta * (gi - gbar)).collect();
        let trial_q = softmax(&trial_theta);
        let (tf, tg) = obj.eval(&trial_q)?;
        evals += 1;
        if tf.is_finite() && tf < f {
            let improvement = f - tf;
            let top = trial_theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            theta = trial_theta.iter().map(|t| (t - top).max(LOG_FLOOR)).collect();
            q = trial_q;
            let scale = f.abs().max(tf.abs());
            f = tf;
            g = tg;
            eta *= 2.0;
            halvings = 0;
            if improvement <= cfg.tol * scale + 1e-16 {
                converged = true;
                break;
            }
        } else {
            eta *= 0.5;
            halvings += 1;
            if halvings >= MAX_HALVINGS {
                // No descent along the mirror direction at working precision.
                converged = true;
                break;
            }
        }
    }
    Ok(Run { value: f, q, converged, iterations, evals })
}

/// Minimizes `obj` over the simplex in dimension `d`. The fixed `starts`
/// come first; the remaining `cfg.restarts - starts.len()` starts are
/// Dirichlet draws from child streams of `cfg.seed`. Restarts run in
/// parallel and the lowest restart index wins ties.
pub fn simplex_minimize(
    d: usize,
    obj: &dyn SimplexObjective,
    starts: &[Vec<f64>],
    cfg: &SimplexOptConfig,
) -> Result<SimplexResult> {
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::ZeroBudget);
    }
    if let Some(bad) = starts.iter().find(|s| s.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
    }
    let root = RandomStream::new(cfg.seed);
    let all: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|i| match starts.get(i) {
            Some(s) => s.clone(),
            None => root.child(i as u64).dirichlet(d),
        })
        .collect();
    let runs: Vec<Run> = all.par_iter().map(|s| descend(obj, s, cfg)).collect::<Result<_>>()?;
    let evals = runs.iter().map(|r| r.evals).sum();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    let r = &runs[best];
    Ok(SimplexResult { value: r.value, minimizer: r.q.clone(), converged: r.converged, iterations: r.iterations, evals })
}

/// Dense grid search over `{q : q_i = k_i * h, sum q_i = 1}`, for use as an
/// independent oracle in small dimensions. Returns the best value and point.
pub fn grid_minimize(d: usize, resolution: f64, f: impl Fn(&[f64]) -> f64 + Sync) -> (f64, Vec<f64>) {
    assert!(d >= 1 && resolution > 0.0 && resolution <= 1.0);
    let n = (1.0 / resolution).round() as usize;
    let point = |ks: &[usize]| -> Vec<f64> { ks.iter().map(|&k| k as f64 / n as f64).collect() };
    let eval_tail = |first: usize| -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, Vec::new());
        let mut ks = vec![0usize; d];
        ks[0] = first;
        let mut visit = |ks: &[usize]| {
            let q = point(ks);
            let v = f(&q);
            if v < best.0 {
                best = (v, q);
            }
        };
        enumerate(&mut ks, 1, n - first, &mut visit);
        best
    };
    let results: Vec<(f64, Vec<f64>)> = (0..=n).into_par_iter().map(eval_tail).collect();
    results.into_iter().fold((f64::INFINITY, Vec::new()), |a, b| if b.0 < a.0 { b } else { a })
}

fn enumerate(ks: &mut [usize], pos: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == ks.len() {
        if left == 0 {
            visit(ks);
        }
        return;
    }
    if pos == ks.len() - 1 {
        ks[pos] = left;
        visit(ks);
        return;
    }
    for k in 0..=left {
        ks[pos] = k;
        enumerate(ks, pos + 1, left - k, visit);
    }
}
