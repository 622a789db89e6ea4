//! Derivative-free coordinate search on a box.
//!
//! Along each coordinate the search tries the last successful sign first,
//! accepts a step only under the sufficient decrease `f(x + s e_i) ≤ f(x) − γ s²`,
//! extrapolates by the expansion factor while decrease continues, and shrinks
//! the step after two failed signs. When both signs fail, one extra trial at
//! the vertex of the parabola through the three known values is made under
//! the same acceptance test. Trial points are clamped to the box.

use crate::error::{check_len, Error, Result};
use crate::problem::BoxSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchConfig<T> {
    pub budget: usize,
    /// Starting step on every coordinate; `None` means half the shortest side of the box.
    pub initial_step: Option<T>,
    pub step_tol: T,
    /// Sufficient-decrease coefficient.
    pub gamma: T,
    pub expansion: T,
    pub contraction: T,
}

impl<T: Scalar> Default for LocalSearchConfig<T> {
    fn default() -> Self {
        Self {
            budget: 100,
            initial_step: None,
            step_tol: T::lit(1e-6),
            gamma: T::lit(1e-6),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
        }
    }
}

impl<T: Scalar> LocalSearchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Usage("local search budget must be at least 1".into()));
        }
        if !(self.contraction > T::zero() && self.contraction < T::one() && self.expansion > T::one()) {
            return Err(Error::Usage("local search needs 0 < contraction < 1 < expansion".into()));
        }
        if !(self.gamma >= T::zero()) || !(self.step_tol > T::zero()) {
            return Err(Error::Usage("local search needs gamma >= 0 and step_tol > 0".into()));
        }
        if let Some(s) = self.initial_step {
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::Usage(format!("initial step must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evals_used: usize,
    /// `(evaluations used so far, value)` after every accepted step.
    pub history: Vec<(usize, T)>,
}

/// Minimizes `f` over `bounds` from `x0`. `f0` is the known value at `x0`;
/// when absent it is evaluated and counted.
pub fn coordinate_search<T: Scalar>(
    f: &mut dyn FnMut(&[T]) -> Result<T>,
    bounds: &BoxSet<T>,
    x0: &[T],
    f0: Option<T>,
    cfg: &LocalSearchConfig<T>,
) -> Result<LocalResult<T>> {
    cfg.validate()?;
    check_len("x0", bounds.dim(), x0.len())?;
    if !bounds.contains(x0) {
        return Err(Error::Usage("local search start point lies outside the box".into()));
    }
    let n = x0.len();
    let mut evals = 0usize;
    let mut x = x0.to_vec();
    let mut fx = match f0 {
        Some(v) => v,
        None => {
            evals += 1;
            f(&x)?
        }
    };
    let mut history = Vec::new();
    let widths = bounds.widths();
    let shortest = widths.iter().copied().filter(|w| *w > T::zero()).fold(T::infinity(), T::min);
    let start = cfg.initial_step.unwrap_or_else(|| if shortest.is_finite() { shortest / T::lit(2.0) } else { T::one() });
    let mut step: Vec<T> = widths.iter().map(|&w| if w > T::zero() { start } else { T::zero() }).collect();
    let mut sign = vec![T::one(); n];
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let clamp = |i: usize, v: T| v.max(lo[i]).min(hi[i]);

    'outer: while evals < cfg.budget && step.iter().any(|&s| s >= cfg.step_tol) {
        for i in 0..n {
            if step[i] < cfg.step_tol {
                continue;
            }
            let mut success = false;
            // values at x ± step when both signs were tried with a full step
            let mut probes: Vec<(T, T)> = Vec::with_capacity(2);
            for dir in [sign[i], -sign[i]] {
                let target = clamp(i, x[i] + dir * step[i]);
                let moved = (target - x[i]).abs();
                if moved == T::zero() {
                    continue;
                }
                if evals >= cfg.budget {
                    break 'outer;
                }
                let mut trial = x.clone();
                trial[i] = target;
                evals += 1;
                let ft = f(&trial)?;
                if moved == step[i] {
                    probes.push((dir, ft));
                }
                if ft <= fx - cfg.gamma * moved * moved {
                    let (mut best_x, mut best_f, mut best_move) = (trial, ft, moved);
                    // extrapolate while decrease holds against the base point
                    while evals < cfg.budget {
                        let further = clamp(i, x[i] + dir * best_move * cfg.expansion);
                        let m = (further - x[i]).abs();
                        if m <= best_move {
                            break;
                        }
                        let mut t = x.clone();
                        t[i] = further;
                        evals += 1;
                        let fe = f(&t)?;
                        if fe <= fx - cfg.gamma * m * m && fe < best_f {
                            (best_x, best_f, best_move) = (t, fe, m);
                        } else {
                            break;
                        }
                    }
                    x = best_x;
                    fx = best_f;
                    step[i] = best_move;
                    sign[i] = dir;
                    history.push((evals, fx));
                    success = true;
                    break;
                }
            }
            if !success {
                // minimizer of the parabola through x − s, x, x + s
                if let [(d0, f0), (_, f1)] = probes[..] {
                    let (fp, fm) = if d0 > T::zero() { (f0, f1) } else { (f1, f0) };
                    let curv = fp + fm - T::lit(2.0) * fx;
                    if curv > T::zero() && evals < cfg.budget {
                        let t = step[i] * (fm - fp) / (T::lit(2.0) * curv);
                        let target = clamp(i, x[i] + t);
                        let moved = (target - x[i]).abs();
                        if moved > T::zero() {
                            let mut trial = x.clone();
                            trial[i] = target;
                            evals += 1;
                            let ft = f(&trial)?;
                            if ft <= fx - cfg.gamma * moved * moved {
                                x = trial;
                                fx = ft;
                                history.push((evals, fx));
                            }
                        }
                    }
                }
                step[i] *= cfg.contraction;
            }
        }
    }
    Ok(LocalResult { x, value: fx, evals_used: evals, history })
}
