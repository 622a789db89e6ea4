//! Regularized gap function
//!
//! `φ_α(x) = max_{y ∈ C} [ −f(x, y) − (α/2)‖y − x‖² ]`,
//!
//! which is nonnegative on `C` and vanishes exactly at solutions of the
//! equilibrium problem. For the VI classes the inner maximizer has a closed
//! form; for affine EPs it is computed by projected gradient ascent.

use crate::error::{check_len, Error, Result};
use crate::linalg::{spectral_norm, symmetric_eigenvalues, Matrix};
use crate::problem::{ProblemInstance, ProblemSpec};
use crate::scalar::{dot, norm, Scalar};

/// Relative stopping tolerance of the inner ascent; the residual is compared
/// against `tol · (1 + |g(y)|)`.
pub const DEFAULT_INNER_TOL: f64 = 1e-9;

/// Iteration cap of the inner ascent.
pub const INNER_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GapEvaluation<T> {
    /// `φ_α(x)`.
    pub value: T,
    /// `y_α(x)`, always inside `C`.
    pub maximizer: Vec<T>,
    pub inner_iterations: usize,
    /// Final scaled projected-gradient norm; zero for closed forms.
    pub inner_residual: T,
}

/// Precomputed data for evaluating `φ_α` of one problem.
#[derive(Debug, Clone)]
pub struct GapFunction<'a, T> {
    problem: &'a ProblemInstance<T>,
    alpha: T,
    tol: T,
    /// Step constant `‖Q + Qᵀ‖ + α` of the inner ascent (affine EP only).
    inner_lipschitz: T,
}

impl<'a, T: Scalar> GapFunction<'a, T> {
    pub fn new(problem: &'a ProblemInstance<T>, alpha: T) -> Result<Self> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Usage(format!("alpha must be finite and nonnegative, got {alpha}")));
        }
        let mut inner_lipschitz = T::zero();
        if let ProblemSpec::AffineEp(s) = problem.spec() {
            let sym = s.q.add(&s.q.transpose());
            let norm_sym = spectral_norm(&sym);
            if alpha == T::zero() {
                let lambda_min = symmetric_eigenvalues(&sym)?[0];
                if lambda_min <= T::lit(1e-10) * norm_sym.max(T::one()) {
                    return Err(Error::NotStronglyConcave);
                }
            }
            inner_lipschitz = norm_sym + alpha;
        }
        Ok(Self { problem, alpha, tol: T::lit(DEFAULT_INNER_TOL), inner_lipschitz })
    }

    /// Overrides the relative inner tolerance.
    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn problem(&self) -> &'a ProblemInstance<T> {
        self.problem
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    #[inline]
    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// `y_α(x)` together with inner-solver diagnostics.
    pub fn inner_maximizer(&self, x: &[T]) -> Result<(Vec<T>, usize, T)> {
        check_len("x", self.problem.n(), x.len())?;
        let c = self.problem.feasible();
        match self.problem.spec() {
            ProblemSpec::AffineEp(s) => self.ascend(&s.p, &s.q, &s.r, x),
            _ => {
                let f = self.problem.operator(x, x);
                let y = if self.alpha > T::zero() {
                    let z: Vec<T> = x.iter().zip(&f).map(|(&xi, &fi)| xi - fi / self.alpha).collect();
                    c.project(&z)
                } else {
                    // linear objective: optimal at a vertex coordinatewise
                    (0..x.len())
                        .map(|i| {
                            if f[i] > T::zero() {
                                c.lower()[i]
                            } else if f[i] < T::zero() {
                                c.upper()[i]
                            } else {
                                x[i].max(c.lower()[i]).min(c.upper()[i])
                            }
                        })
                        .collect()
                };
                Ok((y, 0, T::zero()))
            }
        }
    }

    /// Projected gradient ascent on `g(y) = −<Px + Qy + r, y − x> − (α/2)‖y − x‖²`.
    fn ascend(&self, p: &Matrix<T>, q: &Matrix<T>, r: &[T], x: &[T]) -> Result<(Vec<T>, usize, T)> {
        let c = self.problem.feasible();
        let lg = self.inner_lipschitz;
        let mut px_r = p.mul_vec(x);
        for (a, &ri) in px_r.iter_mut().zip(r) {
            *a += ri;
        }
        let mut y = c.project(x);
        let mut residual = T::infinity();
        for it in 0..INNER_MAX_ITERATIONS {
            let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
            let qy = q.mul_vec(&y);
            let qtd = q.tr_mul_vec(&d);
            let f: Vec<T> = px_r.iter().zip(&qy).map(|(&a, &b)| a + b).collect();
            let value = -dot(&f, &d) - self.alpha / T::lit(2.0) * dot(&d, &d);
            let mut next: Vec<T> = (0..y.len())
                .map(|i| y[i] + (-f[i] - qtd[i] - self.alpha * d[i]) / lg)
                .collect();
            c.project_in_place(&mut next);
            let step: Vec<T> = y.iter().zip(&next).map(|(&a, &b)| a - b).collect();
            residual = norm(&step) * lg;
            y = next;
            if residual <= self.tol * (T::one() + value.abs()) {
                return Ok((y, it + 1, residual));
            }
        }
        Err(Error::InnerNotConverged {
            iterations: INNER_MAX_ITERATIONS,
            residual: residual.as_f64(),
            best: y.iter().map(|v| v.as_f64()).collect(),
        })
    }

    /// `φ_α(x)`. One call is one function evaluation for budget purposes.
    pub fn value(&self, x: &[T]) -> Result<GapEvaluation<T>> {
        let (y, inner_iterations, inner_residual) = self.inner_maximizer(x)?;
        let f = self.problem.operator(x, &y);
        let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
        let value = -dot(&f, &d) - self.alpha / T::lit(2.0) * dot(&d, &d);
        Ok(GapEvaluation { value, maximizer: y, inner_iterations, inner_residual })
    }

    /// `∇φ_α(x) = F(x, y) + (αI − ∇₁F(x, y)ᵀ)(y − x)` with `y = y_α(x)`; needs `α > 0`.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        if !(self.alpha > T::zero()) {
            return Err(Error::Usage("the gap function gradient requires alpha > 0".into()));
        }
        let (y, _, _) = self.inner_maximizer(x)?;
        let f = self.problem.operator(x, &y);
        let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
        let jt_d = self.problem.jacobian_x(x).tr_mul_vec(&d);
        Ok((0..x.len()).map(|i| f[i] + self.alpha * d[i] - jt_d[i]).collect())
    }
}

/// `y_α(x)` with relative inner tolerance `tol`.
pub fn inner_maximizer<T: Scalar>(p: &ProblemInstance<T>, x: &[T], alpha: T, tol: T) -> Result<Vec<T>> {
    Ok(GapFunction::new(p, alpha)?.with_tolerance(tol).inner_maximizer(x)?.0)
}

pub fn gap_value<T: Scalar>(p: &ProblemInstance<T>, x: &[T], alpha: T, tol: T) -> Result<GapEvaluation<T>> {
    GapFunction::new(p, alpha)?.with_tolerance(tol).value(x)
}

pub fn gap_gradient<T: Scalar>(p: &ProblemInstance<T>, x: &[T], alpha: T, tol: T) -> Result<Vec<T>> {
    GapFunction::new(p, alpha)?.with_tolerance(tol).gradient(x)
}
