//! Overestimates of the Lipschitz constant of `φ_α` over a sub-box `B = [a, b]`.
//!
//! Three general constants are combined:
//!
//! * `L1 + L2·LF + α·L2` (any `α ≥ 0`),
//! * `L1 + L2·L3(α)` (`α > 0`),
//! * `L1 + L1·L3(α)/α` (VI classes, `B ⊆ C`, `α > 0`),
//!
//! where `L1 ≥ max ‖F(x, y)‖`, `L2 = max ‖x − y‖` over `x ∈ B`, `y ∈ C`,
//! `L3(α) ≥ max ‖αI − ∇₁F‖` and `LF` is a Lipschitz constant of `F(·, y)`.
//! Norms of `P`, `Q` and `αI − P` do not depend on `B` and are computed once
//! per problem.

use crate::error::{check_len, Error, Result};
pub use crate::linalg::{pseudoinverse, spectral_norm};
use crate::linalg::Matrix;
use crate::problem::{BoxSet, ProblemInstance, ProblemSpec};
use crate::scalar::{norm, Scalar};

/// The three upper bounds on `max_{a ≤ x ≤ b} ‖Px + r‖` and the (unsafe)
/// range term `‖P‖·‖c(a, b)‖`, which alone is *not* a valid bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Components<T> {
    /// `‖(I − PP⁺)r‖ + ‖P‖·‖c(a, b)‖`
    pub via_pseudoinverse: T,
    /// `‖Pa + r‖ + ‖P‖·‖b − a‖`
    pub from_lower: T,
    /// `‖Pb + r‖ + ‖P‖·‖b − a‖`
    pub from_upper: T,
    /// `‖P‖·‖c(a, b)‖`
    pub range_term: T,
}

impl<T: Scalar> L1Components<T> {
    pub fn min(&self) -> T {
        self.via_pseudoinverse.min(self.from_lower).min(self.from_upper)
    }
}

/// Cached `P⁺`, `I − PP⁺` and `‖P‖` for repeated `L̃₁` evaluations.
#[derive(Debug, Clone)]
pub struct L1Estimator<T> {
    p: Matrix<T>,
    pinv: Matrix<T>,
    complement: Matrix<T>,
    p_norm: T,
}

impl<T: Scalar> L1Estimator<T> {
    pub fn new(p: &Matrix<T>) -> Self {
        let pinv = pseudoinverse(p);
        let complement = Matrix::identity(p.rows()).sub(&p.matmul(&pinv));
        Self { p: p.clone(), pinv, complement, p_norm: spectral_norm(p) }
    }

    #[inline]
    pub fn p_norm(&self) -> T {
        self.p_norm
    }

    #[inline]
    pub fn pseudoinverse(&self) -> &Matrix<T> {
        &self.pinv
    }

    pub fn components(&self, r: &[T], a: &[T], b: &[T]) -> L1Components<T> {
        let pinv_r = self.pinv.mul_vec(r);
        let c: Vec<T> = (0..a.len()).map(|i| (a[i] + pinv_r[i]).abs().max((b[i] + pinv_r[i]).abs())).collect();
        let range_term = self.p_norm * norm(&c);
        let residual = norm(&self.complement.mul_vec(r));
        let width: Vec<T> = a.iter().zip(b).map(|(&lo, &hi)| hi - lo).collect();
        let spread = self.p_norm * norm(&width);
        let at = |x: &[T]| {
            let v: Vec<T> = self.p.mul_vec(x).into_iter().zip(r).map(|(px, &ri)| px + ri).collect();
            norm(&v)
        };
        L1Components {
            via_pseudoinverse: residual + range_term,
            from_lower: at(a) + spread,
            from_upper: at(b) + spread,
            range_term,
        }
    }

    /// `L̃₁(P, r, a, b) = min{L₁′, L₁″, L₁‴} ≥ max_{a ≤ x ≤ b} ‖Px + r‖`.
    pub fn estimate(&self, r: &[T], a: &[T], b: &[T]) -> T {
        self.components(r, a, b).min()
    }
}

/// `L̃₁(P, r, a, b)`.
pub fn l1_tilde<T: Scalar>(p: &Matrix<T>, r: &[T], a: &[T], b: &[T]) -> Result<T> {
    let n = p.rows();
    check_len("P columns", n, p.cols())?;
    check_len("r", n, r.len())?;
    check_len("a", n, a.len())?;
    check_len("b", n, b.len())?;
    if a.iter().zip(b).any(|(lo, hi)| lo > hi) {
        return Err(Error::Usage("l1_tilde requires a <= b componentwise".into()));
    }
    Ok(L1Estimator::new(p).estimate(r, a, b))
}

/// Exact `max_{x ∈ B, y ∈ C} ‖x − y‖`.
pub fn l2_exact<T: Scalar>(b: &BoxSet<T>, c: &BoxSet<T>) -> Result<T> {
    check_len("box C", b.dim(), c.dim())?;
    Ok(l2_unchecked(b, c))
}

fn l2_unchecked<T: Scalar>(b: &BoxSet<T>, c: &BoxSet<T>) -> T {
    let per_axis: Vec<T> = (0..b.dim())
        .map(|i| (c.upper()[i] - b.lower()[i]).abs().max((c.lower()[i] - b.upper()[i]).abs()))
        .collect();
    norm(&per_axis)
}

fn max_wv<T: Scalar>(p: &ProblemInstance<T>) -> T {
    p.trig_terms()
        .map(|(w, v)| w.iter().zip(v).map(|(&a, &b)| a * b).fold(T::zero(), T::max))
        .unwrap_or_else(T::zero)
}

/// Overestimate of `max ‖αI − ∇₁F(x, y)‖`; exact for the affine classes.
pub fn l3_bound<T: Scalar>(p: &ProblemInstance<T>, alpha: T) -> T {
    spectral_norm(&p.p().shifted_negation(alpha)) + max_wv(p)
}

/// Lipschitz constant of `F(·, y)`; exact for the affine classes.
pub fn lf_bound<T: Scalar>(p: &ProblemInstance<T>) -> T {
    spectral_norm(p.p()) + max_wv(p)
}

/// All applicable estimates over one sub-box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub l1_bound: T,
    pub l2: T,
    pub l3_bound: T,
    pub lf_bound: T,
    pub thm31: Option<T>,
    pub thm32: Option<T>,
    pub thm33: Option<T>,
    /// Minimum of the present estimates.
    pub chosen: T,
}

/// Per-problem cache of the box-independent quantities.
#[derive(Debug, Clone)]
pub struct LipschitzBounds<'a, T> {
    problem: &'a ProblemInstance<T>,
    alpha: T,
    p_est: L1Estimator<T>,
    l3: T,
    lf: T,
    w_norm: T,
    /// `L̃₁(Q, r, l, u)`, `L̃₁(Q, 0, l, u)`, `L̃₁(Q, r/2, l, u)` for affine EPs.
    ep_feasible_terms: Option<[T; 3]>,
}

impl<'a, T: Scalar> LipschitzBounds<'a, T> {
    pub fn new(problem: &'a ProblemInstance<T>, alpha: T) -> Result<Self> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Usage(format!("alpha must be finite and nonnegative, got {alpha}")));
        }
        let p_est = L1Estimator::new(problem.p());
        let ep_feasible_terms = problem.q().map(|q| {
            let q_est = L1Estimator::new(q);
            let c = problem.feasible();
            let r = problem.r();
            let zero = vec![T::zero(); r.len()];
            let half: Vec<T> = r.iter().map(|&v| v / T::lit(2.0)).collect();
            [
                q_est.estimate(r, c.lower(), c.upper()),
                q_est.estimate(&zero, c.lower(), c.upper()),
                q_est.estimate(&half, c.lower(), c.upper()),
            ]
        });
        let w_norm = problem.trig_terms().map_or(T::zero(), |(w, _)| norm(w));
        Ok(Self {
            problem,
            alpha,
            l3: l3_bound(problem, alpha),
            lf: lf_bound(problem),
            w_norm,
            p_est,
            ep_feasible_terms,
        })
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Upper bound on `max_{x ∈ B, y ∈ C} ‖F(x, y)‖`.
    pub fn l1_bound(&self, b: &BoxSet<T>) -> T {
        let (lo, hi) = (b.lower(), b.upper());
        let r = self.problem.r();
        match self.problem.spec() {
            ProblemSpec::AffineVi(_) => self.p_est.estimate(r, lo, hi),
            ProblemSpec::TrigVi(_) => self.p_est.estimate(r, lo, hi) + self.w_norm,
            ProblemSpec::AffineEp(_) => {
                let [q_r, q_0, q_half] = self.ep_feasible_terms.expect("affine EP carries Q terms");
                let zero = vec![T::zero(); r.len()];
                let half: Vec<T> = r.iter().map(|&v| v / T::lit(2.0)).collect();
                let m1 = self.p_est.estimate(&zero, lo, hi) + q_r;
                let m2 = self.p_est.estimate(r, lo, hi) + q_0;
                let m3 = self.p_est.estimate(&half, lo, hi) + q_half;
                m1.min(m2).min(m3)
            }
        }
    }

    pub fn report(&self, b: &BoxSet<T>) -> Result<BoundReport<T>> {
        let c = self.problem.feasible();
        check_len("box B", c.dim(), b.dim())?;
        if !b.intersects(c) {
            return Err(Error::NoApplicableBound);
        }
        let alpha = self.alpha;
        let l1 = self.l1_bound(b);
        let l2 = l2_unchecked(b, c);
        let thm31 = Some(l1 + l2 * self.lf + alpha * l2);
        let thm32 = (alpha > T::zero()).then(|| l1 + l2 * self.l3);
        let thm33 = (alpha > T::zero() && self.problem.class().is_vi() && b.is_subset_of(c)).then(|| l1 + l1 * self.l3 / alpha);
        let chosen = [thm31, thm32, thm33]
            .into_iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))))
            .ok_or(Error::NoApplicableBound)?;
        Ok(BoundReport { l1_bound: l1, l2, l3_bound: self.l3, lf_bound: self.lf, thm31, thm32, thm33, chosen })
    }
}

/// One-shot bound report; prefer [`LipschitzBounds`] when evaluating many boxes.
pub fn gap_lipschitz_bound<T: Scalar>(p: &ProblemInstance<T>, b: &BoxSet<T>, alpha: T) -> Result<BoundReport<T>> {
    LipschitzBounds::new(p, alpha)?.report(b)
}

/// Reference implementations used to validate the estimates.
pub mod oracle {
    use super::*;

    /// Largest dimension accepted by the vertex enumeration.
    pub const MAX_VERTEX_DIM: usize = 12;

    fn vertices<'a, T: Scalar>(a: &'a [T], b: &'a [T]) -> Result<impl Iterator<Item = Vec<T>> + 'a> {
        let n = a.len();
        if n > MAX_VERTEX_DIM {
            return Err(Error::Usage(format!("vertex enumeration limited to n <= {MAX_VERTEX_DIM}")));
        }
        Ok((0u32..(1u32 << n)).map(move |mask| (0..n).map(|i| if mask >> i & 1 == 1 { b[i] } else { a[i] }).collect()))
    }

    /// Exact `max_{a ≤ x ≤ b} ‖Px + r‖`, attained at a vertex (convexity).
    pub fn vertex_l1<T: Scalar>(p: &Matrix<T>, r: &[T], a: &[T], b: &[T]) -> Result<T> {
        Ok(vertices(a, b)?
            .map(|x| {
                let v: Vec<T> = p.mul_vec(&x).into_iter().zip(r).map(|(u, &ri)| u + ri).collect();
                norm(&v)
            })
            .fold(T::zero(), T::max))
    }

    /// `max ‖x − y‖` over corner pairs of `B × C`.
    pub fn corner_l2<T: Scalar>(b: &BoxSet<T>, c: &BoxSet<T>) -> Result<T> {
        let cs: Vec<Vec<T>> = vertices(c.lower(), c.upper())?.collect();
        Ok(vertices(b.lower(), b.upper())?
            .flat_map(|x| cs.iter().map(move |y| crate::scalar::dist(&x, y)).collect::<Vec<_>>())
            .fold(T::zero(), T::max))
    }
}
