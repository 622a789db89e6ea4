//! Equilibrium problems with bifunction `f(x, y) = <F(x, y), y - x>` over a box.
//!
//! Three operator classes are supported:
//!
//! * affine VI: `F(x) = P x + r`
//! * VI with trigonometric terms: `F(x) = P x + r + T(x)`, `T_i(x) = w_i sin(v_i x_i)`
//! * affine EP: `F(x, y) = P x + Q y + r`, with `Q + Qᵀ` positive semidefinite so
//!   that `f(x, ·)` is convex.
//!
//! Instances are immutable once built; every constructor validates the
//! invariants of its class.

pub(crate) mod file;

pub use file::{load_problem, parse_problem, save_problem, write_problem};

use crate::error::{check_len, Error, Result};
use crate::linalg::{spectral_norm, symmetric_eigenvalues, Matrix};
use crate::scalar::{dot, Scalar};

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    /// Builds a box, requiring `lower[i] <= upper[i]`. Degenerate sides are allowed.
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_len("box upper bounds", lower.len(), upper.len())?;
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite()) {
                return Err(Error::Invariant(format!("box bound {i} is not finite")));
            }
            if l > u {
                return Err(Error::Invariant(format!("lower[{i}] = {l} exceeds upper[{i}] = {u}")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(n: usize) -> Self {
        Self { lower: vec![T::zero(); n], upper: vec![T::one(); n] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    #[inline]
    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    #[inline]
    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn widths(&self) -> Vec<T> {
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| u - l).collect()
    }

    pub fn center(&self) -> Vec<T> {
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| (l + u) / T::lit(2.0)).collect()
    }

    /// `‖upper − lower‖`.
    pub fn diameter(&self) -> T {
        crate::scalar::norm(&self.widths())
    }

    pub fn volume(&self) -> T {
        self.widths().into_iter().fold(T::one(), |a, w| a * w)
    }

    /// Every side has strictly positive length.
    pub fn is_nondegenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l < u)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| l <= v && v <= u)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| other.lower[i] <= self.lower[i] && self.upper[i] <= other.upper[i])
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (0..self.dim()).all(|i| self.lower[i].max(other.lower[i]) <= self.upper[i].min(other.upper[i]))
    }

    /// Euclidean projection onto the box (componentwise clamp).
    pub fn project(&self, z: &[T]) -> Vec<T> {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| v.max(l).min(u))
            .collect()
    }

    pub(crate) fn project_in_place(&self, z: &mut [T]) {
        for (v, (&l, &u)) in z.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.max(l).min(u);
        }
    }
}

/// Checked projection onto a box.
pub fn project_box<T: Scalar>(b: &BoxSet<T>, z: &[T]) -> Result<Vec<T>> {
    check_len("point", b.dim(), z.len())?;
    Ok(b.project(z))
}

/// `F(x) = P x + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineViSpec<T> {
    pub p: Matrix<T>,
    pub r: Vec<T>,
}

/// `F(x) = P x + r + T(x)` with `T_i(x) = w_i sin(v_i x_i)`, `w, v > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigViSpec<T> {
    pub p: Matrix<T>,
    pub r: Vec<T>,
    pub w: Vec<T>,
    pub v: Vec<T>,
}

/// `F(x, y) = P x + Q y + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineEpSpec<T> {
    pub p: Matrix<T>,
    pub q: Matrix<T>,
    pub r: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    AffineVi,
    TrigVi,
    AffineEp,
}

impl ProblemClass {
    pub fn is_vi(self) -> bool {
        !matches!(self, ProblemClass::AffineEp)
    }

    /// Name used in problem files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemClass::AffineVi => "affine-vi",
            ProblemClass::TrigVi => "trig-vi",
            ProblemClass::AffineEp => "affine-ep",
        }
    }
}

impl std::fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "affine-vi" | "affinevi" => Ok(ProblemClass::AffineVi),
            "trig-vi" | "trigvi" => Ok(ProblemClass::TrigVi),
            "affine-ep" | "affineep" => Ok(ProblemClass::AffineEp),
            other => Err(Error::Usage(format!("unknown problem class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec<T> {
    AffineVi(AffineViSpec<T>),
    TrigVi(TrigViSpec<T>),
    AffineEp(AffineEpSpec<T>),
}

/// An equilibrium problem over a box `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<T> {
    id: String,
    spec: ProblemSpec<T>,
    feasible: BoxSet<T>,
}

impl<T: Scalar> ProblemInstance<T> {
    /// Validates dimensions and class invariants; `C` must have positive width
    /// in every coordinate.
    pub fn new(id: impl Into<String>, spec: ProblemSpec<T>, feasible: BoxSet<T>) -> Result<Self> {
        let n = feasible.dim();
        if n == 0 {
            return Err(Error::Invariant("problem dimension must be positive".into()));
        }
        if !feasible.is_nondegenerate() {
            return Err(Error::Invariant("feasible box must satisfy lower < upper in every coordinate".into()));
        }
        let check_square = |what: &'static str, m: &Matrix<T>| -> Result<()> {
            check_len(what, n, m.rows())?;
            check_len(what, n, m.cols())?;
            if !m.is_finite() {
                return Err(Error::Invariant(format!("{what} has non-finite entries")));
            }
            Ok(())
        };
        let check_vec = |what: &'static str, v: &[T]| -> Result<()> {
            check_len(what, n, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invariant(format!("{what} has non-finite entries")));
            }
            Ok(())
        };
        match &spec {
            ProblemSpec::AffineVi(s) => {
                check_square("P", &s.p)?;
                check_vec("r", &s.r)?;
            }
            ProblemSpec::TrigVi(s) => {
                check_square("P", &s.p)?;
                check_vec("r", &s.r)?;
                check_vec("w", &s.w)?;
                check_vec("v", &s.v)?;
                if let Some(i) = s.w.iter().position(|&x| x <= T::zero()) {
                    return Err(Error::Invariant(format!("w[{i}] must be positive")));
                }
                if let Some(i) = s.v.iter().position(|&x| x <= T::zero()) {
                    return Err(Error::Invariant(format!("v[{i}] must be positive")));
                }
            }
            ProblemSpec::AffineEp(s) => {
                check_square("P", &s.p)?;
                check_square("Q", &s.q)?;
                check_vec("r", &s.r)?;
                let sym = s.q.add(&s.q.transpose());
                let lambda_min = symmetric_eigenvalues(&sym)?[0];
                let floor = -T::lit(1e-10) * spectral_norm(&s.q);
                if lambda_min < floor {
                    return Err(Error::Invariant(format!(
                        "Q + Q^T must be positive semidefinite (f(x, .) convex); smallest eigenvalue is {lambda_min}"
                    )));
                }
            }
        }
        Ok(Self { id: id.into(), spec, feasible })
    }

    pub fn affine_vi(id: impl Into<String>, p: Matrix<T>, r: Vec<T>, feasible: BoxSet<T>) -> Result<Self> {
        Self::new(id, ProblemSpec::AffineVi(AffineViSpec { p, r }), feasible)
    }

    pub fn trig_vi(id: impl Into<String>, p: Matrix<T>, r: Vec<T>, w: Vec<T>, v: Vec<T>, feasible: BoxSet<T>) -> Result<Self> {
        Self::new(id, ProblemSpec::TrigVi(TrigViSpec { p, r, w, v }), feasible)
    }

    pub fn affine_ep(id: impl Into<String>, p: Matrix<T>, q: Matrix<T>, r: Vec<T>, feasible: BoxSet<T>) -> Result<Self> {
        Self::new(id, ProblemSpec::AffineEp(AffineEpSpec { p, q, r }), feasible)
    }

    #[inline]
    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.feasible.dim()
    }

    pub fn class(&self) -> ProblemClass {
        match self.spec {
            ProblemSpec::AffineVi(_) => ProblemClass::AffineVi,
            ProblemSpec::TrigVi(_) => ProblemClass::TrigVi,
            ProblemSpec::AffineEp(_) => ProblemClass::AffineEp,
        }
    }

    #[inline]
    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    /// The feasible box `C`.
    #[inline]
    pub fn feasible(&self) -> &BoxSet<T> {
        &self.feasible
    }

    /// The matrix multiplying `x` in `F`.
    pub fn p(&self) -> &Matrix<T> {
        match &self.spec {
            ProblemSpec::AffineVi(s) => &s.p,
            ProblemSpec::TrigVi(s) => &s.p,
            ProblemSpec::AffineEp(s) => &s.p,
        }
    }

    pub fn r(&self) -> &[T] {
        match &self.spec {
            ProblemSpec::AffineVi(s) => &s.r,
            ProblemSpec::TrigVi(s) => &s.r,
            ProblemSpec::AffineEp(s) => &s.r,
        }
    }

    pub fn q(&self) -> Option<&Matrix<T>> {
        match &self.spec {
            ProblemSpec::AffineEp(s) => Some(&s.q),
            _ => None,
        }
    }

    /// `(w, v)` of the trigonometric term.
    pub fn trig_terms(&self) -> Option<(&[T], &[T])> {
        match &self.spec {
            ProblemSpec::TrigVi(s) => Some((&s.w, &s.v)),
            _ => None,
        }
    }

    /// `F(x, y)`; `y` is ignored for the VI classes.
    pub fn eval_operator(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        check_len("x", self.n(), x.len())?;
        check_len("y", self.n(), y.len())?;
        Ok(self.operator(x, y))
    }

    pub(crate) fn operator(&self, x: &[T], y: &[T]) -> Vec<T> {
        match &self.spec {
            ProblemSpec::AffineVi(s) => affine(&s.p, x, &s.r),
            ProblemSpec::TrigVi(s) => {
                let mut out = affine(&s.p, x, &s.r);
                for i in 0..out.len() {
                    out[i] += s.w[i] * (s.v[i] * x[i]).sin();
                }
                out
            }
            ProblemSpec::AffineEp(s) => {
                let mut out = affine(&s.p, x, &s.r);
                for (o, qy) in out.iter_mut().zip(s.q.mul_vec(y)) {
                    *o += qy;
                }
                out
            }
        }
    }

    /// `f(x, y) = <F(x, y), y − x>`.
    pub fn eval_bifunction(&self, x: &[T], y: &[T]) -> Result<T> {
        let f = self.eval_operator(x, y)?;
        let d: Vec<T> = y.iter().zip(x).map(|(&a, &b)| a - b).collect();
        Ok(dot(&f, &d))
    }

    /// Jacobian of `F(·, y)` at `x`.
    pub fn eval_jacobian_x(&self, x: &[T], y: &[T]) -> Result<Matrix<T>> {
        check_len("x", self.n(), x.len())?;
        check_len("y", self.n(), y.len())?;
        Ok(self.jacobian_x(x))
    }

    pub(crate) fn jacobian_x(&self, x: &[T]) -> Matrix<T> {
        match &self.spec {
            ProblemSpec::TrigVi(s) => {
                let mut j = s.p.clone();
                for i in 0..x.len() {
                    j[(i, i)] += s.w[i] * s.v[i] * (s.v[i] * x[i]).cos();
                }
                j
            }
            _ => self.p().clone(),
        }
    }
}

fn affine<T: Scalar>(p: &Matrix<T>, x: &[T], r: &[T]) -> Vec<T> {
    let mut out = p.mul_vec(x);
    for (o, &ri) in out.iter_mut().zip(r) {
        *o += ri;
    }
    out
}
