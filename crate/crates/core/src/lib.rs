//! Gap-function reformulation of box-constrained equilibrium problems and
//! their solution with DIRECT-type global optimization.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod bench;
pub mod bounds;
pub mod direct;
pub mod driver;
pub mod error;
pub mod gap;
pub mod gen;
pub mod linalg;
pub mod local;
pub mod problem;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Problem = problem::ProblemInstance<f64>;
pub type Problem32 = problem::ProblemInstance<f32>;
pub type Box64 = problem::BoxSet<f64>;
pub type Box32 = problem::BoxSet<f32>;
pub type GapEval = gap::GapEvaluation<f64>;
pub type Report = bounds::BoundReport<f64>;
pub type Config = direct::DirectConfig<f64>;
