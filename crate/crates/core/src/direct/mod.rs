//! DIRECT over the feasible box, with the classic and the `L̄`-informed
//! selection rules.

mod engine;
mod partition;
mod select;

pub use engine::{run_direct, write_trace, Direct, DirectRun, TraceRow};
pub use partition::{max_depth, Grid, Partition, Rectangle};
pub use select::{lower_bound_gap, select_lbar_potentially_optimal, select_potentially_optimal, SelectionPoint};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which selection rule drives the division step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Potentially optimal rectangles.
    Direct,
    /// `L̄`-potentially optimal rectangles.
    LbarDirect,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Direct => "direct",
            Variant::LbarDirect => "ldirect",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Variant::Direct),
            "ldirect" => Ok(Variant::LbarDirect),
            other => Err(Error::Usage(format!("unknown algorithm '{other}' (expected direct or ldirect)"))),
        }
    }
}

/// How the per-rectangle Lipschitz overestimate is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LbarMode<T> {
    /// Analytic bound over each rectangle's own box.
    Analytic,
    /// One global value for every rectangle.
    Constant(T),
    /// Safety factor times the largest slope seen between sampled centers.
    SlopeEstimate(T),
}

impl<T: Scalar> std::str::FromStr for LbarMode<T> {
    type Err = Error;

    /// `analytic`, `constant:<v>` or `slope:<factor>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("invalid lbar mode '{s}' (expected analytic, constant:<v> or slope:<f>)"));
        let number = |v: &str| v.trim().parse::<f64>().map(T::lit).map_err(|_| bad());
        match s.split_once(':') {
            None if s == "analytic" => Ok(LbarMode::Analytic),
            Some(("constant", v)) => Ok(LbarMode::Constant(number(v)?)),
            Some(("slope", v)) => Ok(LbarMode::SlopeEstimate(number(v)?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectConfig<T> {
    pub epsilon: T,
    pub eta: T,
    pub lbar_mode: LbarMode<T>,
    /// Evaluation budget; the last iteration may overshoot it by less than `2n`.
    pub budget: usize,
    pub alpha: T,
    pub variant: Variant,
}

impl<T: Scalar> Default for DirectConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(1e-4),
            eta: T::lit(1e-4),
            lbar_mode: LbarMode::Analytic,
            budget: 500,
            alpha: T::one(),
            variant: Variant::LbarDirect,
        }
    }
}

impl<T: Scalar> DirectConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("eta", self.eta)?;
        match self.lbar_mode {
            LbarMode::Analytic => {}
            LbarMode::Constant(v) => positive("constant lbar", v)?,
            LbarMode::SlopeEstimate(f) => positive("slope safety factor", f)?,
        }
        if self.budget == 0 {
            return Err(Error::Usage("budget must be at least 1".into()));
        }
        if !(self.alpha >= T::zero()) || !self.alpha.is_finite() {
            return Err(Error::Usage(format!("alpha must be finite and nonnegative, got {}", self.alpha)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lbar_modes() {
        assert_eq!("analytic".parse::<LbarMode<f64>>().unwrap(), LbarMode::Analytic);
        assert_eq!("constant:2.5".parse::<LbarMode<f64>>().unwrap(), LbarMode::Constant(2.5));
        assert_eq!("slope:10".parse::<LbarMode<f64>>().unwrap(), LbarMode::SlopeEstimate(10.0));
        assert!("constant".parse::<LbarMode<f64>>().is_err());
        assert!("slope:x".parse::<LbarMode<f64>>().is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = DirectConfig::<f64>::default();
        assert!(cfg.validate().is_ok());
        cfg.budget = 0;
        assert!(cfg.validate().is_err());
        let cfg = DirectConfig::<f64> { epsilon: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = DirectConfig::<f64> { lbar_mode: LbarMode::Constant(-1.0), ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn variant_names() {
        assert_eq!("ldirect".parse::<Variant>().unwrap(), Variant::LbarDirect);
        assert_eq!(Variant::Direct.to_string(), "direct");
    }
}
