//! Global DIRECT phase followed by coordinate search, under one budget.

use std::io::Write;

use crate::direct::{Direct, DirectConfig, LbarMode, TraceRow, Variant};
use crate::bounds::LipschitzBounds;
use crate::error::{Error, Result};
use crate::gap::GapFunction;
use crate::local::{coordinate_search, LocalSearchConfig};
use crate::problem::file::fmt_f64;
use crate::problem::{BoxSet, ProblemInstance};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions<T> {
    pub variant: Variant,
    pub alpha: T,
    pub global_budget: usize,
    pub local_budget: usize,
    pub epsilon: T,
    pub eta: T,
    pub lbar_mode: LbarMode<T>,
    /// Number of local searches; they start from the best distinct centers
    /// and share the local budget.
    pub starts: usize,
    /// Step parameters of the local phase; its `budget` is ignored.
    pub local: LocalSearchConfig<T>,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        let d = DirectConfig::<T>::default();
        Self {
            variant: Variant::LbarDirect,
            alpha: T::one(),
            global_budget: 500,
            local_budget: 100,
            epsilon: d.epsilon,
            eta: d.eta,
            lbar_mode: d.lbar_mode,
            starts: 1,
            local: LocalSearchConfig::default(),
        }
    }
}

impl<T: Scalar> SolveOptions<T> {
    pub fn direct_config(&self) -> DirectConfig<T> {
        DirectConfig {
            epsilon: self.epsilon,
            eta: self.eta,
            lbar_mode: self.lbar_mode,
            budget: self.global_budget.max(1),
            alpha: self.alpha,
            variant: self.variant,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub problem_id: String,
    pub variant: Variant,
    pub alpha: T,
    pub n: usize,
    pub best_x: Vec<T>,
    pub best_phi: T,
    pub evals_used: usize,
    /// Optimality-gap bound at the end of the global phase.
    pub gap_bound: Option<T>,
    /// Value at the center of the feasible box (the first evaluation).
    pub initial_value: T,
    /// `(eval_count, best value so far)` at every improvement.
    pub history: Vec<(usize, T)>,
    /// Per-iteration trace of the global phase.
    pub trace: Vec<TraceRow<T>>,
}

pub fn solve<T: Scalar>(p: &ProblemInstance<T>, opts: &SolveOptions<T>) -> Result<SolveResult<T>> {
    if opts.global_budget == 0 && opts.local_budget == 0 {
        return Err(Error::Usage("global and local budgets cannot both be zero".into()));
    }
    if opts.starts == 0 {
        return Err(Error::Usage("at least one local start is required".into()));
    }
    let cfg = opts.direct_config();
    cfg.validate()?;
    let gap = GapFunction::new(p, opts.alpha)?;
    let bounds = match opts.lbar_mode {
        LbarMode::Analytic => Some(LipschitzBounds::new(p, opts.alpha)?),
        _ => None,
    };
    let run = {
        let objective = Box::new(|x: &[T]| gap.value(x).map(|e| e.value));
        let box_bound = bounds
            .as_ref()
            .map(|b| Box::new(move |bx: &BoxSet<T>| b.report(bx).map(|r| r.chosen)) as Box<dyn Fn(&BoxSet<T>) -> Result<T> + '_>);
        let engine = Direct::new(p.feasible().clone(), cfg, objective, box_bound)?;
        // a zero global budget still evaluates the center as the local start
        if opts.global_budget == 0 {
            engine.finish()
        } else {
            engine.run()?
        }
    };

    let mut best_x = run.best_x.clone();
    let mut best_phi = run.best_phi;
    let mut history = run.history.clone();
    let mut evals = run.partition.eval_count;

    if opts.local_budget > 0 {
        let mut order: Vec<usize> = (0..run.partition.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (&run.partition.rectangles[a], &run.partition.rectangles[b]);
            ra.center_value.partial_cmp(&rb.center_value).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        let mut starts: Vec<(Vec<T>, T)> = Vec::new();
        for i in order {
            let r = &run.partition.rectangles[i];
            if starts.iter().all(|(c, _)| c != &r.center) {
                starts.push((r.center.clone(), r.center_value));
            }
            if starts.len() == opts.starts {
                break;
            }
        }
        let k = starts.len();
        let mut objective = |x: &[T]| gap.value(x).map(|e| e.value);
        for (j, (x0, f0)) in starts.into_iter().enumerate() {
            let budget = opts.local_budget / k + usize::from(j < opts.local_budget % k);
            if budget == 0 {
                continue;
            }
            let local_cfg = LocalSearchConfig { budget, ..opts.local.clone() };
            let res = coordinate_search(&mut objective, p.feasible(), &x0, Some(f0), &local_cfg)?;
            if res.value < best_phi {
                best_x = res.x;
            }
            for (e, v) in res.history {
                if v < best_phi {
                    history.push((evals + e, v));
                    best_phi = v;
                }
            }
            evals += res.evals_used;
        }
    }

    Ok(SolveResult {
        problem_id: p.id().to_string(),
        variant: opts.variant,
        alpha: opts.alpha,
        n: p.n(),
        best_x,
        best_phi,
        evals_used: evals,
        gap_bound: run.gap_bound,
        initial_value: run.initial_value,
        history,
        trace: run.trace,
    })
}

/// First evaluation count at which the best value is at or below each gate.
pub fn evals_to_gaps<T: Scalar>(history: &[(usize, T)], gates: &[T]) -> Vec<Option<usize>> {
    gates.iter().map(|&g| history.iter().find(|(_, v)| *v <= g).map(|(e, _)| *e)).collect()
}

/// One row per history point: `problem_id,variant,alpha,eval_count,best_phi`.
pub fn write_history<T: Scalar>(results: &[&SolveResult<T>], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["problem_id", "variant", "alpha", "eval_count", "best_phi"])?;
    for r in results {
        for (e, v) in &r.history {
            w.write_record([
                r.problem_id.clone(),
                r.variant.to_string(),
                fmt_f64(r.alpha.as_f64()),
                e.to_string(),
                fmt_f64(v.as_f64()),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<history>", e))
}

/// Summary rows; `best_x` components are joined with `;`.
pub fn write_summary<T: Scalar>(results: &[&SolveResult<T>], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["problem_id", "variant", "alpha", "n", "best_phi", "evals_used", "gap_bound", "initial_value", "best_x"])?;
    for r in results {
        let x: Vec<String> = r.best_x.iter().map(|v| fmt_f64(v.as_f64())).collect();
        w.write_record([
            r.problem_id.clone(),
            r.variant.to_string(),
            fmt_f64(r.alpha.as_f64()),
            r.n.to_string(),
            fmt_f64(r.best_phi.as_f64()),
            r.evals_used.to_string(),
            r.gap_bound.map(|g| fmt_f64(g.as_f64())).unwrap_or_default(),
            fmt_f64(r.initial_value.as_f64()),
            x.join(";"),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<summary>", e))
}
