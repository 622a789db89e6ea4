//! Performance and data profiles.

use std::collections::BTreeMap;

use super::{evals_to_solve, RunRecord};
use crate::direct::Variant;
use crate::error::{Error, Result};

/// Cost of one (problem, variant) pair under a convergence test.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTime {
    pub problem_id: String,
    pub variant: Variant,
    pub n: usize,
    pub evals: Option<usize>,
}

/// Recomputes solve costs from the stored histories under `tau`.
pub fn solve_times(records: &[RunRecord], tau: f64) -> Vec<SolveTime> {
    records
        .iter()
        .map(|r| SolveTime {
            problem_id: r.problem_id.clone(),
            variant: r.variant,
            n: r.n,
            evals: if r.error.is_some() { None } else { evals_to_solve(&r.history, r.initial_value, tau) },
        })
        .collect()
}

/// Step function sampled at its breakpoints: `(abscissa, fraction)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub variant: Variant,
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Value of the step function at `x` (right-continuous, zero before the first point).
    pub fn at(&self, x: f64) -> f64 {
        self.points.iter().take_while(|(b, _)| *b <= x).last().map_or(0.0, |p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub curves: Vec<ProfileCurve>,
    /// Set when no variant solved any problem.
    pub warning: Option<String>,
}

type Table = (Vec<Variant>, BTreeMap<String, (usize, BTreeMap<Variant, Option<usize>>)>);

fn tabulate(times: &[SolveTime]) -> Table {
    let mut variants: Vec<Variant> = times.iter().map(|t| t.variant).collect();
    variants.sort();
    variants.dedup();
    let mut problems: BTreeMap<String, (usize, BTreeMap<Variant, Option<usize>>)> = BTreeMap::new();
    for t in times {
        let e = problems.entry(t.problem_id.clone()).or_insert((t.n, BTreeMap::new()));
        e.1.insert(t.variant, t.evals);
    }
    (variants, problems)
}

fn nothing_solved(times: &[SolveTime]) -> bool {
    times.iter().all(|t| t.evals.is_none())
}

const NOTHING_SOLVED: &str = "no problem was solved by any variant; profiles are empty";

/// `ρ_s(θ)`: fraction of problems whose cost is within `θ` times the best
/// variant's cost, at every breakpoint `θ ≥ 1` of any curve.
pub fn performance_profile(times: &[SolveTime]) -> Result<Profile> {
    let (variants, problems) = tabulate(times);
    if variants.len() < 2 {
        return Err(Error::Usage("a performance profile needs at least two variants".into()));
    }
    if nothing_solved(times) {
        return Ok(Profile { curves: Vec::new(), warning: Some(NOTHING_SOLVED.into()) });
    }
    let total = problems.len() as f64;
    let mut ratios: BTreeMap<Variant, Vec<f64>> = BTreeMap::new();
    for (_, costs) in problems.values() {
        let best = variants.iter().filter_map(|v| costs.get(v).copied().flatten()).min();
        for &v in &variants {
            let r = match (costs.get(&v).copied().flatten(), best) {
                (Some(t), Some(b)) => t as f64 / b as f64,
                _ => f64::INFINITY,
            };
            ratios.entry(v).or_default().push(r);
        }
    }
    let mut breaks: Vec<f64> = ratios.values().flatten().copied().filter(|r| r.is_finite()).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let curves = variants
        .iter()
        .map(|v| {
            let rs = &ratios[v];
            let points = breaks.iter().map(|&b| (b, rs.iter().filter(|&&r| r <= b).count() as f64 / total)).collect();
            ProfileCurve { variant: *v, points }
        })
        .collect();
    Ok(Profile { curves, warning: None })
}

/// `d_s(κ)`: fraction of problems solved within `κ (n + 1)` evaluations, at
/// every breakpoint `κ = ⌈t / (n + 1)⌉` of any curve.
pub fn data_profile(times: &[SolveTime]) -> Result<Profile> {
    let (variants, problems) = tabulate(times);
    if variants.is_empty() {
        return Err(Error::Usage("a data profile needs at least one variant".into()));
    }
    if nothing_solved(times) {
        return Ok(Profile { curves: Vec::new(), warning: Some(NOTHING_SOLVED.into()) });
    }
    let total = problems.len() as f64;
    let groups = |t: usize, n: usize| t.div_ceil(n + 1);
    let mut breaks: Vec<usize> = problems
        .values()
        .flat_map(|(n, costs)| costs.values().filter_map(move |c| c.map(|t| groups(t, *n))))
        .collect();
    breaks.sort_unstable();
    breaks.dedup();
    let curves = variants
        .iter()
        .map(|v| {
            let points = breaks
                .iter()
                .map(|&k| {
                    let solved = problems
                        .values()
                        .filter(|(n, costs)| costs.get(v).copied().flatten().is_some_and(|t| t <= k * (n + 1)))
                        .count();
                    (k as f64, solved as f64 / total)
                })
                .collect();
            ProfileCurve { variant: *v, points }
        })
        .collect();
    Ok(Profile { curves, warning: None })
}
