//! Benchmark runs over problem suites, gate tables and Moré–Wild profiles.

mod io;
mod profile;

pub use io::{read_histories, read_records, write_gate_table, write_histories, write_profile, write_records};
pub use profile::{data_profile, performance_profile, solve_times, Profile, ProfileCurve, SolveTime};

use std::path::Path;

use rayon::prelude::*;

use crate::direct::{LbarMode, Variant};
use crate::driver::{evals_to_gaps, solve, SolveOptions};
use crate::error::{Error, Result};
use crate::gen::suite_files;
use crate::problem::{load_problem, ProblemInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub variants: Vec<Variant>,
    pub alpha: f64,
    pub global_budget: usize,
    pub local_budget: usize,
    pub tau: f64,
    pub gates: Vec<f64>,
    pub epsilon: f64,
    pub eta: f64,
    pub lbar_mode: LbarMode<f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            variants: vec![Variant::Direct, Variant::LbarDirect],
            alpha: 1.0,
            global_budget: 500,
            local_budget: 100,
            tau: 1e-3,
            gates: vec![1e-1, 1e-3, 1e-5],
            epsilon: 1e-4,
            eta: 1e-4,
            lbar_mode: LbarMode::Analytic,
        }
    }
}

impl BenchConfig {
    pub fn budget(&self) -> usize {
        self.global_budget + self.local_budget
    }

    fn options(&self, variant: Variant) -> SolveOptions<f64> {
        SolveOptions {
            variant,
            alpha: self.alpha,
            global_budget: self.global_budget,
            local_budget: self.local_budget,
            epsilon: self.epsilon,
            eta: self.eta,
            lbar_mode: self.lbar_mode,
            ..Default::default()
        }
    }
}

/// Outcome of one (problem, variant) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem_id: String,
    pub variant: Variant,
    pub n: usize,
    /// Global plus local budget.
    pub budget: usize,
    pub tau: f64,
    /// Value at the initial center; the reference of the convergence test.
    pub initial_value: f64,
    pub best_phi: f64,
    pub evals_used: usize,
    pub gap_bound: Option<f64>,
    pub gates: Vec<f64>,
    pub evals_to_gates: Vec<Option<usize>>,
    pub solved: bool,
    pub evals_to_solve: Option<usize>,
    pub history: Vec<(usize, f64)>,
    /// Failure message when the solve did not complete.
    pub error: Option<String>,
}

/// Evaluations until the best value first satisfies `φ ≤ τ φ(x⁰)`.
pub fn evals_to_solve(history: &[(usize, f64)], initial_value: f64, tau: f64) -> Option<usize> {
    let threshold = tau * initial_value;
    history.iter().find(|(_, v)| *v <= threshold).map(|(e, _)| *e)
}

fn failed(problem_id: String, variant: Variant, n: usize, cfg: &BenchConfig, message: String) -> RunRecord {
    RunRecord {
        problem_id,
        variant,
        n,
        budget: cfg.budget(),
        tau: cfg.tau,
        initial_value: f64::NAN,
        best_phi: f64::NAN,
        evals_used: 0,
        gap_bound: None,
        gates: cfg.gates.clone(),
        evals_to_gates: vec![None; cfg.gates.len()],
        solved: false,
        evals_to_solve: None,
        history: Vec::new(),
        error: Some(message),
    }
}

pub fn run_one(p: &ProblemInstance<f64>, variant: Variant, cfg: &BenchConfig) -> RunRecord {
    match solve(p, &cfg.options(variant)) {
        Ok(r) => {
            let evals_to_solve = evals_to_solve(&r.history, r.initial_value, cfg.tau);
            RunRecord {
                problem_id: r.problem_id,
                variant,
                n: r.n,
                budget: cfg.budget(),
                tau: cfg.tau,
                initial_value: r.initial_value,
                best_phi: r.best_phi,
                evals_used: r.evals_used,
                gap_bound: r.gap_bound,
                gates: cfg.gates.clone(),
                evals_to_gates: evals_to_gaps(&r.history, &cfg.gates),
                solved: evals_to_solve.is_some(),
                evals_to_solve,
                history: r.history,
                error: None,
            }
        }
        Err(e) => failed(p.id().to_string(), variant, p.n(), cfg, e.to_string()),
    }
}

fn validate(cfg: &BenchConfig) -> Result<()> {
    if cfg.variants.is_empty() {
        return Err(Error::Usage("at least one algorithm is required".into()));
    }
    if !(cfg.tau > 0.0 && cfg.tau < 1.0) {
        return Err(Error::Usage(format!("tau must lie in (0, 1), got {}", cfg.tau)));
    }
    if cfg.gates.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Usage("gates must be positive".into()));
    }
    Ok(())
}

fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| a.problem_id.cmp(&b.problem_id).then(a.variant.cmp(&b.variant)));
}

/// Runs every (problem, variant) pair in parallel; output is sorted by
/// problem id, then variant.
pub fn run_problems(problems: &[ProblemInstance<f64>], cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    validate(cfg)?;
    let pairs: Vec<(usize, Variant)> =
        (0..problems.len()).flat_map(|i| cfg.variants.iter().map(move |&v| (i, v))).collect();
    let mut records: Vec<RunRecord> = pairs.par_iter().map(|&(i, v)| run_one(&problems[i], v, cfg)).collect();
    sort_records(&mut records);
    Ok(records)
}

/// Loads every problem of the suite in `dir` and runs it. Files that fail
/// to load produce error records named after the file.
pub fn run_suite(dir: impl AsRef<Path>, cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    validate(cfg)?;
    let files = suite_files(dir.as_ref())?;
    if files.is_empty() {
        return Err(Error::Usage(format!("suite {} contains no problem files", dir.as_ref().display())));
    }
    let mut problems = Vec::new();
    let mut records = Vec::new();
    for f in files {
        match load_problem::<f64>(&f) {
            Ok(p) => problems.push(p),
            Err(e) => {
                let id = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                for &v in &cfg.variants {
                    records.push(failed(id.clone(), v, 0, cfg, e.to_string()));
                }
            }
        }
    }
    records.extend(run_problems(&problems, cfg)?);
    sort_records(&mut records);
    Ok(records)
}
