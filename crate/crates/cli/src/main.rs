use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use eqdirect::bench::{self, BenchConfig, RunRecord, SolveTime};
use eqdirect::direct::{write_trace, LbarMode, Variant};
use eqdirect::driver::{solve, write_history, write_summary, SolveOptions};
use eqdirect::gen::{write_suite, GenSpec};
use eqdirect::problem::{load_problem, ProblemClass};

#[derive(Parser)]
#[command(name = "eqdirect", version, about = "Solve box-constrained equilibrium problems with DIRECT on the gap function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenClass {
    AffineVi,
    TrigVi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Direct,
    Ldirect,
}

impl From<Algo> for Variant {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Direct => Variant::Direct,
            Algo::Ldirect => Variant::LbarDirect,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Perf,
    Data,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite of random instances
    Gen {
        #[arg(long, value_enum)]
        class: GenClass,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one problem file
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "ldirect")]
        algo: Algo,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 500)]
        global_budget: usize,
        #[arg(long, default_value_t = 100)]
        local_budget: usize,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        eta: f64,
        /// analytic, constant:<v> or slope:<factor>
        #[arg(long, default_value = "analytic")]
        lbar: String,
        /// Number of local searches sharing the local budget
        #[arg(long, default_value_t = 1)]
        starts: usize,
        /// Per-iteration trace of the global phase
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Best value after every improvement
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Run algorithms over a suite and write records, gate table and profiles
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "direct,ldirect")]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 500)]
        global_budget: usize,
        #[arg(long, default_value_t = 100)]
        local_budget: usize,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-3,1e-5")]
        gates: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        eta: f64,
        #[arg(long, default_value = "analytic")]
        lbar: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a performance or data profile from a records file
    Profile {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_enum)]
        kind: ProfileKind,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn dedup<T: PartialEq>(mut v: Vec<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len());
    for x in v.drain(..) {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn write_profiles(times: &[SolveTime], kind: ProfileKind, out: &Path) -> Result<()> {
    let (profile, label) = match kind {
        ProfileKind::Perf => (bench::performance_profile(times)?, "ratio"),
        ProfileKind::Data => (bench::data_profile(times)?, "budget_groups"),
    };
    if let Some(w) = &profile.warning {
        eprintln!("warning: {w}");
    }
    bench::write_profile(&profile, label, create(out)?)?;
    Ok(())
}

fn run_gen(class: GenClass, n: usize, count: usize, seed: u64, out: &Path) -> Result<()> {
    let class = match class {
        GenClass::AffineVi => ProblemClass::AffineVi,
        GenClass::TrigVi => ProblemClass::TrigVi,
    };
    let files = write_suite(&GenSpec { class, n, count, seed }, out)?;
    println!("wrote {} problems to {}", files.len(), out.display());
    Ok(())
}

fn run_bench(suite: &Path, cfg: BenchConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let records = bench::run_suite(suite, &cfg)?;
    bench::write_records(&records, create(&out.join("records.csv"))?)?;
    bench::write_histories(&records, create(&out.join("histories.csv"))?)?;
    bench::write_gate_table(&records, &cfg.variants, create(&out.join("gate_table.csv"))?)?;
    let times = bench::solve_times(&records, cfg.tau);
    if cfg.variants.len() >= 2 {
        write_profiles(&times, ProfileKind::Perf, &out.join("perf_profile.csv"))?;
    }
    write_profiles(&times, ProfileKind::Data, &out.join("data_profile.csv"))?;
    for v in &cfg.variants {
        let mine: Vec<&RunRecord> = records.iter().filter(|r| r.variant == *v).collect();
        let solved = mine.iter().filter(|r| r.solved).count();
        let failed = mine.iter().filter(|r| r.error.is_some()).count();
        println!("{v}: solved {solved}/{} (failed {failed})", mine.len());
    }
    Ok(())
}

fn run_profile(records_path: &Path, kind: ProfileKind, tau: f64, out: &Path) -> Result<()> {
    let mut records = bench::read_records(open(records_path)?)?;
    let histories = records_path.with_file_name("histories.csv");
    let times = if histories.exists() {
        let h = bench::read_histories(open(&histories)?)?;
        for r in &mut records {
            r.history = h.get(&(r.problem_id.clone(), r.variant)).cloned().unwrap_or_default();
        }
        bench::solve_times(&records, tau)
    } else {
        if records.iter().any(|r| r.tau != tau) {
            bail!("{} was computed with a different tau and no histories.csv is available", records_path.display());
        }
        records
            .iter()
            .map(|r| SolveTime { problem_id: r.problem_id.clone(), variant: r.variant, n: r.n, evals: r.evals_to_solve })
            .collect()
    };
    write_profiles(&times, kind, out)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen { class, n, count, seed, out } => run_gen(class, n, count, seed, &out),
        Command::Solve { problem, algo, alpha, global_budget, local_budget, eps, eta, lbar, starts, trace, history } => {
            let p = load_problem::<f64>(&problem)?;
            let lbar_mode: LbarMode<f64> = lbar.parse()?;
            let opts = SolveOptions {
                variant: algo.into(),
                alpha,
                global_budget,
                local_budget,
                epsilon: eps,
                eta,
                lbar_mode,
                starts,
                ..Default::default()
            };
            let r = solve(&p, &opts)?;
            if let Some(path) = trace {
                write_trace(&r.trace, create(&path)?)?;
            }
            if let Some(path) = history {
                write_history(&[&r], create(&path)?)?;
            }
            write_summary(&[&r], io::stdout().lock())?;
            Ok(())
        }
        Command::Bench { suite, algos, alpha, global_budget, local_budget, tau, gates, eps, eta, lbar, out } => {
            let cfg = BenchConfig {
                variants: dedup(algos.into_iter().map(Variant::from).collect()),
                alpha,
                global_budget,
                local_budget,
                tau,
                gates,
                epsilon: eps,
                eta,
                lbar_mode: lbar.parse()?,
            };
            run_bench(&suite, cfg, &out)
        }
        Command::Profile { records, kind, tau, out } => run_profile(&records, kind, tau, &out),
    }
}
