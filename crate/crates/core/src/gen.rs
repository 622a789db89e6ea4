//! Random affine and trigonometric VI instances.
//!
//! Instance `k` of a suite draws from ChaCha8 seeded with `seed` on stream
//! `k`, so instances are reproducible across machines and independent of
//! how many others are generated.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{save_problem, BoxSet, ProblemClass, ProblemInstance};

/// File name of the suite manifest.
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub class: ProblemClass,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.class == ProblemClass::AffineEp {
            return Err(Error::Usage("random generation supports affine-vi and trig-vi only".into()));
        }
        if self.n == 0 || self.count == 0 {
            return Err(Error::Usage("n and count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn instance(&self, index: u64) -> ProblemInstance<f64> {
        match self.class {
            ProblemClass::TrigVi => gen_trig_vi(self.n, self.seed, index),
            _ => gen_affine_vi(self.n, self.seed, index),
        }
    }

    pub fn instances(&self) -> Result<Vec<ProblemInstance<f64>>> {
        self.validate()?;
        Ok((0..self.count as u64).map(|k| self.instance(k)).collect())
    }
}

fn rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn instance_id(class: ProblemClass, n: usize, seed: u64, index: u64) -> String {
    format!("{class}-n{n}-s{seed}-i{index:04}")
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64, len: usize) -> Vec<f64> {
    (0..len).map(|_| r.random_range(lo..=hi)).collect()
}

/// `U(0, hi]`: exact zeros are redrawn.
fn positive(r: &mut ChaCha8Rng, hi: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| loop {
            let v = r.random_range(0.0..=hi);
            if v > 0.0 {
                break v;
            }
        })
        .collect()
}

/// Matrix, constant term and box shared by both classes, in draw order.
fn affine_part(r: &mut ChaCha8Rng, n: usize) -> (Matrix<f64>, Vec<f64>, BoxSet<f64>) {
    let p = Matrix::from_row_major(n, n, uniform(r, 0.0, 3.0, n * n)).expect("n*n entries");
    let q = uniform(r, -2.0, 2.0, n);
    let lower = uniform(r, -2.0, 0.0, n);
    let upper = uniform(r, 1.0, 3.0, n);
    (p, q, BoxSet::new(lower, upper).expect("disjoint bound ranges"))
}

/// `P ~ U[0,3]`, `r ~ U[−2,2]`, `l ~ U[−2,0]`, `u ~ U[1,3]`.
///
/// # Panics
/// If `n == 0`.
pub fn gen_affine_vi(n: usize, seed: u64, index: u64) -> ProblemInstance<f64> {
    assert!(n > 0, "n must be positive");
    let mut r = rng(seed, index);
    let (p, q, b) = affine_part(&mut r, n);
    ProblemInstance::affine_vi(instance_id(ProblemClass::AffineVi, n, seed, index), p, q, b).expect("generated instance is valid")
}

/// As [`gen_affine_vi`] plus `w ~ U(0,4]`, `v ~ U(0,2]`.
///
/// # Panics
/// If `n == 0`.
pub fn gen_trig_vi(n: usize, seed: u64, index: u64) -> ProblemInstance<f64> {
    assert!(n > 0, "n must be positive");
    let mut r = rng(seed, index);
    let (p, q, b) = affine_part(&mut r, n);
    let w = positive(&mut r, 4.0, n);
    let v = positive(&mut r, 2.0, n);
    ProblemInstance::trig_vi(instance_id(ProblemClass::TrigVi, n, seed, index), p, q, w, v, b).expect("generated instance is valid")
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    #[serde(flatten)]
    spec: GenSpec,
    files: Vec<String>,
}

/// Writes one problem file per instance and the manifest into `dir`.
pub fn write_suite(spec: &GenSpec, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut paths = Vec::new();
    for p in spec.instances()? {
        let name = format!("{}.json", p.id());
        let path = dir.join(&name);
        save_problem(&p, &path)?;
        files.push(name);
        paths.push(path);
    }
    let manifest = Manifest { spec: spec.clone(), files };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    let mpath = dir.join(MANIFEST);
    std::fs::write(&mpath, text).map_err(|e| Error::io(&mpath, e))?;
    Ok(paths)
}

/// Problem files of a suite: those listed in the manifest if present,
/// otherwise every `*.json` file, sorted by name.
pub fn suite_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mpath = dir.join(MANIFEST);
    if mpath.exists() {
        let text = std::fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: mpath.clone(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        return Ok(m.files.iter().map(|f| dir.join(f)).collect());
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}
