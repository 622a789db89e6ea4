#![allow(dead_code)]

use eqdirect::direct::SelectionPoint;
use eqdirect::linalg::Matrix;
use eqdirect::problem::{BoxSet, ProblemClass, ProblemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64, len: usize) -> Vec<f64> {
    (0..len).map(|_| r.random_range(lo..hi)).collect()
}

pub fn random_box(r: &mut ChaCha8Rng, n: usize) -> BoxSet<f64> {
    BoxSet::new(uniform(r, -2.0, 0.0, n), uniform(r, 1.0, 3.0, n)).unwrap()
}

/// `Q = BBᵀ/n + S − Sᵀ`, so `Q + Qᵀ` is positive semidefinite.
pub fn monotone_coupling(r: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let b = Matrix::from_row_major(n, n, uniform(r, -1.0, 1.0, n * n)).unwrap();
    let s = Matrix::from_row_major(n, n, uniform(r, -1.0, 1.0, n * n)).unwrap();
    b.matmul(&b.transpose()).scale(2.0 / n as f64).add(&s.sub(&s.transpose()))
}

/// Random instance with the experimental ranges; EPs get a monotone `Q`.
pub fn random_problem(r: &mut ChaCha8Rng, class: ProblemClass, n: usize) -> ProblemInstance<f64> {
    let p = Matrix::from_row_major(n, n, uniform(r, 0.0, 3.0, n * n)).unwrap();
    let q = uniform(r, -2.0, 2.0, n);
    let b = random_box(r, n);
    match class {
        ProblemClass::AffineVi => ProblemInstance::affine_vi("rand", p, q, b).unwrap(),
        ProblemClass::TrigVi => {
            let w = uniform(r, 0.01, 4.0, n);
            let v = uniform(r, 0.01, 2.0, n);
            ProblemInstance::trig_vi("rand", p, q, w, v, b).unwrap()
        }
        ProblemClass::AffineEp => {
            let coupling = monotone_coupling(r, n);
            let p = p.scale(0.5);
            ProblemInstance::affine_ep("rand", p, coupling, q, b).unwrap()
        }
    }
}

pub fn random_point(r: &mut ChaCha8Rng, b: &BoxSet<f64>) -> Vec<f64> {
    b.lower().iter().zip(b.upper()).map(|(&l, &u)| r.random_range(l..=u)).collect()
}

/// Random sub-box of `b`, with side fractions spread over several scales.
pub fn random_subbox(r: &mut ChaCha8Rng, b: &BoxSet<f64>) -> BoxSet<f64> {
    let scale = 10f64.powf(-r.random_range(0.0..3.0));
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for (&l, &u) in b.lower().iter().zip(b.upper()) {
        let w = (u - l) * scale * r.random_range(0.2..1.0);
        let a = r.random_range(l..=u - w);
        lo.push(a);
        hi.push(a + w);
    }
    BoxSet::new(lo, hi).unwrap()
}

/// `−f(x, y) − (α/2)‖y − x‖²` from the bifunction alone.
pub fn inner_objective(p: &ProblemInstance<f64>, x: &[f64], y: &[f64], alpha: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    -p.eval_bifunction(x, y).unwrap() - alpha / 2.0 * d2
}

/// Maximizes the inner objective over the feasible box by grid search with
/// repeated zooming around the best grid point. Valid for concave inner
/// objectives; `n ≤ 2`.
pub fn grid_gap(p: &ProblemInstance<f64>, x: &[f64], alpha: f64) -> f64 {
    let n = p.n();
    assert!(n <= 2);
    const PTS: usize = 81;
    let c = p.feasible();
    let (mut lo, mut hi) = (c.lower().to_vec(), c.upper().to_vec());
    let mut best = f64::NEG_INFINITY;
    for _ in 0..12 {
        let step: Vec<f64> = (0..n).map(|i| (hi[i] - lo[i]) / (PTS - 1) as f64).collect();
        let mut arg = lo.clone();
        let total = PTS.pow(n as u32);
        for k in 0..total {
            let mut y = vec![0.0; n];
            let mut rest = k;
            for i in 0..n {
                let j = rest % PTS;
                rest /= PTS;
                y[i] = if j == PTS - 1 { hi[i] } else { lo[i] + step[i] * j as f64 };
            }
            let v = inner_objective(p, x, &y, alpha);
            if v > best {
                best = v;
                arg = y;
            }
        }
        for i in 0..n {
            lo[i] = (arg[i] - 3.0 * step[i]).max(c.lower()[i]);
            hi[i] = (arg[i] + 3.0 * step[i]).min(c.upper()[i]);
        }
    }
    best
}

/// Does `K` satisfy `φ_h − K d_h ≤ φ_i − K d_i` for every `i`?
fn beats_all(points: &[SelectionPoint<f64>], h: usize, k: f64) -> bool {
    let own = points[h].value - k * points[h].diameter;
    points.iter().all(|p| own <= p.value - k * p.diameter)
}

/// Candidate slopes: a dense grid on `(0, upper)` together with every
/// pairwise breakpoint, the improvement bounds and the midpoints between
/// consecutive candidates.
fn candidates(points: &[SelectionPoint<f64>], target: f64, upper: f64, grid: usize) -> Vec<f64> {
    let mut c: Vec<f64> = Vec::new();
    let top = if upper.is_finite() { upper } else { 1e8 };
    for j in 1..grid {
        c.push(top * j as f64 / grid as f64);
    }
    for a in points {
        if a.diameter > 0.0 {
            c.push((a.value - target) / a.diameter);
        }
        for b in points {
            if a.diameter != b.diameter {
                c.push((a.value - b.value) / (a.diameter - b.diameter));
            }
        }
    }
    c.retain(|k| k.is_finite() && *k > 0.0 && *k < top);
    c.sort_by(f64::total_cmp);
    c.dedup();
    let mids: Vec<f64> = c.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    c.extend(mids);
    c.push(top * 2.0);
    if !upper.is_finite() {
        c.push(1e12);
    }
    c.retain(|k| *k > 0.0 && *k < upper);
    c
}

/// Brute-force reference for the potentially optimal set.
pub fn oracle_potentially_optimal(points: &[SelectionPoint<f64>], epsilon: f64, grid: usize) -> Vec<usize> {
    let fmin = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let target = fmin - epsilon * fmin.abs();
    let ks = candidates(points, target, f64::INFINITY, grid);
    (0..points.len())
        .filter(|&h| ks.iter().any(|&k| beats_all(points, h, k) && points[h].value - k * points[h].diameter <= target))
        .collect()
}

/// Brute-force reference for the `L̄`-potentially optimal set, including the
/// fallback to the minimizers of `φ_i − (L̄_i/2) d_i`.
pub fn oracle_lbar_potentially_optimal(points: &[SelectionPoint<f64>], epsilon: f64, eta: f64, grid: usize) -> Vec<usize> {
    let fmin = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let target = fmin - epsilon * fmin.abs().max(eta);
    let mut sel: Vec<usize> = (0..points.len())
        .filter(|&h| {
            let k_bar = points[h].lbar.unwrap() / 2.0;
            let ks = candidates(points, target, k_bar, grid);
            let cond_i = ks.iter().any(|&k| beats_all(points, h, k) && points[h].value - k * points[h].diameter <= target);
            cond_i || beats_all(points, h, k_bar)
        })
        .collect();
    if sel.is_empty() {
        let lb: Vec<f64> = points.iter().map(|p| p.value - p.lbar.unwrap() / 2.0 * p.diameter).collect();
        let best = lb.iter().copied().fold(f64::INFINITY, f64::min);
        sel = (0..points.len()).filter(|&i| lb[i] == best).collect();
    }
    sel
}

/// Random selection points: diameters from a few classes, random values and
/// per-rectangle (or uniform) `lbar`.
pub fn random_points(r: &mut ChaCha8Rng, count: usize) -> Vec<SelectionPoint<f64>> {
    let classes: Vec<f64> = (0..r.random_range(1..=6)).map(|k| 3f64.powi(-(k as i32)) * r.random_range(0.5..2.0)).collect();
    let uniform_lbar = r.random_bool(0.5).then(|| 10f64.powf(r.random_range(-1.0..2.0)));
    (0..count)
        .map(|_| SelectionPoint {
            diameter: classes[r.random_range(0..classes.len())],
            value: r.random_range(0.0..5.0),
            lbar: Some(uniform_lbar.unwrap_or_else(|| 10f64.powf(r.random_range(-1.0..2.0)))),
        })
        .collect()
}
