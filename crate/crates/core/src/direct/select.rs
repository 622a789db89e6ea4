//! Selection of rectangles to divide.
//!
//! Both rules are evaluated exactly on the points `(d_i, φ_i)`, `d_i` the
//! rectangle diameter and `φ_i` its center value. Writing `K = L/2`, the
//! inequality `φ_h − K d_h ≤ φ_i − K d_i` is a lower bound on `K` when
//! `d_i < d_h`, an upper bound when `d_i > d_h`, and `φ_h ≤ φ_i` when the
//! diameters agree, so each rule reduces to checking that an interval of
//! admissible `K` is nonempty. Only minima of a diameter class can pass;
//! every rectangle tied at a class minimum is selected.

use crate::scalar::Scalar;

/// Diameter, center value and (optional) Lipschitz overestimate of one rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPoint<T> {
    pub diameter: T,
    pub value: T,
    pub lbar: Option<T>,
}

struct Class<T> {
    diameter: T,
    min_value: T,
    members: Vec<usize>,
}

/// Distinct diameters ascending, with the class minimum and its tied members.
fn classes<T: Scalar>(points: &[SelectionPoint<T>]) -> Vec<Class<T>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .diameter
            .partial_cmp(&points[b].diameter)
            .unwrap()
            .then(points[a].value.partial_cmp(&points[b].value).unwrap())
            .then(a.cmp(&b))
    });
    let mut out: Vec<Class<T>> = Vec::new();
    for i in order {
        let p = points[i];
        match out.last_mut() {
            Some(c) if c.diameter == p.diameter => {
                if p.value == c.min_value {
                    c.members.push(i);
                }
            }
            _ => out.push(Class { diameter: p.diameter, min_value: p.value, members: vec![i] }),
        }
    }
    out
}

/// Closed interval `[lo, hi]` of `K` satisfying the comparison inequalities
/// for class `j` against every other class.
fn comparison_interval<T: Scalar>(cls: &[Class<T>], j: usize) -> (T, T) {
    let (dj, mj) = (cls[j].diameter, cls[j].min_value);
    let lo = cls[..j].iter().fold(T::neg_infinity(), |lo, c| lo.max((mj - c.min_value) / (dj - c.diameter)));
    let hi = cls[j + 1..].iter().fold(T::infinity(), |hi, c| hi.min((c.min_value - mj) / (c.diameter - dj)));
    (lo, hi)
}

/// Lower bound on `K` from `φ_h − K d_h ≤ target`; `None` if infeasible for every `K`.
fn improvement_bound<T: Scalar>(d: T, value: T, target: T) -> Option<T> {
    if d > T::zero() {
        Some((value - target) / d)
    } else if value <= target {
        Some(T::neg_infinity())
    } else {
        None
    }
}

fn phi_min<T: Scalar>(points: &[SelectionPoint<T>]) -> T {
    points.iter().fold(T::infinity(), |m, p| m.min(p.value))
}

/// Potentially optimal rectangles: some `L > 0` makes `h` minimize
/// `φ_i − (L/2) d_i` and `φ_h − (L/2) d_h ≤ φ_min − ε|φ_min|`.
pub fn select_potentially_optimal<T: Scalar>(points: &[SelectionPoint<T>], epsilon: T) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let fmin = phi_min(points);
    let target = fmin - epsilon * fmin.abs();
    let cls = classes(points);
    let mut out = Vec::new();
    for j in 0..cls.len() {
        let (lo, hi) = comparison_interval(&cls, j);
        let Some(eps_lo) = improvement_bound(cls[j].diameter, cls[j].min_value, target) else { continue };
        let lo = lo.max(eps_lo);
        if lo <= hi && hi > T::zero() {
            out.extend_from_slice(&cls[j].members);
        }
    }
    out.sort_unstable();
    out
}

/// `L̄`-potentially optimal rectangles. `h` qualifies if
///
/// (i) some `L̃ ∈ (0, L̄_h)` makes `h` minimize `φ_i − (L̃/2) d_i` with
/// `φ_h − (L̃/2) d_h ≤ φ_min − ε max{|φ_min|, η}`, or
///
/// (ii) `h` minimizes `φ_i − (L̄_h/2) d_i`.
///
/// If no rectangle qualifies (possible only with non-uniform `L̄`), the
/// minimizers of `φ_i − (L̄_i/2) d_i` are returned.
///
/// # Panics
/// If a rectangle has no `lbar`.
pub fn select_lbar_potentially_optimal<T: Scalar>(points: &[SelectionPoint<T>], epsilon: T, eta: T) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let lbar = |i: usize| points[i].lbar.expect("lbar set on every rectangle");
    let fmin = phi_min(points);
    let target = fmin - epsilon * fmin.abs().max(eta);
    let cls = classes(points);
    let mut out = Vec::new();
    for j in 0..cls.len() {
        let (lo, hi) = comparison_interval(&cls, j);
        let eps_lo = improvement_bound(cls[j].diameter, cls[j].min_value, target);
        for &h in &cls[j].members {
            let k_bar = lbar(h) / T::lit(2.0);
            let cond_i = eps_lo.is_some_and(|e| {
                let lo = lo.max(e);
                lo <= hi && hi > T::zero() && lo < k_bar && k_bar > T::zero()
            });
            let cond_ii = || {
                let own = points[h].value - k_bar * points[h].diameter;
                cls.iter().all(|c| own <= c.min_value - k_bar * c.diameter)
            };
            if cond_i || cond_ii() {
                out.push(h);
            }
        }
    }
    if out.is_empty() {
        out = lower_bound_minimizers(points);
    }
    out.sort_unstable();
    out
}

fn lower_bound_minimizers<T: Scalar>(points: &[SelectionPoint<T>]) -> Vec<usize> {
    let lb: Vec<T> = points
        .iter()
        .map(|p| p.value - p.lbar.expect("lbar set on every rectangle") / T::lit(2.0) * p.diameter)
        .collect();
    let best = lb.iter().fold(T::infinity(), |m, &v| m.min(v));
    (0..points.len()).filter(|&i| lb[i] == best).collect()
}

/// Index minimizing `φ_i − (L̄_i/2) d_i` and the optimality gap `(L̄_h/2) d_h`.
/// `None` if any rectangle lacks `lbar` or the set is empty.
pub fn lower_bound_gap<T: Scalar>(points: &[SelectionPoint<T>]) -> Option<(usize, T)> {
    let mut best: Option<(usize, T, T)> = None;
    for (i, p) in points.iter().enumerate() {
        let half = p.lbar? / T::lit(2.0) * p.diameter;
        let lb = p.value - half;
        if best.is_none_or(|(_, b, _)| lb < b) {
            best = Some((i, lb, half));
        }
    }
    best.map(|(i, _, gap)| (i, gap))
}
