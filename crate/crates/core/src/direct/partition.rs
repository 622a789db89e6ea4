//! Hyperrectangle bookkeeping.
//!
//! Each rectangle is a cell of a per-dimension ternary grid: along
//! dimension `i` it covers `[k_i, k_i + 1] / 3^{d_i}` of the feasible box,
//! where `d_i` is the number of trisections applied along `i`. Bounds,
//! centers and diameters are derived from the integers `(k_i, d_i)`, so
//! equal depth patterns give bit-identical diameters and tiling can be
//! verified exactly.

use crate::problem::BoxSet;
use crate::scalar::Scalar;

/// Deepest trisection level at which grid coordinates are still exact in `T`.
pub fn max_depth<T: Scalar>() -> u32 {
    // need 2·3^d < 2^mantissa so (2k + 1) / (2·3^d) is formed exactly
    let mut d = 0u32;
    let mut p = 2.0f64;
    while p * 3.0 * T::epsilon().as_f64() < 1.0 && d < 38 {
        p *= 3.0;
        d += 1;
    }
    d
}

/// The feasible box together with derived per-dimension constants.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    bounds: BoxSet<T>,
    widths: Vec<T>,
    /// Dimensions with bit-identical widths share a group id.
    width_group: Vec<usize>,
    max_depth: u32,
}

impl<T: Scalar> Grid<T> {
    pub fn new(bounds: BoxSet<T>) -> Self {
        let widths = bounds.widths();
        let mut reps: Vec<T> = Vec::new();
        let width_group = widths
            .iter()
            .map(|w| match reps.iter().position(|r| r == w) {
                Some(g) => g,
                None => {
                    reps.push(*w);
                    reps.len() - 1
                }
            })
            .collect();
        Self { bounds, widths, width_group, max_depth: max_depth::<T>() }
    }

    #[inline]
    pub fn bounds(&self) -> &BoxSet<T> {
        &self.bounds
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.widths.len()
    }

    #[inline]
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    #[inline]
    fn pow3(d: u32) -> T {
        T::lit(3f64.powi(d as i32))
    }

    /// Side length along `i` at depth `d`.
    #[inline]
    pub fn side(&self, i: usize, d: u32) -> T {
        self.widths[i] / Self::pow3(d)
    }

    /// Grid coordinate `L_i + W_i · k / 3^d`.
    pub fn coordinate(&self, i: usize, k: u64, d: u32) -> T {
        let (l, u) = (self.bounds.lower()[i], self.bounds.upper()[i]);
        if k == 0 {
            return l;
        }
        if k == 3u64.pow(d) {
            return u;
        }
        (l + self.widths[i] * (T::lit(k as f64) / Self::pow3(d))).min(u)
    }

    /// Cell midpoint `L_i + W_i · (2k + 1) / (2·3^d)`.
    pub fn midpoint(&self, i: usize, k: u64, d: u32) -> T {
        let frac = T::lit((2 * k + 1) as f64) / (T::lit(2.0) * Self::pow3(d));
        self.bounds.lower()[i] + self.widths[i] * frac
    }

    /// Canonical diameter-class key: per width group, the sorted depths.
    pub fn class_key(&self, depth: &[u32]) -> Vec<(usize, u32)> {
        let mut key: Vec<(usize, u32)> = depth.iter().enumerate().map(|(i, &d)| (self.width_group[i], d)).collect();
        key.sort_unstable();
        key
    }

    /// `‖u − l‖` of a cell, computed from the canonical key so that equal
    /// keys give identical values.
    pub fn diameter(&self, depth: &[u32]) -> T {
        let key = self.class_key(depth);
        let mut group_width = vec![T::zero(); self.dim()];
        for (i, &g) in self.width_group.iter().enumerate() {
            group_width[g] = self.widths[i];
        }
        let sq: T = key
            .iter()
            .map(|&(g, d)| {
                let s = group_width[g] / Self::pow3(d);
                s * s
            })
            .sum();
        sq.sqrt()
    }
}

/// One element of the partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub center: Vec<T>,
    pub center_value: T,
    /// Trisections applied per dimension.
    pub depth: Vec<u32>,
    /// Cell index per dimension at that depth.
    pub index: Vec<u64>,
    pub diameter: T,
    /// Local Lipschitz overestimate over this rectangle.
    pub lbar: Option<T>,
}

impl<T: Scalar> Rectangle<T> {
    pub(crate) fn from_cell(grid: &Grid<T>, depth: Vec<u32>, index: Vec<u64>, center_value: T) -> Self {
        let n = grid.dim();
        let lower = (0..n).map(|i| grid.coordinate(i, index[i], depth[i])).collect();
        let upper = (0..n).map(|i| grid.coordinate(i, index[i] + 1, depth[i])).collect();
        let center = (0..n).map(|i| grid.midpoint(i, index[i], depth[i])).collect();
        let diameter = grid.diameter(&depth);
        Self { lower, upper, center, center_value, depth, index, diameter, lbar: None }
    }

    pub fn as_box(&self) -> BoxSet<T> {
        BoxSet::new(self.lower.clone(), self.upper.clone()).expect("cell bounds are ordered")
    }

    pub fn volume(&self) -> T {
        self.lower.iter().zip(&self.upper).fold(T::one(), |v, (&l, &u)| v * (u - l))
    }
}

/// The current partition of the feasible box.
#[derive(Debug, Clone)]
pub struct Partition<T> {
    pub(crate) grid: Grid<T>,
    pub rectangles: Vec<Rectangle<T>>,
    pub eval_count: usize,
    pub phi_min: T,
    pub best_point: Vec<T>,
}

impl<T: Scalar> Partition<T> {
    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    /// Points used by the selection rules.
    pub fn selection_points(&self) -> Vec<super::SelectionPoint<T>> {
        self.rectangles
            .iter()
            .map(|r| super::SelectionPoint { diameter: r.diameter, value: r.center_value, lbar: r.lbar })
            .collect()
    }

    pub fn max_diameter(&self) -> T {
        self.rectangles.iter().fold(T::zero(), |m, r| m.max(r.diameter))
    }

    /// Exact tiling check in integer arithmetic: cells are pairwise disjoint
    /// and their volumes add up to the whole grid. `None` if the common
    /// denominator overflows.
    pub fn check_tiling(&self) -> Option<bool> {
        let n = self.grid.dim();
        let dmax: Vec<u32> = (0..n).map(|i| self.rectangles.iter().map(|r| r.depth[i]).max().unwrap_or(0)).collect();
        let scale: Vec<u128> = dmax.iter().map(|&d| 3u128.checked_pow(d)).collect::<Option<_>>()?;
        let total = scale.iter().try_fold(1u128, |a, &s| a.checked_mul(s))?;
        // interval of each cell in units of 3^{-dmax_i}
        let span = |r: &Rectangle<T>, i: usize| {
            let unit = 3u128.pow(dmax[i] - r.depth[i]);
            (r.index[i] as u128 * unit, (r.index[i] as u128 + 1) * unit)
        };
        let mut volume = 0u128;
        for r in &self.rectangles {
            let v = (0..n).try_fold(1u128, |a, i| {
                let (lo, hi) = span(r, i);
                a.checked_mul(hi - lo)
            })?;
            volume = volume.checked_add(v)?;
        }
        if volume != total {
            return Some(false);
        }
        for (a, ra) in self.rectangles.iter().enumerate() {
            for rb in &self.rectangles[a + 1..] {
                let overlap = (0..n).all(|i| {
                    let (la, ha) = span(ra, i);
                    let (lb, hb) = span(rb, i);
                    la < hb && lb < ha
                });
                if overlap {
                    return Some(false);
                }
            }
        }
        Some(true)
    }
}
