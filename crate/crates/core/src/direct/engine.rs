//! The DIRECT iteration: initialize, select, trisect.

use std::io::Write;
use std::path::Path;

use super::partition::{Grid, Partition, Rectangle};
use super::select::{lower_bound_gap, select_lbar_potentially_optimal, select_potentially_optimal};
use super::{DirectConfig, LbarMode, Variant};
use crate::bounds::LipschitzBounds;
use crate::error::{Error, Result};
use crate::gap::GapFunction;
use crate::problem::{BoxSet, ProblemInstance};
use crate::problem::file::fmt_f64;
use crate::scalar::{dist, Scalar};

/// Objective evaluator; one call is one function evaluation.
pub type Evaluator<'a, T> = Box<dyn FnMut(&[T]) -> Result<T> + 'a>;

/// Lipschitz overestimate of the objective over a sub-box.
pub type BoxBound<'a, T> = Box<dyn Fn(&BoxSet<T>) -> Result<T> + 'a>;

/// One row per iteration, iteration 0 being the initial center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub eval_count: usize,
    pub phi_best: T,
    pub gap_bound: Option<T>,
    pub num_rectangles: usize,
}

/// Outcome of a complete run.
#[derive(Debug, Clone)]
pub struct DirectRun<T> {
    pub partition: Partition<T>,
    pub trace: Vec<TraceRow<T>>,
    /// `(eval_count, best value)` at every strict improvement, starting with the center.
    pub history: Vec<(usize, T)>,
    pub best_x: Vec<T>,
    pub best_phi: T,
    /// Value at the center of the feasible box.
    pub initial_value: T,
    /// `(L̄_h/2) d_h` at termination.
    pub gap_bound: Option<T>,
}

/// A DIRECT run in progress.
pub struct Direct<'a, T: Scalar> {
    cfg: DirectConfig<T>,
    objective: Evaluator<'a, T>,
    box_bound: Option<BoxBound<'a, T>>,
    partition: Partition<T>,
    max_slope: T,
    trace: Vec<TraceRow<T>>,
    history: Vec<(usize, T)>,
    initial_value: T,
    iteration: usize,
}

impl<'a, T: Scalar> Direct<'a, T> {
    /// Evaluates the center of `bounds` and builds the one-rectangle partition.
    /// `box_bound` is required when `cfg.lbar_mode` is `Analytic`.
    pub fn new(
        bounds: BoxSet<T>,
        cfg: DirectConfig<T>,
        mut objective: Evaluator<'a, T>,
        box_bound: Option<BoxBound<'a, T>>,
    ) -> Result<Self> {
        cfg.validate()?;
        if !bounds.is_nondegenerate() {
            return Err(Error::Usage("DIRECT needs a box with positive width in every dimension".into()));
        }
        if cfg.lbar_mode == LbarMode::Analytic && box_bound.is_none() {
            return Err(Error::Usage("analytic lbar requested without a bound provider".into()));
        }
        let grid = Grid::new(bounds);
        let n = grid.dim();
        let mut root = Rectangle::from_cell(&grid, vec![0; n], vec![0; n], T::zero());
        let value = objective(&root.center)?;
        root.center_value = value;
        let partition = Partition {
            best_point: root.center.clone(),
            phi_min: value,
            eval_count: 1,
            rectangles: vec![root],
            grid,
        };
        let mut engine = Self {
            cfg,
            objective,
            box_bound,
            partition,
            max_slope: T::zero(),
            trace: Vec::new(),
            history: vec![(1, value)],
            initial_value: value,
            iteration: 0,
        };
        let lbar = engine.lbar_for(0)?;
        engine.partition.rectangles[0].lbar = Some(lbar);
        engine.push_trace();
        Ok(engine)
    }

    #[inline]
    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    #[inline]
    pub fn config(&self) -> &DirectConfig<T> {
        &self.cfg
    }

    #[inline]
    pub fn trace(&self) -> &[TraceRow<T>] {
        &self.trace
    }

    fn floor(&self, v: T) -> T {
        if v.is_nan() {
            T::epsilon()
        } else {
            v.max(T::epsilon())
        }
    }

    fn lbar_for(&self, h: usize) -> Result<T> {
        match self.cfg.lbar_mode {
            LbarMode::Analytic => {
                let bound = self.box_bound.as_ref().expect("checked in new");
                Ok(self.floor(bound(&self.partition.rectangles[h].as_box())?))
            }
            LbarMode::Constant(v) => Ok(v),
            LbarMode::SlopeEstimate(f) => Ok(self.floor(f * self.max_slope)),
        }
    }

    fn evaluate(&mut self, x: &[T]) -> Result<T> {
        let v = (self.objective)(x)?;
        self.partition.eval_count += 1;
        if v < self.partition.phi_min {
            self.partition.phi_min = v;
            self.partition.best_point = x.to_vec();
            self.history.push((self.partition.eval_count, v));
        }
        Ok(v)
    }

    fn divisible(&self, h: usize) -> bool {
        let max_depth = self.partition.grid.max_depth();
        self.partition.rectangles[h].depth.iter().any(|&d| d < max_depth)
    }

    /// Rectangles chosen by the configured rule that can still be divided.
    pub fn select(&self) -> Vec<usize> {
        let sel = match self.cfg.variant {
            Variant::Direct => self.partition.select_potentially_optimal(self.cfg.epsilon),
            Variant::LbarDirect => self.partition.select_lbar_potentially_optimal(self.cfg.epsilon, self.cfg.eta),
        };
        sel.into_iter().filter(|&h| self.divisible(h)).collect()
    }

    /// Divides rectangle `h` into thirds along each of its longest sides.
    /// Returns `false` if `h` is already at the depth limit everywhere.
    pub fn trisect(&mut self, h: usize) -> Result<bool> {
        if h >= self.partition.len() {
            return Err(Error::Usage(format!("rectangle index {h} out of range")));
        }
        let grid = &self.partition.grid;
        let max_depth = grid.max_depth();
        let rect = &self.partition.rectangles[h];
        let n = grid.dim();
        let splittable: Vec<usize> = (0..n).filter(|&i| rect.depth[i] < max_depth).collect();
        if splittable.is_empty() {
            return Ok(false);
        }
        let longest = splittable.iter().fold(T::zero(), |m, &i| m.max(grid.side(i, rect.depth[i])));
        if !(longest > T::zero()) {
            return Err(Error::Usage(format!("rectangle {h} has zero volume")));
        }
        let dims: Vec<usize> = splittable.into_iter().filter(|&i| grid.side(i, rect.depth[i]) == longest).collect();
        let parent_center = rect.center.clone();
        let parent_value = rect.center_value;
        let (depth, index) = (rect.depth.clone(), rect.index.clone());

        // sample both neighbours along every longest dimension
        let mut samples: Vec<(usize, Vec<T>, T, Vec<T>, T)> = Vec::with_capacity(dims.len());
        for &i in &dims {
            let d = depth[i] + 1;
            let mut left = parent_center.clone();
            left[i] = self.partition.grid.midpoint(i, 3 * index[i], d);
            let mut right = parent_center.clone();
            right[i] = self.partition.grid.midpoint(i, 3 * index[i] + 2, d);
            let fl = self.evaluate(&left)?;
            let fr = self.evaluate(&right)?;
            samples.push((i, left, fl, right, fr));
        }
        if let LbarMode::SlopeEstimate(_) = self.cfg.lbar_mode {
            let slope = |a: &[T], fa: T, b: &[T], fb: T| (fa - fb).abs() / dist(a, b);
            for (_, left, fl, right, fr) in &samples {
                let s = slope(&parent_center, parent_value, left, *fl)
                    .max(slope(&parent_center, parent_value, right, *fr))
                    .max(slope(left, *fl, right, *fr));
                if s.is_finite() {
                    self.max_slope = self.max_slope.max(s);
                }
            }
        }
        samples.sort_by(|a, b| a.2.min(a.4).partial_cmp(&b.2.min(b.4)).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));

        let (mut cur_depth, mut cur_index) = (depth, index);
        let mut new_ids = Vec::with_capacity(2 * samples.len());
        for (i, _, fl, _, fr) in samples {
            cur_depth[i] += 1;
            let k = cur_index[i];
            for (child_k, value) in [(3 * k, fl), (3 * k + 2, fr)] {
                let mut idx = cur_index.clone();
                idx[i] = child_k;
                let child = Rectangle::from_cell(&self.partition.grid, cur_depth.clone(), idx, value);
                self.partition.rectangles.push(child);
                new_ids.push(self.partition.rectangles.len() - 1);
            }
            cur_index[i] = 3 * k + 1;
        }
        self.partition.rectangles[h] = Rectangle::from_cell(&self.partition.grid, cur_depth, cur_index, parent_value);
        new_ids.push(h);

        match self.cfg.lbar_mode {
            LbarMode::SlopeEstimate(_) => {
                let lbar = self.lbar_for(h)?;
                for r in &mut self.partition.rectangles {
                    r.lbar = Some(lbar);
                }
            }
            _ => {
                for id in new_ids {
                    let lbar = self.lbar_for(id)?;
                    self.partition.rectangles[id].lbar = Some(lbar);
                }
            }
        }
        Ok(true)
    }

    fn push_trace(&mut self) {
        self.trace.push(TraceRow {
            iteration: self.iteration,
            eval_count: self.partition.eval_count,
            phi_best: self.partition.phi_min,
            gap_bound: self.partition.lower_bound_gap().map(|(_, g)| g),
            num_rectangles: self.partition.len(),
        });
    }

    /// One select-and-divide iteration. Returns `false` once the budget is
    /// spent or nothing could be divided.
    pub fn step(&mut self) -> Result<bool> {
        if self.partition.eval_count >= self.cfg.budget {
            return Ok(false);
        }
        let mut divided = false;
        for h in self.select() {
            if self.partition.eval_count >= self.cfg.budget {
                break;
            }
            divided |= self.trisect(h)?;
        }
        if divided {
            self.iteration += 1;
            self.push_trace();
        }
        Ok(divided)
    }

    pub fn run(mut self) -> Result<DirectRun<T>> {
        while self.step()? {}
        Ok(self.finish())
    }

    pub fn finish(self) -> DirectRun<T> {
        let gap_bound = self.partition.lower_bound_gap().map(|(_, g)| g);
        DirectRun {
            best_x: self.partition.best_point.clone(),
            best_phi: self.partition.phi_min,
            partition: self.partition,
            trace: self.trace,
            history: self.history,
            initial_value: self.initial_value,
            gap_bound,
        }
    }
}

impl<T: Scalar> Partition<T> {
    pub fn select_potentially_optimal(&self, epsilon: T) -> Vec<usize> {
        select_potentially_optimal(&self.selection_points(), epsilon)
    }

    /// # Panics
    /// If a rectangle has no `lbar`.
    pub fn select_lbar_potentially_optimal(&self, epsilon: T, eta: T) -> Vec<usize> {
        select_lbar_potentially_optimal(&self.selection_points(), epsilon, eta)
    }

    pub fn lower_bound_gap(&self) -> Option<(usize, T)> {
        lower_bound_gap(&self.selection_points())
    }
}

/// Minimizes `φ_α` of `p` over its feasible box.
pub fn run_direct<T: Scalar>(p: &ProblemInstance<T>, cfg: &DirectConfig<T>) -> Result<DirectRun<T>> {
    let gap = GapFunction::new(p, cfg.alpha)?;
    let objective: Evaluator<'_, T> = Box::new(move |x: &[T]| gap.value(x).map(|e| e.value));
    let box_bound: Option<BoxBound<'_, T>> = match cfg.lbar_mode {
        LbarMode::Analytic => {
            let bounds = LipschitzBounds::new(p, cfg.alpha)?;
            Some(Box::new(move |b: &BoxSet<T>| bounds.report(b).map(|r| r.chosen)))
        }
        _ => None,
    };
    Direct::new(p.feasible().clone(), cfg.clone(), objective, box_bound)?.run()
}

/// Writes trace rows as CSV; an absent gap bound is an empty field.
pub fn write_trace<T: Scalar>(rows: &[TraceRow<T>], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["iteration", "eval_count", "phi_best", "gap_bound", "num_rectangles"])?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            r.eval_count.to_string(),
            fmt_f64(r.phi_best.as_f64()),
            r.gap_bound.map(|g| fmt_f64(g.as_f64())).unwrap_or_default(),
            r.num_rectangles.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<trace>"), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::{LbarMode, Variant};
    use crate::linalg::Matrix;

    fn quadratic(target: Vec<f64>) -> Evaluator<'static, f64> {
        Box::new(move |x: &[f64]| Ok(x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum()))
    }

    fn cfg(budget: usize, variant: Variant, lbar: LbarMode<f64>) -> DirectConfig<f64> {
        DirectConfig { budget, variant, lbar_mode: lbar, ..Default::default() }
    }

    #[test]
    fn initialize_single_rectangle() {
        let e = Direct::new(BoxSet::unit(2), cfg(10, Variant::Direct, LbarMode::Constant(3.0)), quadratic(vec![0.2, 0.2]), None)
            .unwrap();
        let p = e.partition();
        assert_eq!(p.len(), 1);
        assert_eq!(p.eval_count, 1);
        assert_eq!(p.rectangles[0].center, vec![0.5, 0.5]);
        assert_eq!(p.rectangles[0].depth, vec![0, 0]);
        assert_eq!(p.rectangles[0].lbar, Some(3.0));
    }

    #[test]
    fn one_dimensional_trisection() {
        let mut e =
            Direct::new(BoxSet::unit(1), cfg(10, Variant::Direct, LbarMode::Constant(1.0)), quadratic(vec![0.9]), None).unwrap();
        assert!(e.trisect(0).unwrap());
        let p = e.partition();
        assert_eq!(p.eval_count, 3);
        let mut cells: Vec<(f64, f64, f64)> = p.rectangles.iter().map(|r| (r.lower[0], r.upper[0], r.center[0])).collect();
        cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let third = 1.0 / 3.0;
        let expect = [(0.0, third, 1.0 / 6.0), (third, 2.0 * third, 0.5), (2.0 * third, 1.0, 5.0 / 6.0)];
        for (c, e) in cells.iter().zip(expect) {
            assert!((c.0 - e.0).abs() < 1e-15 && (c.1 - e.1).abs() < 1e-15 && (c.2 - e.2).abs() < 1e-15);
        }
        assert_eq!(p.check_tiling(), Some(true));
        assert_eq!(p.best_point, vec![5.0 / 6.0]);
    }

    #[test]
    fn better_dimension_is_split_first() {
        // target on the x1 axis side: samples along dimension 1 are better
        let mut e =
            Direct::new(BoxSet::unit(2), cfg(10, Variant::Direct, LbarMode::Constant(1.0)), quadratic(vec![0.5, 0.9]), None)
                .unwrap();
        e.trisect(0).unwrap();
        let p = e.partition();
        assert_eq!(p.len(), 5);
        // the best sample (0.5, 5/6) sits in an uncut strip along dimension 0
        let best = p.rectangles.iter().find(|r| (r.center[1] - 5.0 / 6.0).abs() < 1e-15).unwrap();
        assert_eq!(best.depth, vec![0, 1]);
        assert_eq!(best.lower[0], 0.0);
        assert_eq!(best.upper[0], 1.0);
        // the dimension-0 children are cut in both directions
        let side = p.rectangles.iter().find(|r| (r.center[0] - 1.0 / 6.0).abs() < 1e-15).unwrap();
        assert_eq!(side.depth, vec![1, 1]);
        assert_eq!(p.check_tiling(), Some(true));
    }

    #[test]
    fn budget_one_returns_center() {
        let e = Direct::new(BoxSet::unit(3), cfg(1, Variant::LbarDirect, LbarMode::Constant(1.0)), quadratic(vec![0.1; 3]), None)
            .unwrap();
        let run = e.run().unwrap();
        assert_eq!(run.partition.eval_count, 1);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.best_x, vec![0.5; 3]);
    }

    #[test]
    fn overshoot_is_bounded() {
        for budget in [2, 7, 50, 101] {
            let e = Direct::new(
                BoxSet::unit(3),
                cfg(budget, Variant::Direct, LbarMode::Constant(1.0)),
                quadratic(vec![0.1, 0.7, 0.3]),
                None,
            )
            .unwrap();
            let run = e.run().unwrap();
            assert!(run.partition.eval_count >= budget);
            assert!(run.partition.eval_count < budget + 2 * 3);
            assert_eq!(run.partition.check_tiling(), Some(true));
        }
    }

    #[test]
    fn slope_mode_sets_uniform_lbar() {
        let e = Direct::new(
            BoxSet::unit(2),
            cfg(40, Variant::LbarDirect, LbarMode::SlopeEstimate(2.0)),
            quadratic(vec![0.1, 0.7]),
            None,
        )
        .unwrap();
        let run = e.run().unwrap();
        let l = run.partition.rectangles[0].lbar.unwrap();
        assert!(l > 0.0);
        assert!(run.partition.rectangles.iter().all(|r| r.lbar == Some(l)));
    }

    #[test]
    fn analytic_requires_provider() {
        assert!(Direct::new(BoxSet::unit(1), cfg(5, Variant::Direct, LbarMode::Analytic), quadratic(vec![0.0]), None).is_err());
    }

    #[test]
    fn finds_interior_solution_of_monotone_vi() {
        let sol = [0.3, -0.4];
        let p = ProblemInstance::affine_vi(
            "shift",
            Matrix::identity(2),
            sol.iter().map(|v| -v).collect(),
            BoxSet::new(vec![-1.0, -1.0], vec![1.0, 2.0]).unwrap(),
        )
        .unwrap();
        let run = run_direct(&p, &DirectConfig { budget: 500, ..Default::default() }).unwrap();
        assert!(run.best_phi < 1e-5, "{}", run.best_phi);
        assert!(dist(&run.best_x, &sol) < 1e-3);
        let again = run_direct(&p, &DirectConfig { budget: 500, ..Default::default() }).unwrap();
        assert_eq!(run.trace, again.trace);
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let rows = [TraceRow { iteration: 0, eval_count: 1, phi_best: 0.5f64, gap_bound: None, num_rectangles: 1 }];
        let mut buf = Vec::new();
        write_trace(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iteration,eval_count,phi_best,gap_bound,num_rectangles\n0,1,5.0000000000000000e-1,,1\n");
    }
}
