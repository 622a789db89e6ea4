mod common;

use std::path::Path;

use common::*;
use eqdirect::bench::{data_profile, evals_to_solve, performance_profile, SolveTime};
use eqdirect::direct::{
    lower_bound_gap, select_lbar_potentially_optimal, select_potentially_optimal, Direct, DirectConfig, LbarMode,
    SelectionPoint, Variant,
};
use eqdirect::driver::{evals_to_gaps, solve, SolveOptions};
use eqdirect::gap::{gap_value, GapFunction};
use eqdirect::gen::{gen_affine_vi, gen_trig_vi};
use eqdirect::local::{coordinate_search, LocalSearchConfig};
use eqdirect::problem::{parse_problem, write_problem, BoxSet, ProblemClass};
use proptest::prelude::*;
use rand::Rng;

fn class_of(k: u8) -> ProblemClass {
    [ProblemClass::AffineVi, ProblemClass::TrigVi, ProblemClass::AffineEp][k as usize % 3]
}

fn points_strategy() -> impl Strategy<Value = Vec<SelectionPoint<f64>>> {
    prop::collection::vec((0usize..5, 0.0..5.0f64, -1.0..2.0f64), 1..25).prop_map(|v| {
        v.into_iter()
            .map(|(c, value, l)| SelectionPoint { diameter: 3f64.powi(-(c as i32)), value, lbar: Some(10f64.powf(l)) })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_is_nonnegative(seed in any::<u64>(), k in 0u8..3, n in 1usize..6, alpha in 0.1..3.0f64) {
        let mut r = rng(seed);
        let p = random_problem(&mut r, class_of(k), n);
        let x = random_point(&mut r, p.feasible());
        let v = gap_value(&p, &x, alpha, 1e-10).unwrap().value;
        prop_assert!(v >= -1e-12, "{v}");
    }

    #[test]
    fn maximizer_is_feasible_and_attains_value(seed in any::<u64>(), k in 0u8..3, n in 1usize..6) {
        let mut r = rng(seed);
        let p = random_problem(&mut r, class_of(k), n);
        let x = random_point(&mut r, p.feasible());
        let e = gap_value(&p, &x, 1.0, 1e-12).unwrap();
        prop_assert!(p.feasible().contains(&e.maximizer));
        let direct = inner_objective(&p, &x, &e.maximizer, 1.0);
        prop_assert!((direct - e.value).abs() <= 1e-9 * (1.0 + e.value.abs()));
    }

    #[test]
    fn random_trisections_tile_the_box(seed in any::<u64>(), n in 1usize..5, steps in 1usize..40) {
        let mut r = rng(seed);
        let b = random_box(&mut r, n);
        let shift: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let f = move |x: &[f64]| -> eqdirect::Result<f64> {
            Ok(x.iter().zip(&shift).map(|(a, s)| (3.0 * a + s).sin() + a * a).sum())
        };
        let cfg = DirectConfig { lbar_mode: LbarMode::Constant(5.0), budget: 10_000, ..Default::default() };
        let mut d = Direct::new(b.clone(), cfg, Box::new(f), None).unwrap();
        for _ in 0..steps {
            let h = r.random_range(0..d.partition().len());
            d.trisect(h).unwrap();
        }
        let part = d.partition();
        prop_assert_eq!(part.check_tiling(), Some(true));
        let min = part.rectangles.iter().map(|r| r.center_value).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(part.phi_min, min);
        prop_assert_eq!(part.eval_count, part.len());
        for rect in &part.rectangles {
            prop_assert!(rect.as_box().is_subset_of(&b));
            prop_assert!(rect.as_box().contains(&rect.center));
        }
    }

    #[test]
    fn selectors_are_nonempty(pts in points_strategy(), eps in 0.0..0.1f64) {
        let a = select_potentially_optimal(&pts, eps);
        prop_assert!(!a.is_empty());
        // the lowest value in the largest class always qualifies
        let dmax = pts.iter().map(|p| p.diameter).fold(0.0, f64::max);
        let best = (0..pts.len()).filter(|&i| pts[i].diameter == dmax).min_by(|&i, &j| pts[i].value.total_cmp(&pts[j].value)).unwrap();
        prop_assert!(a.iter().any(|&i| pts[i].diameter == dmax && pts[i].value == pts[best].value));
        let b = select_lbar_potentially_optimal(&pts, eps, 1e-4);
        prop_assert!(!b.is_empty());
        prop_assert!(b.iter().all(|&i| i < pts.len()));
    }

    #[test]
    fn uniform_lbar_selects_the_lowest_bound(pts in points_strategy(), lbar in 0.01..1e3f64) {
        let pts: Vec<_> = pts.into_iter().map(|p| SelectionPoint { lbar: Some(lbar), ..p }).collect();
        let (h, _) = lower_bound_gap(&pts).unwrap();
        let sel = select_lbar_potentially_optimal(&pts, 1e-4, 1e-4);
        let lb = |i: usize| pts[i].value - lbar / 2.0 * pts[i].diameter;
        prop_assert!(sel.iter().any(|&i| lb(i) == lb(h)));
    }

    #[test]
    fn large_lbar_keeps_the_largest_class(pts in points_strategy()) {
        // with L̄ far above every slope, condition (ii) holds for the best rectangle of the largest class
        let pts: Vec<_> = pts.into_iter().map(|p| SelectionPoint { lbar: Some(1e9), ..p }).collect();
        let plain = select_potentially_optimal(&pts, 1e-4);
        let lbar = select_lbar_potentially_optimal(&pts, 1e-4, 1e-4);
        let dmax = pts.iter().map(|p| p.diameter).fold(0.0, f64::max);
        let top = plain.iter().copied().filter(|&i| pts[i].diameter == dmax).collect::<Vec<_>>();
        prop_assert!(top.iter().all(|i| lbar.contains(i)));
    }

    #[test]
    fn local_search_is_monotone_and_feasible(seed in any::<u64>(), n in 1usize..6, budget in 1usize..120) {
        let mut r = rng(seed);
        let b = random_box(&mut r, n);
        let c: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..4.0)).collect();
        let x0 = random_point(&mut r, &b);
        let mut calls = 0usize;
        let mut outside = false;
        let res = {
            let mut f = |x: &[f64]| -> eqdirect::Result<f64> {
                calls += 1;
                outside |= !b.contains(x);
                Ok(x.iter().zip(&c).map(|(a, t)| (a - t).powi(2) + (2.0 * a).cos()).sum())
            };
            let cfg = LocalSearchConfig { budget, ..Default::default() };
            coordinate_search(&mut f, &b, &x0, None, &cfg).unwrap()
        };
        prop_assert!(!outside);
        prop_assert_eq!(calls, res.evals_used);
        prop_assert!(res.evals_used <= budget);
        prop_assert!(b.contains(&res.x));
        prop_assert!(res.history.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1));
        if let Some(last) = res.history.last() {
            prop_assert_eq!(last.1, res.value);
        }
    }

    #[test]
    fn evals_to_gaps_is_monotone(hist in prop::collection::vec(0.0..10.0f64, 1..30), gates in prop::collection::vec(-1.0..10.0f64, 1..6)) {
        let mut best = f64::INFINITY;
        let history: Vec<(usize, f64)> = hist.iter().enumerate().filter_map(|(i, &v)| {
            (v < best).then(|| { best = v; (i + 1, v) })
        }).collect();
        let mut gates = gates;
        gates.sort_by(|a, b| b.total_cmp(a));
        let e = evals_to_gaps(&history, &gates);
        for w in e.windows(2) {
            match (w[0], w[1]) {
                (Some(a), Some(b)) => prop_assert!(a <= b),
                (None, b) => prop_assert!(b.is_none()),
                _ => {}
            }
        }
    }

    #[test]
    fn profiles_are_monotone_fractions(costs in prop::collection::vec((1usize..4, prop::option::of(1usize..200), prop::option::of(1usize..200)), 1..30)) {
        let times: Vec<SolveTime> = costs.iter().enumerate().flat_map(|(i, (n, a, b))| {
            [(Variant::Direct, *a), (Variant::LbarDirect, *b)].map(|(v, e)| SolveTime { problem_id: format!("p{i:03}"), variant: v, n: *n, evals: e })
        }).collect();
        let total = costs.len() as f64;
        for profile in [performance_profile(&times).unwrap(), data_profile(&times).unwrap()] {
            if profile.warning.is_some() {
                prop_assert!(costs.iter().all(|c| c.1.is_none() && c.2.is_none()));
                continue;
            }
            for curve in &profile.curves {
                prop_assert!(curve.points.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
                prop_assert!(curve.points.iter().all(|p| (0.0..=1.0).contains(&p.1)));
                let solved = times.iter().filter(|t| t.variant == curve.variant && t.evals.is_some()).count() as f64;
                prop_assert_eq!(curve.points.last().unwrap().1, solved / total);
            }
        }
    }

    #[test]
    fn problem_files_round_trip(seed in any::<u64>(), k in 0u8..3, n in 1usize..5) {
        let mut r = rng(seed);
        let p = random_problem(&mut r, class_of(k), n);
        let back = parse_problem::<f64>(&write_problem(&p), Path::new("<mem>")).unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solve_history_is_monotone(seed in any::<u64>(), k in 0u8..3, n in 1usize..4, ldirect in any::<bool>()) {
        let mut r = rng(seed);
        let p = random_problem(&mut r, class_of(k), n);
        let opts = SolveOptions {
            variant: if ldirect { Variant::LbarDirect } else { Variant::Direct },
            global_budget: 60,
            local_budget: 30,
            ..Default::default()
        };
        let res = solve(&p, &opts).unwrap();
        prop_assert!(res.history.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 < w[0].1));
        prop_assert_eq!(res.history.last().unwrap().1, res.best_phi);
        prop_assert_eq!(res.history[0], (1, res.initial_value));
        prop_assert!(res.evals_used <= 60 + 2 * n + 30);
        prop_assert!(p.feasible().contains(&res.best_x));
        let direct = GapFunction::new(&p, 1.0).unwrap().value(&res.best_x).unwrap().value;
        prop_assert!((direct - res.best_phi).abs() <= 1e-12 * (1.0 + direct.abs()));
        if let Some(gb) = res.gap_bound {
            prop_assert!(gb >= 0.0);
        }
        prop_assert_eq!(evals_to_solve(&res.history, res.initial_value, 1.0), Some(1));
    }
}

#[test]
fn generated_entries_stay_in_range() {
    for idx in 0..200 {
        for p in [gen_affine_vi(4, 9, idx), gen_trig_vi(4, 9, idx)] {
            assert!(p.p().as_slice().iter().all(|v| (0.0..=3.0).contains(v)));
            assert!(p.r().iter().all(|v| (-2.0..=2.0).contains(v)));
            assert!(p.feasible().lower().iter().all(|v| (-2.0..=0.0).contains(v)));
            assert!(p.feasible().upper().iter().all(|v| (1.0..=3.0).contains(v)));
            if let Some((w, v)) = p.trig_terms() {
                assert!(w.iter().all(|x| *x > 0.0 && *x <= 4.0));
                assert!(v.iter().all(|x| *x > 0.0 && *x <= 2.0));
            }
        }
    }
}

#[test]
fn amplitude_mean_is_two() {
    // U(0, 4]: mean 2, standard deviation 4/√12
    let draws: Vec<f64> = (0..10_000).flat_map(|i| gen_trig_vi(10, 77, i).trig_terms().unwrap().0.to_vec()).collect();
    assert_eq!(draws.len(), 100_000);
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let se = 4.0 / 12f64.sqrt() / (draws.len() as f64).sqrt();
    assert!((mean - 2.0).abs() <= 3.0 * se, "mean {mean}");
}

#[test]
fn generators_are_deterministic_per_stream() {
    assert_eq!(gen_trig_vi(3, 5, 7), gen_trig_vi(3, 5, 7));
    assert_ne!(gen_trig_vi(3, 5, 7).p(), gen_trig_vi(3, 5, 8).p());
    assert_ne!(gen_affine_vi(3, 5, 7).p(), gen_affine_vi(3, 6, 7).p());
}

#[test]
fn unit_box_gap_of_constant_operator() {
    // F ≡ c on [0,1]: the maximizer is proj(x − c) and φ follows in closed form.
    let b = BoxSet::<f64>::unit(1);
    let p = eqdirect::problem::ProblemInstance::affine_vi("c", eqdirect::linalg::Matrix::zeros(1, 1), vec![0.25], b).unwrap();
    let e = gap_value(&p, &[0.5], 1.0, 1e-12).unwrap();
    assert!((e.maximizer[0] - 0.25).abs() < 1e-15);
    assert!((e.value - (0.25 * 0.25 - 0.5 * 0.0625)).abs() < 1e-15);
}
