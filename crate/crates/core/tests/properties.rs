use std::sync::Arc;

use anisodnl::analysis::*;
use anisodnl::discretization::{divergence, face_diff_power, series_lp_norm, FaceField, Grid, ScalarField, TimeSeries};
use anisodnl::model::{BoxDomain, Exponents};
use anisodnl::presets::{ordered_pair, preset};
use anisodnl::solver::{solve_problem, Mode, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exponents(n: usize) -> impl Strategy<Value = Exponents> {
    (prop::collection::vec(1.1f64..6.0, n), prop::collection::vec(1.0f64..4.0, n))
        .prop_map(|(p, m)| Exponents::new(p, m).unwrap())
}

fn series(frames: usize) -> impl Strategy<Value = TimeSeries> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 16), frames + 1).prop_map(move |values| {
        let grid = Arc::new(Grid::new(&BoxDomain::unit(2), vec![4, 4]).unwrap());
        let times: Vec<f64> = (0..=frames).map(|i| i as f64 / frames as f64).collect();
        TimeSeries::from_values(grid, &times, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bar_identity(e in (1usize..5).prop_flat_map(exponents)) {
        let n = e.dim() as f64;
        let inv: f64 = e.p().iter().map(|p| 1.0 / p).sum();
        prop_assert!((n / e.bar().p_bar - inv).abs() <= 1e-14 * inv);
    }

    #[test]
    fn closeness_matches_product_form(e in (1usize..4).prop_flat_map(exponents)) {
        let m = e.m_min();
        let product_form = e.p().iter().zip(e.m()).all(|(p, mj)| (mj - m) * (p - 1.0) - m < 0.0);
        prop_assert_eq!(e.satisfies_closeness(), product_form);
    }

    #[test]
    fn affine_face_differences_are_exact(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, n in 3usize..12) {
        let grid = Arc::new(Grid::new(&BoxDomain::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap(), vec![n, n + 1]).unwrap());
        let u = ScalarField::from_fn(grid.clone(), 0.0, |x| a * x[0] + b * x[1] + c);
        for (axis, slope) in [(0, a), (1, b)] {
            let d = face_diff_power(&u, 1.0, axis).unwrap();
            for f in grid.face_nodes(axis) {
                prop_assert!((d.get(f) - slope).abs() <= 1e-12 * (1.0 + slope.abs()));
            }
        }
    }

    #[test]
    fn constant_flux_has_zero_divergence(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, n in 3usize..10) {
        let grid = Arc::new(Grid::new(&BoxDomain::unit(2), vec![n, n + 2]).unwrap());
        let fluxes = [FaceField::from_fn(grid.clone(), 0, |_| c0), FaceField::from_fn(grid.clone(), 1, |_| c1)];
        let div = divergence(&fluxes).unwrap();
        for flat in 0..grid.len() {
            if !grid.is_boundary(flat) {
                prop_assert!(div.values()[flat].abs() <= 1e-12 * (1.0 + c0.abs() + c1.abs()) * n as f64);
            }
        }
    }

    #[test]
    fn mollifiers_contract(s in series(12), steps in 1usize..6, p_bar in 1.1f64..5.0) {
        let h = steps as f64 / 12.0;
        for p in [1.0, 2.0, p_bar] {
            let base = series_lp_norm(&s, p) * (1.0 + 1e-12);
            for reversed in [false, true] {
                prop_assert!(series_lp_norm(&steklov(&s, h, reversed).unwrap(), p) <= base);
                prop_assert!(series_lp_norm(&exp_mollify(&s, h, reversed).unwrap(), p) <= base);
            }
        }
    }

    #[test]
    fn steklov_difference_quotient(s in series(8), t in 0.0f64..0.5) {
        // exact on each piece of the piecewise-linear series: the derivative of
        // the average is the difference quotient of the endpoints
        let h = 0.25;
        let eps = 1e-5;
        let (a, b) = (steklov_at(&s, h, false, t + eps).unwrap(), steklov_at(&s, h, false, t).unwrap());
        let (v0, v1) = (interpolate(&s, t), interpolate(&s, t + h));
        let (w0, w1) = (interpolate(&s, t + eps), interpolate(&s, t + h + eps));
        for i in 0..a.len() {
            // trapezoid in the window [t, t + eps] is exact up to the kink count
            let exact = 0.5 * ((v1[i] - v0[i]) + (w1[i] - w0[i])) / h;
            prop_assert!(((a[i] - b[i]) / eps - exact).abs() < 1e-6 * (1.0 + exact.abs()) + 1e-3);
        }
    }

    #[test]
    fn sandwich_with_calibrated_constant(u in 0.0f64..10.0, v in 0.0f64..10.0, mi in 0usize..4) {
        let m = [1.0, 1.5, 2.0, 3.0][mi];
        let c = b_sandwich_constant(m);
        let b = b_quantity(u, v, m).unwrap();
        let r = b_reference(u, v, m);
        prop_assert!(r / c <= b * (1.0 + 1e-12) + 1e-300 && b <= c * r * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn power_inequality_with_calibrated_constant(a in -10.0f64..10.0, b in -10.0f64..10.0, gi in 0usize..3) {
        let gamma = [1.5, 2.0, 3.0][gi];
        let phi = |s: f64| s.abs().powf(gamma - 1.0) * s;
        prop_assert!((a - b).abs().powf(gamma) <= power_inequality_constant(gamma) * (phi(a) - phi(b)).abs() * (1.0 + 1e-12));
    }

    #[test]
    fn geometric_iteration_below_threshold_converges(c in 0.1f64..10.0, b in 1.1f64..8.0, delta in 0.05f64..1.0, frac in 0.01f64..0.95) {
        let probe = fast_geometric_iterate(c, b, delta, 0.0, 1).unwrap();
        let it = fast_geometric_iterate(c, b, delta, frac * probe.threshold, 4000).unwrap();
        prop_assert!(it.converged);
        prop_assert!(it.sequence.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn constant_states_are_preserved(c in 0.05f64..3.0, which in 0usize..4, k in 1u32..10) {
        let name = ["porous", "orthotropic", "anisotropic", "manufactured-1d"][which];
        let spec = preset(name).unwrap().constant_data(c).build().unwrap();
        let n = if spec.dim() == 1 { 17 } else { 9 };
        let grid = Arc::new(Grid::new(&spec.domain, vec![n; spec.dim()]).unwrap());
        for mode in [Mode::Direct, Mode::Truncated(k)] {
            let cfg = SolverConfig::new(spec.horizon / 6.0, mode);
            let (s, _) = solve_problem(&spec, grid.clone(), &cfg).unwrap();
            let target = c + mode.shift();
            for f in s.frames() {
                prop_assert!(f.values().iter().all(|v| (v - target).abs() <= cfg.newton_tol));
            }
        }
    }

    #[test]
    fn ordered_data_give_ordered_solutions(seed in 0u64..1000, which in 0usize..4) {
        let name = ["porous", "orthotropic", "anisotropic", "manufactured"][which];
        let base = preset(name).unwrap();
        let (lo, hi) = ordered_pair(&base, &mut ChaCha8Rng::seed_from_u64(seed));
        let (slo, shi) = (lo.build().unwrap(), hi.build().unwrap());
        let grid = Arc::new(Grid::new(&slo.domain, vec![9, 9]).unwrap());
        let cfg = SolverConfig::new(slo.horizon / 8.0, Mode::Direct);
        let (u, _) = solve_problem(&slo, grid.clone(), &cfg).unwrap();
        let (v, _) = solve_problem(&shi, grid, &cfg).unwrap();
        let rep = comparison_check(&u, &v, &slo.source, &shi.source, 0.0, 10.0 * cfg.newton_tol).unwrap();
        let tol = cfg.ordering_tol(slo.horizon);
        prop_assert!(rep.violation <= tol && rep.max_pointwise_excess <= tol);
    }

    #[test]
    fn level_recursion_holds_for_k_runs(k in 1u32..12, which in 0usize..3) {
        let name = ["porous", "anisotropic", "manufactured"][which];
        let spec = preset(name).unwrap().build().unwrap();
        let grid = Arc::new(Grid::new(&spec.domain, vec![9, 9]).unwrap());
        let cfg = SolverConfig::new(spec.horizon / 8.0, Mode::Truncated(k));
        let (s, _) = solve_problem(&spec, grid.clone(), &cfg).unwrap();
        let dg = degiorgi_constants(&spec, &grid, 8, 1.0).unwrap();
        let lv = measure_levels(&s, dg.m_level, dg.m, dg.q_bar, 10);
        prop_assert!(lv.y.iter().chain(&lv.e).all(|&x| x >= 0.0));
        prop_assert!(level_recursion_ratio(&lv, dg.m_level, dg.m, dg.q_bar) <= 1.0 + 1e-12);
    }
}
