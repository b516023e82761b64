use fracvel::limit::aitken;
use fracvel::scanner::uniform_grid;
use fracvel::zoo::{make_abs_cusp, make_polynomial, make_power_cusp};
use fracvel::*;
use proptest::prelude::*;

fn sine() -> FnFunction<f64> {
    FnFunction::new(Interval::new(-4.0, 4.0).unwrap(), |x: f64| (3.0 * x).sin() + 0.3 * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oscillation_grows_with_sampling(x in -3.0f64..3.0, eps in 1e-3f64..0.9, n in 2usize..40) {
        let f = sine();
        let coarse = sampled_oscillation(&f, Interval::new(x, x + eps).unwrap(), n).unwrap();
        let fine = sampled_oscillation(&f, Interval::new(x, x + eps).unwrap(), 2 * n - 1).unwrap();
        prop_assert!(fine.value >= coarse.value);
        let refined = interval_oscillation(&f, x, eps, Direction::Forward, n).unwrap();
        prop_assert!(refined.value >= coarse.value);
    }

    #[test]
    fn increment_bounded_by_oscillation(x in -3.0f64..3.0, eps in 1e-4f64..0.9, backward in any::<bool>()) {
        let f = sine();
        let dir = if backward { Direction::Backward } else { Direction::Forward };
        let d = difference(&f, x, eps, dir).unwrap();
        let osc = interval_oscillation(&f, x, eps, dir, 5).unwrap();
        prop_assert!(d.abs() <= osc.value);
    }

    #[test]
    fn unit_order_is_difference_quotient(x in -3.0f64..3.0, eps in 1e-4f64..0.9) {
        let f = sine();
        let v = fractional_variation(&f, x, eps, 1.0, Direction::Forward).unwrap();
        let q = difference(&f, x, eps, Direction::Forward).unwrap() / ((x + eps) - x);
        prop_assert!((v - q).abs() <= 1e-12 * q.abs().max(1.0));
    }

    #[test]
    fn pure_power_variation_is_exact(
        a in -1.0f64..1.0,
        k in 0.1f64..3.0,
        beta in 0.1f64..1.0,
        j in 2i32..30,
    ) {
        let f = make_power_cusp(a, beta, k, 0.0).unwrap();
        let eps = 2f64.powi(-j);
        for dir in Direction::BOTH {
            let v = fractional_variation(&f, a, eps, beta, dir).unwrap();
            prop_assert!((v - k).abs() <= 1e-12 * k, "{dir:?}: {v} vs {k}");
        }
    }

    #[test]
    fn abs_cusp_velocities_have_opposite_signs(a in -1.0f64..1.0, k in 0.1f64..3.0, beta in 0.2f64..0.9) {
        let f = make_abs_cusp(a, beta, k, 0.5).unwrap();
        let s = EpsilonSchedule::default();
        let fwd = velocity_limit(&f, a, beta, Direction::Forward, &s, 1e-6).unwrap();
        let bwd = velocity_limit(&f, a, beta, Direction::Backward, &s, 1e-6).unwrap();
        prop_assert!((fwd.converged_value().unwrap() - k).abs() <= 1e-6);
        prop_assert!((bwd.converged_value().unwrap() + k).abs() <= 1e-6);
    }

    #[test]
    fn lower_orders_vanish_at_cusps(a in -0.5f64..0.5, k in 0.2f64..3.0, beta in 0.2f64..0.9, frac in 0.3f64..0.9) {
        let f = make_abs_cusp(a, beta, k, 0.0).unwrap();
        let s = EpsilonSchedule::default();
        for dir in Direction::BOTH {
            let lim = velocity_limit(&f, a, frac * beta, dir, &s, 1e-6).unwrap();
            let v = lim.converged_value();
            prop_assert!(v.is_some_and(|v| v.abs() <= 1e-5), "{dir:?}: {:?} {}", lim.status, lim.value);
        }
    }

    #[test]
    fn limit_estimate_is_consistent(values in prop::collection::vec(-5.0f64..5.0, 8..48), tol in 1e-6f64..1.0) {
        let eps: Vec<f64> = (0..values.len()).map(|i| 0.5f64.powi(i as i32)).collect();
        let est = estimate_limit(&values, &eps, tol).unwrap();
        prop_assert_eq!(est.tolerance, tol);
        prop_assert_eq!(est.tail_values.len(), fracvel::limit::window_len(values.len()));
        match est.status {
            LimitStatus::Converged => {
                prop_assert!(est.route.is_some());
                prop_assert!(est.residual <= tol);
                prop_assert!(est.value.is_finite());
            }
            LimitStatus::Oscillatory => prop_assert!(est.route.is_none()),
            LimitStatus::Diverged => prop_assert!(false, "bounded input reported diverged"),
        }
    }

    #[test]
    fn geometric_tails_converge_to_their_limit(l in -3.0f64..3.0, c in -2.0f64..2.0, r in 0.2f64..0.7) {
        let eps: Vec<f64> = (0..40).map(|i| 0.5f64.powi(i)).collect();
        let values: Vec<f64> = (0..40).map(|i| l + c * r.powi(i)).collect();
        let est = estimate_limit(&values, &eps, 1e-8).unwrap();
        prop_assert!(est.is_converged());
        prop_assert!((est.value - l).abs() <= 1e-7);
    }

    #[test]
    fn aitken_fixes_geometric_sequences(l in -3.0f64..3.0, c in 0.5f64..2.0, r in 0.3f64..0.9) {
        let values: Vec<f64> = (0..6).map(|i| l + c * r.powi(i)).collect();
        for v in aitken(&values) {
            prop_assert!((v - l).abs() <= 1e-9 * (1.0 + l.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scan_flags_are_grid_points(c in 0.2f64..0.8, n in 5usize..60) {
        let f = make_power_cusp(c, 0.5, 1.0, 0.0).unwrap();
        let iv = Interval::new(0.0, 1.0).unwrap();
        let s = EpsilonSchedule::new(0.0625, 0.5, 24).unwrap();
        let r = scan_change_set(&f, iv, 0.5, n, 1e-5, &s, 1e-6).unwrap();
        let grid = uniform_grid(iv, n);
        prop_assert!((0.0..=1.0).contains(&r.flagged_fraction));
        prop_assert_eq!(r.evaluations.len(), n);
        for p in &r.flagged {
            prop_assert!(grid.contains(&p.x));
        }
        let idx = r.flagged_indices();
        prop_assert!(idx.len() <= 1);
        if let Some(&i) = idx.first() {
            prop_assert!((grid[i] - c).abs() < 1e-12);
        }
    }

    #[test]
    fn rl_integrals_compose(c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, p in 0.05f64..0.48, q in 0.05f64..0.48, x in 0.3f64..1.0) {
        // I^p I^q f = I^{p+q} f, the inner integral in closed form
        let poly = make_polynomial(&[c0, c1], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let inner = FnFunction::new(Interval::new(0.0, 1.0).unwrap(), move |t: f64| {
            c0 * t.powf(q) / gamma(1.0 + q) + c1 * t.powf(1.0 + q) / gamma(2.0 + q)
        });
        let cfg = QuadratureConfig::default();
        let lhs = rl_integral(&inner, 0.0, p, x, &cfg).unwrap();
        let rhs = rl_integral(&poly, 0.0, p + q, x, &cfg).unwrap();
        let exact = c0 * x.powf(p + q) / gamma(1.0 + p + q) + c1 * x.powf(1.0 + p + q) / gamma(2.0 + p + q);
        prop_assert!((rhs - exact).abs() <= 1e-9);
        prop_assert!((lhs - exact).abs() <= 1e-7);
    }

    #[test]
    fn power_law_is_an_eigenfunction(beta in 0.2f64..0.8, x in 0.1f64..1.0) {
        // D^β t^β = Γ(1+β), independent of x
        let f = FnFunction::new(Interval::new(0.0, 2.0).unwrap(), move |t: f64| t.max(0.0).powf(beta));
        let d = rl_derivative(&f, 0.0, beta, x, &QuadratureConfig::default(), None).unwrap();
        let want = gamma(1.0 + beta);
        prop_assert!((d - want).abs() <= 1e-3 * want);
    }

    #[test]
    fn quadrature_schemes_agree(beta in 0.1f64..0.9, x in 0.2f64..1.5) {
        let f = FnFunction::new(Interval::new(0.0, 2.0).unwrap(), |t: f64| (2.0 * t).cos() + t * t);
        let graded = rl_integral(&f, 0.0, beta, x, &QuadratureConfig::default()).unwrap();
        let jacobi = rl_integral(&f, 0.0, beta, x, &QuadratureConfig::jacobi()).unwrap();
        prop_assert!((graded - jacobi).abs() <= 1e-8 * graded.abs().max(1.0));
    }

    #[test]
    fn right_integral_mirrors_left(beta in 0.1f64..0.9, x in -0.8f64..0.8) {
        let f = FnFunction::new(Interval::new(-1.0, 1.0).unwrap(), |t: f64| t.exp());
        let g = FnFunction::new(Interval::new(-1.0, 1.0).unwrap(), |t: f64| (-t).exp());
        let cfg = QuadratureConfig::default();
        let right = rl_integral_right(&f, 1.0, beta, x, &cfg).unwrap();
        let left = rl_integral(&g, -1.0, beta, -x, &cfg).unwrap();
        prop_assert!((right - left).abs() <= 1e-12 * left.abs().max(1.0));
    }
}

#[test]
fn single_precision_smoke() {
    let f = make_power_cusp(0.0f32, 0.5, 1.0, 0.0).unwrap();
    let s = EpsilonSchedule::<f32>::new(0.0625, 0.5, 12).unwrap();
    let r = estimate_velocity(&f, 0.0f32, 0.5, Direction::Forward, &s, 1e-4).unwrap();
    assert_eq!(r.limit.status, LimitStatus::Converged);
    assert!((r.limit.value - 1.0).abs() < 1e-4);

    let g = FnFunction::new(Interval::new(0.0f32, 1.0).unwrap(), |t: f32| t);
    let i = rl_integral(&g, 0.0f32, 0.5, 1.0, &QuadratureConfig::default()).unwrap();
    let exact = 1.0 / gamma(2.5f32);
    assert!((i - exact).abs() < 1e-4, "{i} vs {exact}");
}
