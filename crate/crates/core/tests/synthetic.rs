use eqsearch::derivatives::DerivativeSpec;
use eqsearch::objectives::eval_q_op;
use eqsearch::synthetic::{gen_kdv, kdv_grid, BenchmarkCase, BenchmarkName, KdvScheme};

fn soliton(x: f64, length: f64) -> f64 {
    let c: f64 = 1.0;
    let x0 = length / 2.0;
    // nearest periodic image keeps the tails continuous across the seam
    let d = (x - x0 + length / 2.0).rem_euclid(length) - length / 2.0;
    c / 2.0 / (c.sqrt() * d / 2.0).cosh().powi(2)
}

#[test]
fn soliton_returns_after_one_transit() {
    let scheme = KdvScheme {
        nodes: 512,
        length: 40.0,
        forced: false,
    };
    let h = scheme.dx();
    let u0: Vec<f64> = (0..scheme.nodes)
        .map(|i| soliton(i as f64 * h, scheme.length))
        .collect();
    // speed 1, so one transit of the domain takes time equal to its length
    let t_end = scheme.length;
    let steps = (t_end / scheme.stability_bound(1.0)).ceil() as usize;
    let dt = t_end / steps as f64;
    let out = scheme.integrate(&u0, dt, steps, steps, 1.0).unwrap();
    let last = out.last().unwrap();
    let err = last.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-2, "shape error {err:.3e}");
}

#[test]
fn unforced_scheme_conserves_mass() {
    let scheme = KdvScheme {
        nodes: 128,
        length: 2.0 * std::f64::consts::PI,
        forced: false,
    };
    let h = scheme.dx();
    let u0: Vec<f64> = (0..scheme.nodes).map(|i| 0.5 * (i as f64 * h).cos() + 0.2).collect();
    let dt = 0.9 * scheme.stability_bound(1.5);
    let snaps = scheme.integrate(&u0, dt, 2000, 1, 1.5).unwrap();
    let mass = |u: &[f64]| u.iter().sum::<f64>() * h;
    for pair in snaps.windows(2) {
        let drift = (mass(&pair[1]) - mass(&pair[0])).abs();
        assert!(drift <= 1e-8, "drift {drift:.3e}");
    }
}

#[test]
fn uniform_forced_solution_is_half_sine_squared() {
    let grid = kdv_grid(101, 64).unwrap();
    let case = gen_kdv(&grid, &|_| 0.0).unwrap();
    let mut worst: f64 = 0.0;
    for (i, &t) in grid.t_axis().iter().enumerate() {
        for j in 0..grid.nx() {
            worst = worst.max((case.field.values()[[i, j]] - t.sin().powi(2) / 2.0).abs());
        }
    }
    assert!(worst <= 1e-4, "max error {worst:.3e}");
}

#[test]
fn cases_satisfy_their_equations() {
    for name in [BenchmarkName::Wave, BenchmarkName::Burgers] {
        let case = BenchmarkCase::generate(name, 101, 101).unwrap();
        let q = eval_q_op(&case.true_equation, &case.table(true).unwrap()).unwrap();
        assert!(q <= 1e-8, "{name}: {q:.3e}");
    }
    let kdv = BenchmarkCase::generate(BenchmarkName::Kdv, 101, 101).unwrap();
    assert!(kdv.analytic.is_none());
    let q = eval_q_op(&kdv.true_equation, &kdv.table(false).unwrap()).unwrap();
    assert!(q <= 5e-2, "kdv: {q:.3e}");
}

#[test]
fn analytic_and_numerical_derivatives_agree() {
    for name in [BenchmarkName::Wave, BenchmarkName::Burgers] {
        let case = BenchmarkCase::generate(name, 101, 101).unwrap();
        let exact = case.table(true).unwrap();
        let approx = case.table(false).unwrap();
        let mask = approx.mask().clone();
        for spec in [
            DerivativeSpec::t(1),
            DerivativeSpec::x(1),
            DerivativeSpec::t(2),
            DerivativeSpec::x(2),
        ] {
            let a = mask.flatten(exact.get(spec).unwrap().values());
            let b = mask.flatten(approx.get(spec).unwrap().values());
            let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-2 * scale, "{name} {spec}: {err:.3e}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    for name in BenchmarkName::ALL {
        let a = BenchmarkCase::generate(name, 31, 32).unwrap();
        let b = BenchmarkCase::generate(name, 31, 32).unwrap();
        assert_eq!(a.field.values(), b.field.values());
        assert_eq!(a.true_equation_string(), b.true_equation_string());
    }
}
