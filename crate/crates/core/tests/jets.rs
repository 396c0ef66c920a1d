use proptest::prelude::*;
use soliton_core::expr::Expr;
use soliton_core::jet::{Jet, Unary};

const VARS: [&str; 2] = ["x", "y"];

/// Random well-behaved expressions in `x`, `y`: no division or logarithm, so
/// every point of the sampled box is in the domain.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (-3.0f64..3.0).prop_map(|c| format!("{:.3}", c)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.3*sin({a}))")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.prop_map(|a| format!("sqrt(2 + cos({a}))")),
        ]
    })
}

fn eval(e: &Expr, x: f64, y: f64) -> f64 {
    e.eval(&[x, y]).unwrap()
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jet_value_matches_plain_evaluation(src in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let e = Expr::parse(&src, &VARS).unwrap();
        let j = e.eval_jet_order(&[x, y], 4).unwrap();
        let v = eval(&e, x, y);
        prop_assert!((j.value() - v).abs() <= 1e-12 * scale(&[v]), "{src}: {} vs {v}", j.value());
    }

    #[test]
    fn first_and_second_partials_match_central_differences(
        src in smooth_expr(),
        x in -1.0f64..1.0,
        y in -1.0f64..1.0,
    ) {
        let e = Expr::parse(&src, &VARS).unwrap();
        let j = e.eval_jet_order(&[x, y], 4).unwrap();
        let f = |a: f64, b: f64| eval(&e, a, b);
        let h = 1e-4;
        let fd_x = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let fd_y = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        let fd_xy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h))
            / (4.0 * h * h);
        let fd_xx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
        let s = scale(&[fd_x, fd_y, fd_xy, fd_xx, f(x, y)]);
        prop_assert!((j.partial(&[0]).unwrap() - fd_x).abs() <= 1e-5 * s);
        prop_assert!((j.partial(&[1]).unwrap() - fd_y).abs() <= 1e-5 * s);
        prop_assert!((j.partial(&[0, 1]).unwrap() - fd_xy).abs() <= 1e-3 * s);
        prop_assert!((j.partial(&[0, 0]).unwrap() - fd_xx).abs() <= 1e-3 * s);
    }

    #[test]
    fn third_partial_matches_differences_of_second(src in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let e = Expr::parse(&src, &VARS).unwrap();
        let h = 1e-4;
        let at = |a: f64| e.eval_jet_order(&[a, y], 4).unwrap().partial(&[0, 1]).unwrap();
        let fd = (at(x + h) - at(x - h)) / (2.0 * h);
        let j = e.eval_jet_order(&[x, y], 4).unwrap();
        let s = scale(&[fd, at(x)]);
        prop_assert!((j.partial(&[0, 0, 1]).unwrap() - fd).abs() <= 1e-5 * s);
    }

    #[test]
    fn display_reparses_to_the_same_function(src in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let e = Expr::parse(&src, &VARS).unwrap();
        let printed = e.to_string();
        let again = Expr::parse(&printed, &VARS).unwrap();
        prop_assert_eq!(&printed, &again.to_string());
        prop_assert_eq!(eval(&e, x, y).to_bits(), eval(&again, x, y).to_bits());
    }

    #[test]
    fn parser_never_panics(src in "[xy0-9+*/^()., a-z-]{0,40}") {
        match Expr::parse(&src, &VARS) {
            Ok(e) => { let _ = e.eval(&[0.5, 0.25]); }
            Err(err) => prop_assert!(err.offset() <= src.len()),
        }
    }

    #[test]
    fn products_of_polynomials_are_exact(a in -2.0f64..2.0, b in -2.0f64..2.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        // (a x + b y)^4 at (x, y): ∂x⁴ = 24 a⁴, ∂x²∂y² = 24 a² b², ∂x∂y³ = 24 a b³.
        let u = Jet::seed_with_order(&[x, y], 0, 4).unwrap().scale(a)
            + Jet::seed_with_order(&[x, y], 1, 4).unwrap().scale(b);
        let p = u * u * u * u;
        let tol = 1e-12 * 24.0 * 16.0;
        prop_assert!((p.partial(&[0, 0, 0, 0]).unwrap() - 24.0 * a.powi(4)).abs() <= tol);
        prop_assert!((p.partial(&[0, 0, 1, 1]).unwrap() - 24.0 * a * a * b * b).abs() <= tol);
        prop_assert!((p.partial(&[0, 1, 1, 1]).unwrap() - 24.0 * a * b.powi(3)).abs() <= tol);
        let v = a * x + b * y;
        prop_assert!((p.value() - v.powi(4)).abs() <= 1e-13);
        prop_assert!((p.partial(&[0]).unwrap() - 4.0 * a * v.powi(3)).abs() <= 1e-12);
    }
}

#[test]
fn elementary_functions_at_known_points() {
    let x = Jet::seed_with_order(&[0.0], 0, 4).unwrap();
    let s = x.apply(Unary::Sin).unwrap();
    let c = x.apply(Unary::Cos).unwrap();
    let e = x.apply(Unary::Exp).unwrap();
    for k in 0..=4 {
        let vars = vec![0; k];
        let sin_k = [0.0, 1.0, 0.0, -1.0, 0.0][k];
        let cos_k = [1.0, 0.0, -1.0, 0.0, 1.0][k];
        let (ps, pc, pe) = if k == 0 {
            (s.value(), c.value(), e.value())
        } else {
            (
                s.partial(&vars).unwrap(),
                c.partial(&vars).unwrap(),
                e.partial(&vars).unwrap(),
            )
        };
        assert_eq!(ps, sin_k);
        assert_eq!(pc, cos_k);
        assert!((pe - 1.0).abs() < 1e-15);
    }
    let one = Jet::seed_with_order(&[1.0], 0, 4).unwrap();
    let l = one.apply(Unary::Log).unwrap();
    // d^k/dx^k log x at 1 = (-1)^(k-1) (k-1)!
    let expect = [1.0, -1.0, 2.0, -6.0];
    for (k, want) in expect.iter().enumerate() {
        assert!((l.partial(&vec![0; k + 1]).unwrap() - want).abs() < 1e-13);
    }
    let r = one.apply(Unary::Sqrt).unwrap();
    assert!((r.partial(&[0, 0]).unwrap() + 0.25).abs() < 1e-15);
}

#[test]
fn domain_violations_are_errors() {
    let neg = Jet::seed_with_order(&[-1.0], 0, 2).unwrap();
    assert!(neg.apply(Unary::Log).is_err());
    assert!(neg.apply(Unary::Sqrt).is_err());
    let zero = Jet::seed_with_order(&[0.0], 0, 2).unwrap();
    assert!(zero.recip().is_err());
    let e = Expr::parse("1/x", &["x"]).unwrap();
    assert!(e.eval_jet(&[0.0]).is_err());
}
