mod common;

use common::{Suite, ALL};
use proptest::prelude::*;
use soliton_core::geometry::{self, Chart, ScalarField, VectorField};
use std::f64::consts::PI;

fn orthogonal_surface(e: &str, g: &str) -> Chart {
    Chart::from_strings(
        "surface",
        &["u", "v"],
        &[(0.0, 2.0 * PI), (0.0, 2.0 * PI)],
        &[true, true],
        &[0.0, 0.0],
        &[&[e, "0"], &["", g]],
    )
    .unwrap()
}

/// Scalar curvature of `E du² + G dv²` by nested central differences of the
/// plain metric values: `K = −(∂_u(G_u/W) + ∂_v(E_v/W)) / 2W`, `W = √(EG)`.
fn brioschi_r(chart: &Chart, u: f64, v: f64) -> f64 {
    let m = |u: f64, v: f64| {
        let g = chart.metric_at(&[u, v]).unwrap();
        (g[(0, 0)], g[(1, 1)])
    };
    let h = 1e-4;
    let w = |u: f64, v: f64| {
        let (e, g) = m(u, v);
        (e * g).sqrt()
    };
    let gu_over_w = |u: f64, v: f64| (m(u + h, v).1 - m(u - h, v).1) / (2.0 * h) / w(u, v);
    let ev_over_w = |u: f64, v: f64| (m(u, v + h).0 - m(u, v - h).0) / (2.0 * h) / w(u, v);
    let d_u = (gu_over_w(u + h, v) - gu_over_w(u - h, v)) / (2.0 * h);
    let d_v = (ev_over_w(u, v + h) - ev_over_w(u, v - h)) / (2.0 * h);
    -(d_u + d_v) / w(u, v)
}

/// `Γ^k_ij` from central differences of the metric values.
fn fd_christoffel(chart: &Chart, x: &[f64]) -> Vec<f64> {
    let n = chart.dim();
    let h = 1e-5;
    let dg: Vec<_> = (0..n)
        .map(|l| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[l] += h;
            q[l] -= h;
            (chart.metric_at(&p).unwrap() - chart.metric_at(&q).unwrap()) / (2.0 * h)
        })
        .collect();
    let g_inv = chart.metric_at(x).unwrap().try_inverse().unwrap();
    let mut out = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += 0.5 * g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                out.push(acc);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn surface_curvature_matches_brioschi(
        a in -0.4f64..0.4,
        b in -0.4f64..0.4,
        u in 0.0f64..6.0,
        v in 0.0f64..6.0,
    ) {
        let e = format!("1 + ({a})*sin(u)*cos(v)^2");
        let g = format!("2 + ({b})*cos(u + 2*v) + 0.3*sin(v)");
        let chart = orthogonal_surface(&e, &g);
        let fr = chart.frame_at(&[u, v]).unwrap();
        let oracle = brioschi_r(&chart, u, v);
        prop_assert!((fr.scalar_curvature() - oracle).abs() < 1e-5 * oracle.abs().max(1.0),
            "{} vs {oracle}", fr.scalar_curvature());
        // Two-dimensional Ricci is (r/2) g.
        let dev = fr.ricci() - fr.metric() * (fr.scalar_curvature() / 2.0);
        prop_assert!(dev.abs().max() < 1e-12);
    }

    #[test]
    fn christoffel_symbols_match_metric_differences(t in 0.2f64..1.3, p in 0.0f64..6.0, q in 0.0f64..6.0) {
        for chart in [Chart::unit_sphere(3).unwrap(), Chart::sphere_times_circle(2.0, 0.5).unwrap()] {
            let fr = chart.frame_at(&[t, p, q]).unwrap();
            let oracle = fd_christoffel(&chart, &[t, p, q]);
            let mut idx = 0;
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        prop_assert!((fr.christoffel(k, i, j) - oracle[idx]).abs() < 1e-8);
                        idx += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_and_laplacian_match_differences(t in 0.3f64..2.8, p in 0.0f64..6.0) {
        let chart = Chart::warped_sphere(0.7).unwrap();
        let f = ScalarField::parse("sin(th)^2*cos(ph) + 0.3*cos(th)", &chart).unwrap();
        let fr = chart.frame_at(&[t, p]).unwrap();
        let val = |a: f64, b: f64| f.expr().eval(&[a, b]).unwrap();
        let h = 1e-4;
        let df = [
            (val(t + h, p) - val(t - h, p)) / (2.0 * h),
            (val(t, p + h) - val(t, p - h)) / (2.0 * h),
        ];
        let grad = geometry::grad(&f, &fr).unwrap();
        let g_inv = fr.inverse_metric();
        for i in 0..2 {
            let want = g_inv[(i, 0)] * df[0] + g_inv[(i, 1)] * df[1];
            prop_assert!((grad[i] - want).abs() < 1e-7);
        }
        // Δf = (1/√g) ∂_i(√g g^{ij} ∂_j f), differenced once more.
        let flux = |a: f64, b: f64, i: usize| {
            let fr = chart.frame_at(&[a, b]).unwrap();
            let gi = fr.inverse_metric();
            let d = [
                (val(a + h, b) - val(a - h, b)) / (2.0 * h),
                (val(a, b + h) - val(a, b - h)) / (2.0 * h),
            ];
            fr.volume_density() * (gi[(i, 0)] * d[0] + gi[(i, 1)] * d[1])
        };
        let lap_fd = ((flux(t + h, p, 0) - flux(t - h, p, 0)) + (flux(t, p + h, 1) - flux(t, p - h, 1)))
            / (2.0 * h)
            / fr.volume_density();
        prop_assert!((geometry::laplacian(&f, &fr).unwrap() - lap_fd).abs() < 1e-5);
    }
}

#[test]
fn round_spheres_are_einstein() {
    for (n, chart) in [
        (2, Chart::unit_sphere(2).unwrap()),
        (3, Chart::unit_sphere(3).unwrap()),
    ] {
        for t in [0.01, 0.4, 0.9, 1.5] {
            let x = vec![t; n];
            let fr = chart.frame_at(&x).unwrap();
            let nf = n as f64;
            assert!((fr.scalar_curvature() - nf * (nf - 1.0)).abs() < 1e-9);
            let dev = fr.ricci() - fr.metric() * (nf - 1.0);
            assert!(dev.abs().max() < 1e-9, "n = {n}, t = {t}: {dev}");
        }
    }
}

#[test]
fn product_and_flat_curvature() {
    let (a, _) = common::PRODUCT_RADII;
    let chart = Chart::sphere_times_circle(a, 0.5).unwrap();
    let fr = chart.frame_at(&[1.0, 2.0, 3.0]).unwrap();
    assert!((fr.scalar_curvature() - 2.0 / (a * a)).abs() < 1e-12);
    let ric = fr.ricci();
    assert!((ric[(0, 0)] - 1.0).abs() < 1e-12);
    assert!(ric[(2, 2)].abs() < 1e-12);
    for n in [2, 3] {
        let chart = Chart::flat_torus(n).unwrap();
        let fr = chart.frame_at(&vec![0.7; n]).unwrap();
        assert_eq!(fr.scalar_curvature(), 0.0);
        assert_eq!(fr.ricci().abs().max(), 0.0);
    }
}

#[test]
fn rotations_are_killing_and_not_translations_of_the_sphere() {
    let chart = Chart::unit_sphere(2).unwrap();
    let rot = VectorField::parse(&["0", "1"], &chart).unwrap();
    let tilt = VectorField::parse(&["1", "0"], &chart).unwrap();
    let fr = chart.frame_at(&[0.8, 0.3]).unwrap();
    assert!(geometry::lie_metric(&rot, &fr).unwrap().abs().max() < 1e-15);
    // £_{∂θ} g = diag(0, 2 sinθ cosθ)
    let lie = geometry::lie_metric(&tilt, &fr).unwrap();
    assert!((lie[(1, 1)] - 2.0 * 0.8f64.sin() * 0.8f64.cos()).abs() < 1e-14);
}

#[test]
fn every_suite_chart_builds_frames_on_its_grid() {
    for s in ALL {
        let chart = s.chart();
        let grid = soliton_core::quadrature::Grid::build(&chart, &s.grid()).unwrap();
        for x in grid.nodes().step_by(97) {
            let fr = chart.frame_at(x).unwrap();
            assert!(fr.volume_density() > 0.0, "{}", Suite::name(s));
        }
    }
}
