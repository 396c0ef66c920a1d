mod common;

use common::ALL;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soliton_core::geometry::{self, Chart, ScalarField, VectorField};
use soliton_core::quadrature::{gauss_legendre, integrate, Grid, GridSpec};
use std::f64::consts::PI;

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for n in [1, 2, 5, 16, 64] {
        let (x, w) = gauss_legendre(n);
        assert_eq!(x.len(), n);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..2 * n {
            let exact = if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            };
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert!(
                (q - exact).abs() < 1e-13,
                "n = {n}, k = {k}: {q} vs {exact}"
            );
        }
    }
}

#[test]
fn volumes_of_the_suite_charts() {
    let cases = [
        (Chart::unit_sphere(2).unwrap(), 4.0 * PI),
        (Chart::unit_sphere(3).unwrap(), 2.0 * PI * PI),
        (Chart::flat_torus(2).unwrap(), 4.0 * PI * PI),
        (Chart::flat_torus(3).unwrap(), 8.0 * PI.powi(3)),
        // 4π a² · 2π b
        (
            Chart::sphere_times_circle(2.0, 0.5).unwrap(),
            16.0 * PI * PI,
        ),
    ];
    for (chart, want) in cases {
        let spec = GridSpec::with_counts(&chart, vec![16; chart.dim()]);
        let v = integrate(|_| Ok::<_, std::convert::Infallible>(1.0), &chart, &spec).unwrap();
        assert!(
            (v - want).abs() <= 1e-12 * want,
            "{}: {v} vs {want}",
            chart.name()
        );
    }
}

#[test]
fn sphere_area_on_the_default_grid() {
    let chart = Chart::unit_sphere(2).unwrap();
    let grid = Grid::build(&chart, &GridSpec::default_for(&chart)).unwrap();
    assert_eq!(grid.len(), 64 * 128);
    let area: f64 = grid.volume_weights().iter().sum();
    assert!((area - 4.0 * PI).abs() <= 1e-8 * 4.0 * PI);
}

#[test]
fn refinement_changes_smooth_integrals_negligibly() {
    let chart = Chart::warped_sphere(0.7).unwrap();
    let f = ScalarField::parse("exp(sin(th)*cos(ph))*cos(th)^2", &chart).unwrap();
    let at = |counts: Vec<usize>| {
        integrate(
            |x| -> Result<f64, geometry::GeometryError> {
                let fr = chart.frame_at(x)?;
                Ok(f.expr().eval(x)? * geometry::norm2_vector(&geometry::grad(&f, &fr)?, &fr))
            },
            &chart,
            &GridSpec::with_counts(&chart, counts),
        )
        .unwrap()
    };
    let coarse = at(vec![32, 64]);
    let fine = at(vec![64, 128]);
    assert!(
        (coarse - fine).abs() < 1e-10 * fine.abs().max(1.0),
        "{coarse} vs {fine}"
    );
}

#[test]
fn closed_manifolds_have_no_boundary_terms() {
    for s in ALL {
        let chart = s.chart();
        let grid = Grid::build(&chart, &s.grid()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let f = ScalarField::parse(&s.scalar(&mut rng), &chart).unwrap();
            let comps = s.vector(&mut rng);
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            let xi = VectorField::parse(&refs, &chart).unwrap();
            let (lap, div) = (
                grid_integral(&grid, &chart, |fr| geometry::laplacian(&f, fr)),
                grid_integral(&grid, &chart, |fr| geometry::div_vector(&xi, fr)),
            );
            assert!(lap.abs() <= 1e-8, "{}: ∫Δf = {lap}", s.name());
            assert!(div.abs() <= 1e-8, "{}: ∫div ξ = {div}", s.name());
        }
    }
}

fn grid_integral(
    grid: &Grid,
    chart: &Chart,
    q: impl Fn(&geometry::PointFrame) -> Result<f64, geometry::GeometryError> + Sync,
) -> f64 {
    let values = grid
        .map_nodes(|x| q(&chart.frame_at(x)?))
        .unwrap_or_else(|(x, e): (Vec<f64>, geometry::GeometryError)| panic!("{x:?}: {e}"));
    grid.weighted_sum(&values)
}
