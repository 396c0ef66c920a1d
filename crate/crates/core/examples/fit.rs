//! Fitting a gradient potential on the flat torus by Levenberg-Marquardt.

use soliton_core::fit::{fit_potential, BasisExpansion, BasisFamily, FitInit, FitOptions};
use soliton_core::geometry::Chart;
use soliton_core::quadrature::GridSpec;
use soliton_core::soliton::SolitonKind;

fn main() {
    let chart = Chart::flat_torus(2).unwrap();
    let basis = BasisExpansion::new(&chart, BasisFamily::Fourier, 1).unwrap();
    println!("basis: {:?}", basis.sources());
    let init = FitInit {
        coefficients: vec![0.0, 0.31, -0.17, 0.23, 0.11],
        lambda: 1.3,
        mu: 0.4,
    };
    let grid = GridSpec::with_counts(&chart, vec![32, 32]);
    let res = fit_potential(
        &chart,
        SolitonKind::HyperbolicRicci,
        &basis,
        &init,
        &grid,
        &FitOptions::default(),
    )
    .unwrap();
    println!(
        "terminated by {:?} after {} iterations",
        res.termination, res.iterations
    );
    println!(
        "J = {:.3e}, μ = {:.3e}, λ = {}",
        res.objective, res.mu, res.lambda
    );
    for (k, j) in res.history.iter().enumerate() {
        println!("  step {k:>2}: J = {j:.3e}");
    }
}
