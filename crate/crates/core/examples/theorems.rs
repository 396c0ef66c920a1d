//! Theorem verdicts for a trivial soliton and for data that is not a soliton.

use soliton_core::geometry::{Chart, ScalarField};
use soliton_core::quadrature::GridSpec;
use soliton_core::soliton::{evaluate_theorem, CheckId, Potential, SolitonKind, SolitonSpec};

fn main() {
    let chart = Chart::unit_sphere(2).unwrap();
    let grid = GridSpec::with_counts(&chart, vec![24, 48]);
    let cases = [
        ("trivial (f = 0, μ = 2)", "0", 2.0),
        ("f = cos θ", "cos(th)", 2.0),
    ];
    for (label, f, mu) in cases {
        let f = ScalarField::parse(f, &chart).unwrap();
        let spec = SolitonSpec::new(
            SolitonKind::HyperbolicYamabe,
            Potential::Gradient(f),
            1.0,
            mu,
        );
        println!("{label}");
        for id in [
            CheckId::TheoremC,
            CheckId::Theorem1,
            CheckId::SquaredDeficit,
            CheckId::PropCsc,
        ] {
            let r = evaluate_theorem(id, &spec, &chart, &grid).unwrap();
            println!("  {:<5} {:?}", id.as_str(), r.verdict);
            for (k, v) in &r.hypothesis_residuals {
                println!("        hypothesis {k} = {v:.3e}");
            }
        }
    }
}
