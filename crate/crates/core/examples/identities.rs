//! Unconditional identities on a non-soliton field: the trace formula,
//! Bochner's formula, the divergence formula and Schur's lemma.

use soliton_core::geometry::{Chart, ScalarField};
use soliton_core::quadrature::GridSpec;
use soliton_core::soliton::{CheckId, Evaluation, Potential, Tolerances};

fn main() {
    let chart = Chart::warped_sphere(0.7).unwrap();
    let f = ScalarField::parse("exp(0.3*cos(th))*sin(th)*cos(ph)", &chart).unwrap();
    let grid = GridSpec::with_counts(&chart, vec![24, 48]);
    let ev = Evaluation::with_potential(&chart, &Potential::Gradient(f), &grid).unwrap();
    for id in [
        CheckId::TraceLie2,
        CheckId::Bochner,
        CheckId::DivLie,
        CheckId::Schur,
    ] {
        let r = ev.report(id, &Tolerances::default()).unwrap();
        println!(
            "{:<12} {:?} max residual {:.2e}",
            id.as_str(),
            r.verdict,
            r.max_residual
        );
    }
}
