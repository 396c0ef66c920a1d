//! Integrands mixing the expression language with curvature and fields.

use soliton_core::geometry::{Chart, ScalarField};
use soliton_core::integrand::{FieldSet, Integrand};
use soliton_core::quadrature::{Grid, GridSpec};

fn main() {
    let chart = Chart::unit_sphere(2).unwrap();
    let mut fields = FieldSet::default();
    fields
        .scalars
        .insert("f".into(), ScalarField::parse("cos(th)", &chart).unwrap());
    let grid = Grid::build(&chart, &GridSpec::with_counts(&chart, vec![32, 64])).unwrap();
    for src in ["1", "ric(gradf, gradf)", "norm2_hess(f)", "lap(f) + r*f"] {
        let i = Integrand::parse(src, &chart, fields.clone()).unwrap();
        println!("∫ {src:<20} = {:.12}", i.integrate(&chart, &grid).unwrap());
    }
}
