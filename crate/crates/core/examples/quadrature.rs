//! Tensor-product quadrature: volumes and a curvature integral.

use soliton_core::geometry::{Chart, GeometryError};
use soliton_core::quadrature::{integrate, Grid, GridSpec};

fn main() {
    let sphere = Chart::unit_sphere(2).unwrap();
    let spec = GridSpec::with_counts(&sphere, vec![32, 64]);
    let grid = Grid::build(&sphere, &spec).unwrap();
    let area: f64 = grid.volume_weights().iter().sum();
    println!("area of S²    = {area:.15} ({} nodes)", grid.len());

    let warped = Chart::warped_sphere(0.7).unwrap();
    let spec = GridSpec::default_for(&warped);
    // Gauss-Bonnet: ∫ r = 2 ∫ K = 8π on any metric on S².
    let total = integrate(
        |x| -> Result<f64, GeometryError> { Ok(warped.frame_at(x)?.scalar_curvature()) },
        &warped,
        &spec,
    )
    .unwrap();
    println!(
        "∫ r on warped = {total:.12} (8π = {:.12})",
        8.0 * std::f64::consts::PI
    );
}
