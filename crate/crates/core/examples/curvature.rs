//! Christoffel symbols, Ricci tensor and scalar curvature on built-in charts.

use soliton_core::geometry::Chart;

fn main() {
    let charts = [
        Chart::unit_sphere(2).unwrap(),
        Chart::unit_sphere(3).unwrap(),
        Chart::sphere_times_circle(2.0, 0.5).unwrap(),
        Chart::warped_sphere(0.7).unwrap(),
    ];
    for chart in &charts {
        let x: Vec<f64> = vec![0.6; chart.dim()];
        let fr = chart.frame_at(&x).unwrap();
        println!("{} at {:?}", chart.name(), x);
        println!("  coordinates {:?}", chart.coord_names());
        println!("  r = {:.12}", fr.scalar_curvature());
        println!("  Γ^0_11 = {:.12}", fr.christoffel(0, 1, 1));
        println!("  Ric = {:.6}", fr.ricci());
    }
}
