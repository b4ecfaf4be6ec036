mod common;

use fmc_core::geometry::{shapes, ReferenceCurve};
use fmc_core::nonlocal::fractional_mean_curvature;
use fmc_core::special::{circle_fractional_curvature, circle_fractional_laplacian_eigenvalue};
use fmc_core::Vec2;

#[test]
fn volumetric_oracle_matches_boundary_integral_on_circle() {
    let disk = |y: Vec2| y.norm() < 1.0;
    for s in [0.25, 0.5, 0.75] {
        let vol = common::volumetric_curvature(&disk, Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), s, 4.0);
        let boundary = fractional_mean_curvature(&ReferenceCurve::from_nodes(shapes::circle(512, 1.0)).unwrap(), s).unwrap()[0];
        let closed = circle_fractional_curvature(s, 1.0);
        eprintln!("s {s}: vol {vol} boundary {boundary} closed {closed}");
        assert!((vol - boundary).abs() / boundary < 1e-4);
    }
}

#[test]
fn eigenvalue_closed_form_matches_high_precision_values() {
    for (k, mu) in common::MU_HALF {
        let v = circle_fractional_laplacian_eigenvalue(0.5, k);
        assert!((v - mu).abs() / mu < 1e-12, "k = {k}: {v} vs {mu}");
    }
}
