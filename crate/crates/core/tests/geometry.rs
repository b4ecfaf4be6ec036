use approx::assert_relative_eq;
use fmc_core::geometry::shapes;
use fmc_core::geometry::{
    build_deformed, build_q, mollify_reference, polygon_length, shoelace_area, HeightField, ReferenceCurve,
};
use fmc_core::{Error, Vec2};

fn circle(n: usize) -> ReferenceCurve {
    ReferenceCurve::from_nodes(shapes::circle(n, 1.0)).unwrap()
}

#[test]
fn frame_invariants_hold_on_an_ellipse() {
    let base = ReferenceCurve::from_nodes(shapes::ellipse(256, 1.0, 0.6)).unwrap();
    for ((t, nu), x) in base.tangent().iter().zip(base.normal()).zip(base.nodes()) {
        assert!((t.norm() - 1.0).abs() < 1e-12);
        assert!((nu.norm() - 1.0).abs() < 1e-12);
        assert!(t.dot(nu).abs() < 1e-12);
        assert!((x - base.centroid()).dot(nu) > 0.0);
    }
    assert!((base.total_turning() - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    // c11 norm is the largest curvature a / b^2 at the vertices
    assert_relative_eq!(base.c11_norm(), 1.0 / 0.36, max_relative = 1e-6);
}

#[test]
fn mollify_ellipse_reproduces_the_input() {
    let raw = shapes::ellipse(256, 1.0, 0.6);
    let m = mollify_reference(&raw, 0.005, 0.5, 0.1).unwrap();
    assert!(m.h0_c0 < 0.005);
    let realized = build_deformed(&m.reference, &m.h0).unwrap();
    let worst = realized.nodes().iter().zip(&raw).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn mollify_circle_is_identity() {
    let raw = shapes::circle(128, 1.0);
    let m = mollify_reference(&raw, 0.01, 0.5, 0.1).unwrap();
    assert_eq!(m.sigma, 0.0);
    assert!(m.h0.max_abs() < 1e-14);
}

#[test]
fn mollify_bump_meets_epsilon_by_projection_oracle() {
    let raw = shapes::bump_circle(512, 0.05, 0.6);
    let m = mollify_reference(&raw, 0.01, 0.5, 0.1).unwrap();
    // dense nearest-point distance from the raw curve to the reference curve
    let dense = fmc_core::spectral::TrigInterpolant::new(m.reference.nodes());
    let samples: Vec<Vec2> = (0..8192).map(|k| dense.eval(2.0 * std::f64::consts::PI * k as f64 / 8192.0).0).collect();
    let dist = raw
        .iter()
        .map(|p| samples.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    assert!(dist < 0.01, "{dist}");
    assert!((dist - m.h0_c0).abs() < 1e-3);
}

#[test]
fn deformed_jacobian_matches_finite_difference_arclength() {
    let n = 512;
    let base = circle(n);
    let h = HeightField::from_fn(&base, 0.5, 0.1, |t| 0.05 * (2.0 * t).cos()).unwrap();
    let d = build_deformed(&base, &h).unwrap();
    let dense_base = fmc_core::spectral::TrigInterpolant::new(base.nodes());
    let dense_img = fmc_core::spectral::TrigInterpolant::new(d.nodes());
    let step = 1e-5;
    for (j, jac) in d.tangential_jacobian().iter().enumerate().step_by(17) {
        let t = base.param(j);
        let ds_img = (dense_img.eval(t + step).0 - dense_img.eval(t - step).0).norm();
        let ds_base = (dense_base.eval(t + step).0 - dense_base.eval(t - step).0).norm();
        assert!((jac - ds_img / ds_base).abs() < 1e-8);
    }
}

#[test]
fn normal_decomposition_identity() {
    let base = circle(512);
    let h = HeightField::from_fn(&base, 0.5, 0.1, |t| 0.05 * (3.0 * t).cos()).unwrap();
    for tp in [0.0, 0.5, 1.0] {
        let q = build_q(&base, &h, tp).unwrap();
        let d = build_deformed(&base, &h.scaled(tp)).unwrap();
        for i in 0..base.len() {
            let nu = base.normal()[i];
            let lhs = nu * (1.0 + q.q1[i]) + q.q2[i];
            let rhs = d.normal_e()[i] * d.tangential_jacobian()[i];
            assert!((lhs - rhs).norm() < 1e-9);
            assert!(q.q2[i].dot(&nu).abs() < 1e-12);
            assert!((q.q3[i] - (d.tangential_jacobian()[i] - 1.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn q_factors_vanish_at_zero_height() {
    let base = ReferenceCurve::from_nodes(shapes::ellipse(64, 1.0, 0.7)).unwrap();
    let h = HeightField::zeros(64, 0.5, 0.1).unwrap();
    let q = build_q(&base, &h, 0.7).unwrap();
    assert!(q.q1.iter().chain(&q.q3).all(|v| v.abs() < 1e-14));
    assert!(q.q2.iter().all(|v| v.norm() < 1e-14));
}

#[test]
fn constant_height_on_circle_gives_radial_q() {
    let base = circle(128);
    let h = HeightField::new(vec![0.1; 128], 0.5, 0.1).unwrap();
    let q = build_q(&base, &h, 1.0).unwrap();
    assert!(q.q2.iter().all(|v| v.norm() < 1e-12));
    assert!(q.q3.iter().all(|v| (v - 0.1).abs() < 1e-12));
}

#[test]
fn deformed_area_matches_second_order_expansion() {
    // area of x + h nu over the unit circle is int (h + h^2 / 2) plus pi
    let base = circle(256);
    let a = 1e-3;
    let h = HeightField::from_fn(&base, 0.5, 0.1, |t| a * (1.0 + (2.0 * t).cos())).unwrap();
    let d = build_deformed(&base, &h).unwrap();
    let expansion: f64 = std::f64::consts::PI
        + base.integrate(&h.values().iter().map(|v| v + 0.5 * v * v).collect::<Vec<_>>());
    let area = fmc_core::geometry::spectral_area(d.nodes());
    assert!((area - expansion).abs() < 10.0 * a.powi(3), "{:e}", (area - expansion).abs());
    assert!((shoelace_area(d.nodes()) - area).abs() < 1e-3);
}

#[test]
fn misaligned_height_is_rejected() {
    let base = circle(64);
    let h = HeightField::zeros(32, 0.5, 0.1).unwrap();
    assert!(matches!(build_deformed(&base, &h), Err(Error::Misaligned { .. })));
}

#[test]
fn translation_commutes_with_deformation() {
    let base = ReferenceCurve::from_nodes(shapes::ellipse(64, 1.0, 0.7)).unwrap();
    let shift = Vec2::new(3.0, -2.0);
    let moved = base.translated(shift);
    let h = HeightField::from_fn(&base, 0.5, 0.1, |t| 0.02 * t.sin()).unwrap();
    let a = build_deformed(&base, &h).unwrap();
    let b = build_deformed(&moved, &h).unwrap();
    for (p, q) in a.nodes().iter().zip(b.nodes()) {
        assert!((p + shift - q).norm() < 1e-12);
    }
    assert!((polygon_length(a.nodes()) - polygon_length(b.nodes())).abs() < 1e-12);
}
