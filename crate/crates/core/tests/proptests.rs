use fmc_core::config::parse_flow_config;
use fmc_core::geometry::shapes;
use fmc_core::geometry::{build_deformed, build_q, DeltaEpsilonBudget, HeightField, ReferenceCurve};
use fmc_core::io::{read_curve_csv, read_height_csv, write_curve_csv, write_height_csv};
use fmc_core::nonlocal::{fractional_mean_curvature, NonlocalOperatorTable};
use fmc_core::norms::{c1_s_alpha_norm, holder_norm, NormReport};
use fmc_core::Vec2;
use proptest::prelude::*;

const S: f64 = 0.5;
const ALPHA: f64 = 0.1;

fn circle(n: usize) -> ReferenceCurve {
    ReferenceCurve::from_nodes(shapes::circle(n, 1.0)).unwrap()
}

fn trig(base: &ReferenceCurve, coeffs: &[f64]) -> Vec<f64> {
    base.params()
        .iter()
        .map(|t| {
            coeffs
                .chunks(2)
                .enumerate()
                .map(|(k, ab)| ab[0] * (k as f64 * t).cos() + ab[1] * ((k + 1) as f64 * t).sin())
                .sum()
        })
        .collect()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 8)
}

fn entries(r: &NormReport) -> [f64; 5] {
    [r.c0, r.c_alpha, r.c1, r.c1_alpha, r.c1_s_alpha]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norms_are_homogeneous(c in coeffs(), a in -4.0..4.0f64) {
        let base = circle(64);
        let u = trig(&base, &c);
        let au: Vec<f64> = u.iter().map(|v| a * v).collect();
        for (x, y) in entries(&c1_s_alpha_norm(&u, &base, S, ALPHA)).iter().zip(entries(&c1_s_alpha_norm(&au, &base, S, ALPHA))) {
            prop_assert!((a.abs() * x - y).abs() <= 1e-12 * (1.0 + y));
        }
    }

    #[test]
    fn norms_satisfy_the_triangle_inequality(c1 in coeffs(), c2 in coeffs()) {
        let base = circle(64);
        let (u, v) = (trig(&base, &c1), trig(&base, &c2));
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let (nu, nv, nw) = (
            entries(&c1_s_alpha_norm(&u, &base, S, ALPHA)),
            entries(&c1_s_alpha_norm(&v, &base, S, ALPHA)),
            entries(&c1_s_alpha_norm(&w, &base, S, ALPHA)),
        );
        for i in 0..5 {
            prop_assert!(nw[i] <= nu[i] + nv[i] + 1e-12);
        }
        prop_assert!(holder_norm(&w, &base, 0.3) <= holder_norm(&u, &base, 0.3) + holder_norm(&v, &base, 0.3) + 1e-12);
    }

    #[test]
    fn norm_report_is_ordered(c in coeffs()) {
        let base = ReferenceCurve::from_nodes(shapes::ellipse(64, 1.0, 0.7)).unwrap();
        let r = c1_s_alpha_norm(&trig(&base, &c), &base, S, ALPHA);
        prop_assert!(0.0 <= r.c0 && r.c0 <= r.c_alpha && r.c_alpha <= r.c1_alpha && r.c1_alpha <= r.c1_s_alpha);
        prop_assert!(r.c0 <= r.c1 && r.c1 <= r.c1_alpha);
    }

    #[test]
    fn operator_rows_sum_to_zero(b in 0.5..1.0f64) {
        let base = ReferenceCurve::from_nodes(shapes::ellipse(48, 1.0, b)).unwrap();
        let table = NonlocalOperatorTable::assemble(&base, S).unwrap();
        let out = table.fractional_laplacian_apply(&[1.0; 48]).unwrap();
        prop_assert!(out.iter().all(|v| v.abs() < 1e-8));
        prop_assert!(table.c_s_squared.iter().all(|c| *c >= 0.0));
    }

    #[test]
    fn curvature_is_translation_invariant(b in 0.5..1.0f64, dx in -10.0..10.0f64, dy in -10.0..10.0f64) {
        let base = ReferenceCurve::from_nodes(shapes::ellipse(64, 1.0, b)).unwrap();
        let moved = base.translated(Vec2::new(dx, dy));
        let a = fractional_mean_curvature(&base, S).unwrap();
        let c = fractional_mean_curvature(&moved, S).unwrap();
        for (x, y) in a.iter().zip(&c) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn normal_decomposition_holds_for_small_heights(c in coeffs(), tp in 0.0..=1.0f64) {
        let base = circle(64);
        let vals: Vec<f64> = trig(&base, &c).iter().map(|v| 0.01 * v).collect();
        let h = HeightField::new(vals, S, ALPHA).unwrap();
        let q = build_q(&base, &h, tp).unwrap();
        let d = build_deformed(&base, &h.scaled(tp)).unwrap();
        for i in 0..64 {
            let lhs = base.normal()[i] * (1.0 + q.q1[i]) + q.q2[i];
            prop_assert!((lhs - d.normal_e()[i] * d.tangential_jacobian()[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_height_deformation_is_identity(b in 0.4..1.0f64) {
        let base = ReferenceCurve::from_nodes(shapes::ellipse(32, 1.0, b)).unwrap();
        let d = build_deformed(&base, &HeightField::zeros(32, S, ALPHA).unwrap()).unwrap();
        prop_assert_eq!(d.nodes(), base.nodes());
        prop_assert!(d.tangential_jacobian().iter().all(|j| (j - 1.0).abs() < 1e-14));
    }

    #[test]
    fn budget_requires_ordered_bounds(delta in -0.5..1.5f64, epsilon in -0.5..1.5f64) {
        let valid = 0.0 < epsilon && epsilon < delta && delta < 1.0;
        prop_assert_eq!(DeltaEpsilonBudget::new(delta, epsilon).is_ok(), valid);
    }

    #[test]
    fn csv_round_trips_are_exact(b in 0.1..10.0f64, n in 8usize..40, vals in prop::collection::vec(-1e3..1e3f64, 8..40)) {
        let pts = shapes::ellipse(n, 1.0, b);
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &pts).unwrap();
        prop_assert_eq!(read_curve_csv(buf.as_slice()).unwrap(), pts);
        let mut buf = Vec::new();
        write_height_csv(&mut buf, &vals).unwrap();
        prop_assert_eq!(read_height_csv(buf.as_slice()).unwrap(), vals);
    }

    #[test]
    fn config_values_round_trip(n in 8usize..4096, dt in 1e-6..1e-1f64, t in 0.0..1.0f64, lambda0 in 0.0..1e4f64) {
        let text = format!("N = {n}\ndt = {dt}\nT = {t}\nlambda0 = {lambda0}\n");
        let cfg = parse_flow_config(&text).unwrap();
        prop_assert_eq!(cfg.n, n);
        prop_assert_eq!(cfg.dt, dt);
        prop_assert_eq!(cfg.t_end, t);
        prop_assert_eq!(cfg.lambda0, lambda0);
    }
}
