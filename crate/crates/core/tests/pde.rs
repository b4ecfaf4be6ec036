use fmc_core::geometry::shapes;
use fmc_core::geometry::ReferenceCurve;
use fmc_core::nonlocal::NonlocalOperatorTable;
use fmc_core::pde::{maximum_principle_check, schauder_diagnostic, solve_linear, LinearHeatProblem};
use fmc_core::special::circle_fractional_laplacian_eigenvalue;
use fmc_core::verify::fitted_decay_rates;

fn table(base: ReferenceCurve) -> NonlocalOperatorTable {
    NonlocalOperatorTable::assemble(&base, 0.5).unwrap()
}

fn circle_table(n: usize) -> NonlocalOperatorTable {
    table(ReferenceCurve::from_nodes(shapes::circle(n, 1.0)).unwrap())
}

fn weighted_sum(t: &NonlocalOperatorTable, u: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    t.base.integrate(&u.iter().map(|v| f(*v)).collect::<Vec<_>>())
}

#[test]
fn fitted_decay_rates_match_closed_form() {
    let rates = fitted_decay_rates(256, 0.5, &[1, 2, 3], 1.0, 1e-3).unwrap();
    for (k, rate) in [1u32, 2, 3].iter().zip(rates) {
        let mu = circle_fractional_laplacian_eigenvalue(0.5, *k);
        assert!((rate - mu).abs() / mu < 1e-3, "k = {k}: {rate} vs {mu}");
    }
}

#[test]
fn static_forcing_obeys_the_c0_bound_for_both_signs() {
    let t = circle_table(128);
    for sign in [1.0, -1.0] {
        let g: Vec<f64> = t.base.params().iter().map(|th| sign * (1.0 + 0.5 * (3.0 * th).cos())).collect();
        let mut p = LinearHeatProblem::free(&t, vec![0.0; 128], 0.2, 1e-2);
        p.forcing_g = g;
        let traj = solve_linear(&p).unwrap();
        let r = maximum_principle_check(&traj, &p);
        assert!(r.holds && r.margin >= 0.0);
    }
}

#[test]
fn zero_data_passes_with_zero_margin() {
    let t = circle_table(64);
    let p = LinearHeatProblem::free(&t, vec![0.0; 64], 0.1, 1e-2);
    let traj = solve_linear(&p).unwrap();
    let r = maximum_principle_check(&traj, &p);
    assert!(r.holds && r.margin == 0.0);
}

#[test]
fn oscillating_forcing_still_passes() {
    let t = circle_table(128);
    let params = t.base.params();
    let mut p = LinearHeatProblem::free(&t, params.iter().map(|x| x.sin()).collect(), 0.1, 1e-3);
    p.forcing_f = (0..p.steps())
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            params.iter().map(|x| sign * 5.0 * (4.0 * x).cos()).collect()
        })
        .collect();
    let traj = solve_linear(&p).unwrap();
    assert!(maximum_principle_check(&traj, &p).holds);
}

#[test]
fn energy_decays_and_mass_is_conserved_on_an_ellipse() {
    let t = table(ReferenceCurve::from_nodes(shapes::ellipse(128, 1.0, 0.6)).unwrap());
    let u0: Vec<f64> = t.base.params().iter().map(|x| (2.0 * x).cos() + 0.3 * (5.0 * x).sin() + 0.7).collect();
    let horizon = 0.5;
    let traj = solve_linear(&LinearHeatProblem::free(&t, u0, horizon, 1e-2)).unwrap();
    let mass: Vec<f64> = traj.states.iter().map(|u| weighted_sum(&t, u, |v| v)).collect();
    let energy: Vec<f64> = traj.states.iter().map(|u| weighted_sum(&t, u, |v| v * v)).collect();
    for w in energy.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    let drift = (mass.last().unwrap() - mass[0]).abs() / horizon;
    assert!(drift < 1e-8, "{drift:e}");
}

#[test]
fn implicit_euler_is_first_order_in_time() {
    let t = circle_table(128);
    let u0: Vec<f64> = t.base.params().iter().map(|x| (2.0 * x).cos() + (x * 3.0).sin()).collect();
    let end = |dt: f64| solve_linear(&LinearHeatProblem::free(&t, u0.clone(), 0.2, dt)).unwrap().states.pop().unwrap();
    let (a, b, c) = (end(2e-2), end(1e-2), end(5e-3));
    let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let order = (diff(&a, &b) / diff(&b, &c)).log2();
    assert!(order >= 0.9, "{order}");
}

#[test]
fn schauder_ratio_is_finite_and_mesh_stable() {
    let ratio = |n: usize| {
        let t = circle_table(n);
        let mut p = LinearHeatProblem::free(&t, t.base.params().iter().map(|x| x.cos()).collect(), 0.1, 1e-3);
        p.forcing_g = t.base.params().iter().map(|x| 0.5 + x.cos()).collect();
        let traj = solve_linear(&p).unwrap();
        schauder_diagnostic(&traj, &p, 0.1).ratio
    };
    let (a, b) = (ratio(256), ratio(512));
    assert!(a.is_finite() && b.is_finite());
    assert!((a - b).abs() / b < 0.1, "{a} vs {b}");
}

#[test]
fn pure_decay_does_not_grow_the_strong_norm() {
    let t = circle_table(256);
    let p = LinearHeatProblem::free(&t, t.base.params().iter().map(|x| x.cos()).collect(), 0.1, 1e-3);
    let traj = solve_linear(&p).unwrap();
    assert!(schauder_diagnostic(&traj, &p, 0.1).ratio <= 1.0 + 1e-9);
}
