use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckResult, VerifyConfig};
use crate::error::Result;
use crate::flow::{
    front_tracking_reference, hausdorff_distance, mean_radius, run, shrinking_circle_radius, step_fixed_point,
    FlowConfig, FlowMode, FlowState, StepSettings, StopReason,
};
use crate::geometry::shapes::{self, Shape};
use crate::geometry::{DeltaEpsilonBudget, HeightField, ReferenceCurve};
use crate::nonlocal::{
    comparability_range, first_variation, fractional_mean_curvature, kernel_ku, kernel_linearized,
    s_kappa_diagnostics, NonlocalOperatorTable,
};
use crate::norms::{c1_s_alpha_norm, holder_norm, sup_norm, tangential_derivative};
use crate::pde::{maximum_principle_check, schauder_diagnostic, solve_linear, LinearHeatProblem};
use crate::quadrature::kernel_exponent;
use crate::rhs::{remainders, rhs_consistency};
use crate::special::{circle_fractional_curvature, circle_fractional_laplacian_eigenvalue};
use crate::Vec2;

const FD_STEP: f64 = 1e-4;
/// Relative amplitude below which decaying modes are no longer fitted.
pub const AMPLITUDE_FLOOR: f64 = 1e-10;

fn guard(name: &str, anchor: &str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult::errored(name, anchor, &e))
}

fn unit_circle(n: usize) -> Result<ReferenceCurve> {
    ReferenceCurve::from_nodes(shapes::circle(n, 1.0))
}

fn cosine(base: &ReferenceCurve, s: f64, alpha: f64, amplitude: f64, k: u32) -> Result<HeightField> {
    HeightField::from_fn(base, s, alpha, |t| amplitude * (k as f64 * t).cos())
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let err = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    err / sup_norm(b)
}

fn curvature_of_moved(base: &ReferenceCurve, s: f64, field: &[Vec2], tau: f64) -> Result<Vec<f64>> {
    let moved: Vec<Vec2> = base.nodes().iter().zip(field).map(|(x, v)| x + v * tau).collect();
    fractional_mean_curvature(&ReferenceCurve::from_nodes(moved)?, s)
}

/// Analytic first variation of minus the curvature against a centered
/// difference of the curvature of the deformed curves, for normal fields
/// `cos 2 theta nu` and `nu`.
pub fn check_first_variation(base: &ReferenceCurve, s: f64) -> CheckResult {
    let name = "first_variation";
    let anchor = "first variation of the fractional curvature along a velocity field";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let zero = vec![Vec2::zeros(); base.len()];
        let zero_side = sup_norm(&first_variation(base, s, &zero)?);
        r.metric("zero_field_sup", zero_side);
        let mut worst = 0.0_f64;
        for (label, k) in [("cos2", Some(2.0)), ("dilation", None)] {
            let field: Vec<Vec2> = base
                .params()
                .iter()
                .zip(base.normal())
                .map(|(t, nu)| nu * k.map_or(1.0, |k: f64| (k * t).cos()))
                .collect();
            let analytic = first_variation(base, s, &field)?;
            let plus = curvature_of_moved(base, s, &field, FD_STEP)?;
            let minus = curvature_of_moved(base, s, &field, -FD_STEP)?;
            let fd: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| -(p - m) / (2.0 * FD_STEP)).collect();
            let err = max_rel(&analytic, &fd);
            worst = worst.max(err);
            r.metric(&format!("{label}_rel_err"), err);
            r.metric(&format!("{label}_analytic_mean"), analytic.iter().sum::<f64>() / analytic.len() as f64);
        }
        Ok(r.verdict(worst < 1e-3 && zero_side == 0.0))
    })
}

pub fn first_variation_check(config: &VerifyConfig) -> CheckResult {
    let base = match unit_circle(config.n.max(256)) {
        Ok(b) => b,
        Err(e) => return CheckResult::errored("first_variation", "first variation", &e),
    };
    let mut r = check_first_variation(&base, config.s);
    let expected = config.s * circle_fractional_curvature(config.s, 1.0);
    if let Some(mean) = r.metrics.get("dilation_analytic_mean").copied() {
        let err = (mean - expected).abs() / expected;
        r.metric("dilation_vs_closed_form", err);
        if err >= 1e-3 {
            r = r.verdict(false);
        }
    }
    r
}

/// Size, gradient and moment constants of the deformed kernel and of its
/// derivative, plus the two-sided comparability of deformed distances.
pub fn check_kernel_class(base: &ReferenceCurve, u: &HeightField, alpha: f64) -> CheckResult {
    let name = "kernel_class";
    let anchor = "deformed kernels belong to the singular kernel class, derivative bound linear in w";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let p = kernel_exponent(u.s());
        let (lo, hi, _) = comparability_range(base, u.values());
        r.metric("comparability_lo", lo).metric("comparability_hi", hi);

        let zero = HeightField::zeros(base.len(), u.s(), alpha)?;
        let k0 = s_kappa_diagnostics(&kernel_ku(base, &zero)?, base, alpha)?;
        r.metric("kappa1_zero", k0.kappa_i);

        let ku = s_kappa_diagnostics(&kernel_ku(base, u)?, base, alpha)?;
        r.metric("kappa1", ku.kappa_i).metric("kappa1_gradient", ku.kappa_ii).metric("psi_alpha_norm", ku.psi_alpha_norm);
        r.metric("kappa1_bound", 2f64.powf(p));

        let amplitudes = [0.0125, 0.025, 0.05];
        let mut kappa2 = Vec::new();
        for a in amplitudes {
            let w = cosine(base, u.s(), alpha, a, 3)?;
            let d = s_kappa_diagnostics(&kernel_linearized(base, u, &w)?, base, alpha)?;
            r.metric(&format!("kappa2_a{a}"), d.kappa_i);
            kappa2.push(d.kappa_i);
        }
        let ratios: Vec<f64> = kappa2.windows(2).map(|w| w[1] / w[0]).collect();
        let linear = ratios.iter().all(|q| (q / 2.0 - 1.0).abs() <= 0.15);
        r.metric("kappa2_doubling_min", ratios.iter().copied().fold(f64::INFINITY, f64::min));
        r.metric("kappa2_doubling_max", ratios.iter().copied().fold(0.0, f64::max));
        let pass = lo >= 0.5
            && hi <= 2.0
            && (k0.kappa_i - 1.0).abs() < 1e-12
            && ku.kappa_i <= 2f64.powf(p)
            && ku.passes.iter().all(|b| *b)
            && linear;
        Ok(r.verdict(pass))
    })
}

pub fn kernel_class_check(config: &VerifyConfig) -> CheckResult {
    let name = "kernel_class";
    guard(name, "kernel class", || {
        let base = unit_circle(config.n)?;
        let u = cosine(&base, config.s, config.alpha, 0.05, 2)?;
        let mut r = check_kernel_class(&base, &u, config.alpha);
        let fine = unit_circle(2 * config.n)?;
        let uf = cosine(&fine, config.s, config.alpha, 0.05, 2)?;
        let psi_fine = s_kappa_diagnostics(&kernel_ku(&fine, &uf)?, &fine, config.alpha)?.psi_alpha_norm;
        let psi = r.metrics.get("psi_alpha_norm").copied().unwrap_or(f64::NAN);
        let change = (psi_fine - psi).abs() / psi_fine;
        r.metric("psi_alpha_norm_refined", psi_fine).metric("psi_refinement_change", change);
        if !(change < 0.1) {
            r = r.verdict(false);
        }
        Ok(r)
    })
}

/// Log-log slopes of `||R1||_{C^alpha} / ||u||_{C^{1+s+alpha}}` and
/// `||R2||_{C^alpha}` against the amplitude of `u = a cos 2 theta`.
pub fn check_remainder_smallness(base: &ReferenceCurve, s: f64, alpha: f64, amplitudes: &[f64]) -> CheckResult {
    let name = "remainder_smallness";
    let anchor = "remainder estimate: R1 and R2 are small with the height";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let zero = remainders(base, &HeightField::zeros(base.len(), s, alpha)?)?;
        r.metric("zero_height_sup", sup_norm(&zero.r1).max(sup_norm(&zero.r2)));
        let constant = remainders(base, &HeightField::new(vec![0.02; base.len()], s, alpha)?)?;
        let spread = |v: &[f64]| {
            let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
            hi - lo
        };
        r.metric("constant_height_r1_spread", spread(&constant.r1));
        let (mut logs_a, mut logs_1, mut logs_2) = (Vec::new(), Vec::new(), Vec::new());
        for &a in amplitudes {
            let u = cosine(base, s, alpha, a, 2)?;
            let rem = remainders(base, &u)?;
            let ratio1 = holder_norm(&rem.r1, base, alpha) / c1_s_alpha_norm(u.values(), base, s, alpha).c1_s_alpha;
            let norm2 = holder_norm(&rem.r2, base, alpha);
            r.metric(&format!("r1_ratio_a{a}"), ratio1).metric(&format!("r2_norm_a{a}"), norm2);
            logs_a.push(a.ln());
            logs_1.push(ratio1.ln());
            logs_2.push(norm2.ln());
        }
        let slope1 = fitted_slope(&logs_a, &logs_1);
        let slope2 = fitted_slope(&logs_a, &logs_2);
        r.metric("r1_slope", slope1).metric("r2_slope", slope2);
        Ok(r.verdict((slope1 - 1.0).abs() <= 0.2 && (slope2 - 1.0).abs() <= 0.2))
    })
}

pub fn remainder_smallness_check(config: &VerifyConfig) -> CheckResult {
    match unit_circle(config.n) {
        Ok(base) => check_remainder_smallness(&base, config.s, config.alpha, &[0.0125, 0.025, 0.05]),
        Err(e) => CheckResult::errored("remainder_smallness", "remainder estimate", &e),
    }
}

/// `sup |D(A u) - A(D u)|` for `u = cos k theta` and each `k`, where `D` is
/// the arclength derivative. Exact commutation is asserted only on circles.
pub fn check_commutation_circle(base: &ReferenceCurve, s: f64, ks: &[u32]) -> CheckResult {
    let name = "commutation";
    let anchor = "commuting tangential differentiation with the fractional Laplacian";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let table = NonlocalOperatorTable::assemble(base, s)?;
        let mut worst = 0.0_f64;
        for &k in ks {
            let u: Vec<f64> = base.params().iter().map(|t| (k as f64 * t).cos()).collect();
            let lhs = tangential_derivative(&table.fractional_laplacian_apply(&u)?, base);
            let rhs = table.fractional_laplacian_apply(&tangential_derivative(&u, base))?;
            let gap = lhs.iter().zip(&rhs).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            r.metric(&format!("gap_k{k}"), gap);
            worst = worst.max(gap);
        }
        r.metric("gap_max", worst);
        let kappa = base.curvature();
        let is_circle = kappa.iter().all(|c| (c - kappa[0]).abs() < 1e-9 * kappa[0].abs().max(1.0));
        Ok(if is_circle { r.verdict(worst < 1e-6) } else { r.measured_only() })
    })
}

pub fn commutation_circle_check(config: &VerifyConfig) -> CheckResult {
    match unit_circle(config.n) {
        Ok(base) => check_commutation_circle(&base, config.s, &[0, 1, 2, 3, 4, 5]),
        Err(e) => CheckResult::errored("commutation", "commutation", &e),
    }
}

pub fn commutation_noncircle_check(config: &VerifyConfig) -> CheckResult {
    let mut r = match ReferenceCurve::from_nodes(shapes::ellipse(config.n, 1.0, 0.7)) {
        Ok(base) => check_commutation_circle(&base, config.s, &[1, 3]),
        Err(e) => CheckResult::errored("commutation", "commutation", &e),
    };
    r.name = "commutation_noncircle".into();
    r
}

pub fn circle_constant_curvature(config: &VerifyConfig) -> CheckResult {
    let name = "circle_constant_curvature";
    let anchor = "circles have constant fractional curvature";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let hs = fractional_mean_curvature(&unit_circle(config.n)?, config.s)?;
        let (lo, hi) = hs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let exact = circle_fractional_curvature(config.s, 1.0);
        let spread = (hi - lo) / exact;
        let err = (hs[0] - exact).abs() / exact;
        r.metric("node_spread", spread).metric("closed_form_rel_err", err).metric("value", hs[0]);
        Ok(r.verdict(spread < 1e-6))
    })
}

pub fn scaling_law(config: &VerifyConfig) -> CheckResult {
    let name = "scaling_law";
    let anchor = "homogeneity of the fractional curvature under dilations";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for radius in [0.5, 1.0, 2.0, 4.0] {
            let c = ReferenceCurve::from_nodes(shapes::circle(config.n, radius))?;
            xs.push(f64::ln(radius));
            ys.push(fractional_mean_curvature(&c, config.s)?[0].ln());
        }
        let slope = fitted_slope(&xs, &ys);
        r.metric("slope", slope).metric("expected", -config.s);
        Ok(r.verdict((slope + config.s).abs() < 1e-3))
    })
}

pub fn rhs_consistency_check(config: &VerifyConfig) -> CheckResult {
    let name = "rhs_consistency";
    let anchor = "parametrization of the fractional curvature of a normal graph";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let mut res = Vec::new();
        for n in [config.n, 2 * config.n] {
            let base = unit_circle(n)?;
            let table = NonlocalOperatorTable::assemble(&base, config.s)?;
            let u = cosine(&base, config.s, config.alpha, 0.05, 2)?;
            let rep = rhs_consistency(&table, &u)?;
            r.metric(&format!("residual_c0_n{n}"), rep.residual_c0);
            r.metric(&format!("residual_alpha_n{n}"), rep.residual_alpha);
            res.push(rep.residual_c0);
        }
        let order = (res[0] / res[1]).log2();
        r.metric("order", order);
        Ok(r.verdict(order >= 1.9 && res[1] < 1e-3))
    })
}

fn random_mode_sum(rng: &mut ChaCha8Rng, params: &[f64], modes: u32, scale: f64) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> =
        (0..=modes).map(|_| (rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale)).collect();
    params
        .iter()
        .map(|t| coeffs.iter().enumerate().map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin()).sum())
        .collect()
}

pub fn maximum_principle_trials(config: &VerifyConfig) -> CheckResult {
    let name = "maximum_principle";
    let anchor = "parabolic estimate: sup-norm bound from the maximum principle";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let base = ReferenceCurve::from_nodes(shapes::ellipse(config.n, 1.0, 0.7))?;
        let table = NonlocalOperatorTable::assemble(&base, config.s)?;
        let params = base.params();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (horizon, dt): (f64, f64) = (0.1, 2e-3);
        let steps = (horizon / dt).round() as usize;
        let mut failures = 0;
        let mut min_margin = f64::INFINITY;
        for trial in 0..20 {
            let g = random_mode_sum(&mut rng, &params, 4, 1.0);
            let (initial, forcing_f) = if trial % 2 == 0 {
                (vec![0.0; params.len()], Vec::new())
            } else {
                let u0 = random_mode_sum(&mut rng, &params, 6, 0.3);
                let shape = random_mode_sum(&mut rng, &params, 6, 2.0);
                let omega = rng.gen_range(20.0..200.0);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let f = (0..steps)
                    .map(|m| {
                        let w = (omega * m as f64 * dt + phase).sin();
                        shape.iter().map(|v| v * w).collect()
                    })
                    .collect();
                (u0, f)
            };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let problem = LinearHeatProblem {
                table: &table,
                forcing_f,
                forcing_g: g.iter().map(|v| sign * v).collect(),
                initial,
                horizon,
                dt,
            };
            let traj = solve_linear(&problem)?;
            let rep = maximum_principle_check(&traj, &problem);
            min_margin = min_margin.min(rep.margin);
            if !rep.holds {
                failures += 1;
            }
        }
        r.metric("trials", 20.0).metric("failures", failures as f64).metric("min_margin", min_margin);
        Ok(r.verdict(failures == 0))
    })
}

pub fn schauder_check(config: &VerifyConfig) -> CheckResult {
    let name = "schauder";
    let anchor = "parabolic Schauder estimate with a non-constructive constant";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        for n in [config.n, 2 * config.n] {
            let base = unit_circle(n)?;
            let table = NonlocalOperatorTable::assemble(&base, config.s)?;
            let u0: Vec<f64> = base.params().iter().map(|t| t.cos()).collect();
            let problem = LinearHeatProblem::free(&table, u0, 0.1, 1e-3);
            let traj = solve_linear(&problem)?;
            r.metric(&format!("decay_ratio_n{n}"), schauder_diagnostic(&traj, &problem, config.alpha).ratio);
        }
        let base = unit_circle(config.n)?;
        let table = NonlocalOperatorTable::assemble(&base, config.s)?;
        let g: Vec<f64> = base.params().iter().map(|t| 0.5 + t.cos()).collect();
        let mut ratios = Vec::new();
        for horizon in [0.05, 0.1, 0.2] {
            let mut problem = LinearHeatProblem::free(&table, vec![0.0; base.len()], horizon, 1e-3);
            problem.forcing_g = g.clone();
            let traj = solve_linear(&problem)?;
            let ratio = schauder_diagnostic(&traj, &problem, config.alpha).ratio;
            r.metric(&format!("forced_ratio_t{horizon}"), ratio);
            ratios.push(ratio);
        }
        let spread = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
        r.metric("forced_ratio_spread", spread);
        Ok(r.measured_only())
    })
}

/// Decay rates of `cos k theta` under the implicit scheme, with the first
/// order time error removed by Richardson extrapolation in `dt`.
pub fn fitted_decay_rates(n: usize, s: f64, ks: &[u32], horizon: f64, dt: f64) -> Result<Vec<f64>> {
    let base = unit_circle(n)?;
    let table = NonlocalOperatorTable::assemble(&base, s)?;
    let params = base.params();
    let initial: Vec<f64> = params.iter().map(|t| ks.iter().map(|k| (*k as f64 * t).cos()).sum()).collect();
    let rates_at = |step: f64| -> Result<Vec<f64>> {
        let traj = solve_linear(&LinearHeatProblem::free(&table, initial.clone(), horizon, step))?;
        Ok(ks
            .iter()
            .map(|&k| {
                let mode: Vec<f64> = params.iter().map(|t| (k as f64 * t).cos()).collect();
                let norm: f64 = mode.iter().map(|v| v * v).sum();
                let amps: Vec<f64> = traj
                    .states
                    .iter()
                    .map(|u| (u.iter().zip(&mode).map(|(a, b)| a * b).sum::<f64>() / norm).abs())
                    .collect();
                // Samples below the rounding floor of the slower modes are dropped.
                let (ts, logs): (Vec<f64>, Vec<f64>) = traj
                    .times
                    .iter()
                    .zip(&amps)
                    .filter(|(_, a)| **a > AMPLITUDE_FLOOR * amps[0])
                    .map(|(t, a)| (*t, a.ln()))
                    .unzip();
                -fitted_slope(&ts, &logs)
            })
            .collect())
    };
    let coarse = rates_at(dt)?;
    let fine = rates_at(0.5 * dt)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| 2.0 * f - c).collect())
}

pub fn spectral_decay_check(config: &VerifyConfig) -> CheckResult {
    let name = "spectral_decay";
    let anchor = "fractional heat equation on the circle: decay of Fourier modes";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let n = config.n.max(256);
        let ks = [1u32, 2, 3, 4, 5];
        let rates = fitted_decay_rates(n, config.s, &ks, 1.0, 2e-4)?;
        let mut worst = 0.0_f64;
        for (k, rate) in ks.iter().zip(&rates) {
            let mu = circle_fractional_laplacian_eigenvalue(config.s, *k);
            let err = (rate - mu).abs() / mu;
            worst = worst.max(err);
            r.metric(&format!("mu{k}_fitted"), *rate).metric(&format!("mu{k}_rel_err"), err);
        }
        r.metric("nodes", n as f64).metric("max_rel_err", worst);
        Ok(r.verdict(worst < 1e-3))
    })
}

pub fn circle_first_step_check(config: &VerifyConfig) -> CheckResult {
    let name = "circle_first_step";
    let anchor = "fixed-point map for the plain flow on a circle";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let dt = 1e-3;
        let base = unit_circle(config.n)?;
        let h = HeightField::zeros(config.n, config.s, config.alpha)?;
        let state = FlowState::new(base, h, DeltaEpsilonBudget::new(0.5, 0.05)?, FlowMode::Plain)?;
        let (next, rep) = step_fixed_point(&state, &StepSettings::new(dt))?;
        let hv = next.h.values();
        let mean = hv.iter().sum::<f64>() / hv.len() as f64;
        let spread = hv.iter().fold(0.0_f64, |m, v| m.max((v - mean).abs()));
        let lambda = circle_fractional_curvature(config.s, 1.0);
        let exact = shrinking_circle_radius(1.0, config.s, lambda, dt) - 1.0;
        let err = (mean - exact).abs();
        let bound = config.s * lambda * lambda * dt * dt;
        r.metric("h_mean", mean).metric("ode_increment", exact).metric("abs_err", err).metric("err_bound", bound);
        r.metric("nonuniformity", spread).metric("iterations", rep.iterations as f64);
        Ok(r.verdict(err <= bound && spread < 1e-10 && rep.converged))
    })
}

pub fn volume_stationary_circle_check(config: &VerifyConfig) -> CheckResult {
    let name = "volume_stationary_circle";
    let anchor = "volume-preserving flow keeps circles fixed";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let base = unit_circle(config.n)?;
        let h = HeightField::zeros(config.n, config.s, config.alpha)?;
        let mut state = FlowState::new(base, h, DeltaEpsilonBudget::new(0.5, 0.05)?, FlowMode::VolumePreserving)?;
        let settings = StepSettings::new(1e-3);
        let mut worst = 0.0_f64;
        for _ in 0..5 {
            let prev = state.h.clone();
            state = step_fixed_point(&state, &settings)?.0;
            let change = state.h.values().iter().zip(prev.values()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(change);
        }
        r.metric("max_step_change", worst);
        Ok(r.verdict(worst < 1e-6))
    })
}

pub fn contraction_check(config: &VerifyConfig) -> CheckResult {
    let name = "contraction";
    let anchor = "the time-discrete solution map is a contraction in the weighted space";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let cfg = FlowConfig {
            shape: Shape::Perturbed { radius: 1.0, amplitude: 0.03, mode: 2 },
            n: config.n,
            s: config.s,
            alpha: config.alpha,
            delta: 0.05,
            epsilon: 0.01,
            dt: 1e-3,
            t_end: 0.01,
            ..FlowConfig::default()
        };
        let out = run(&cfg.shape.sample(cfg.n), &cfg)?;
        let max_ratio = out.report.contraction_ratios.iter().flatten().copied().fold(0.0, f64::max);
        r.metric("max_ratio", max_ratio).metric("steps", out.report.steps as f64);
        r.metric("max_iterations", out.report.iterations.iter().copied().max().unwrap_or(0) as f64);
        Ok(r.verdict(max_ratio <= 0.5 && out.report.stop_reason == StopReason::Completed))
    })
}

/// One fixed-point step from a height of prescribed weighted norm `delta`
/// over the perturbed circle; returns the largest contraction ratio, or
/// `None` when the iteration stalled.
pub fn contraction_at_budget(n: usize, s: f64, alpha: f64, delta: f64, dt: f64) -> Result<Option<f64>> {
    let base = ReferenceCurve::from_nodes(shapes::perturbed_circle(n, 1.0, 0.03, 2))?;
    let unit = cosine(&base, s, alpha, 1.0, 3)?;
    let scale = delta / c1_s_alpha_norm(unit.values(), &base, s, alpha).c1_s_alpha;
    let h = unit.scaled(scale);
    let state = FlowState::new(base, h, DeltaEpsilonBudget::new(delta.clamp(0.02, 0.99), 0.01)?, FlowMode::Plain)?;
    match step_fixed_point(&state, &StepSettings::new(dt)) {
        Ok((_, rep)) => Ok(rep.max_ratio()),
        Err(crate::Error::NoContraction { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn contraction_scan(config: &VerifyConfig) -> CheckResult {
    let name = "contraction_scan";
    let anchor = "contraction constant grows with the budget";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        for delta in [0.05, 0.1, 0.2, 0.5] {
            match contraction_at_budget(config.n, config.s, config.alpha, delta, 1e-3)? {
                Some(rho) => r.metric(&format!("max_ratio_delta{delta}"), rho),
                None => r.metric(&format!("no_contraction_delta{delta}"), 1.0),
            };
        }
        let stalled = contraction_at_budget(config.n, config.s, config.alpha, 5.0, 1e-2)?.is_none();
        r.metric("no_contraction_at_norm5_dt0.01", if stalled { 1.0 } else { 0.0 });
        Ok(r.measured_only())
    })
}

pub fn shrinking_circle_check(config: &VerifyConfig) -> CheckResult {
    let name = "shrinking_circle";
    let anchor = "plain flow of a circle follows the separable radius law";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let (r0, n) = (4.0, config.n.max(256));
        let cfg = FlowConfig {
            shape: Shape::Circle { radius: r0 },
            n,
            s: config.s,
            alpha: config.alpha,
            delta: 0.5,
            epsilon: 0.05,
            dt: 1e-3,
            t_end: 0.1,
            ..FlowConfig::default()
        };
        let out = run(&cfg.shape.sample(n), &cfg)?;
        let lambda = circle_fractional_curvature(config.s, 1.0);
        let mut worst = 0.0_f64;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for rec in &out.trajectory {
            let radius = mean_radius(&rec.nodes, Vec2::zeros());
            let exact = shrinking_circle_radius(r0, config.s, lambda, rec.t);
            worst = worst.max((radius - exact).abs() / exact);
            xs.push((r0.powf(1.0 + config.s) - (1.0 + config.s) * lambda * rec.t).ln());
            ys.push(radius.ln());
        }
        let exponent = fitted_slope(&xs, &ys);
        r.metric("max_rel_err", worst).metric("initial_radius", r0).metric("fitted_exponent", exponent);
        r.metric("expected_exponent", 1.0 / (1.0 + config.s)).metric("final_time", out.report.final_time);
        let pass = worst < 1e-3
            && (exponent - 1.0 / (1.0 + config.s)).abs() < 1e-2
            && out.report.stop_reason == StopReason::Completed;
        Ok(r.verdict(pass))
    })
}

pub fn volume_area_check(config: &VerifyConfig) -> CheckResult {
    let name = "volume_area";
    let anchor = "volume-preserving flow conserves the enclosed area";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let cfg = FlowConfig {
            n: config.n,
            s: config.s,
            alpha: config.alpha,
            t_end: 0.05,
            mode: FlowMode::VolumePreserving,
            ..FlowConfig::default()
        };
        let out = run(&cfg.shape.sample(cfg.n), &cfg)?;
        let a0 = out.report.area_series[0];
        let drift = out.report.area_series.iter().fold(0.0_f64, |m, a| m.max((a - a0).abs() / a0));
        let deficit = &out.report.isoperimetric_deficit;
        let monotone = deficit.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        r.metric("max_rel_drift", drift).metric("deficit_monotone", if monotone { 1.0 } else { 0.0 });
        r.metric("deficit_start", deficit[0]).metric("deficit_end", *deficit.last().unwrap_or(&f64::NAN));
        Ok(r.verdict(drift < 1e-5 && out.report.stop_reason == StopReason::Completed))
    })
}

pub fn cross_integrator_check(config: &VerifyConfig) -> CheckResult {
    let name = "cross_integrator";
    let anchor = "height-function and front-tracking discretizations of the normal velocity law agree";
    guard(name, anchor, || {
        let mut r = CheckResult::new(name, anchor);
        let cfg = FlowConfig { n: config.n, s: config.s, alpha: config.alpha, t_end: 0.02, ..FlowConfig::default() };
        let initial = cfg.shape.sample(cfg.n);
        let height = run(&initial, &cfg)?;
        let front = front_tracking_reference(&initial, config.s, 1e-4, cfg.t_end, usize::MAX)?;
        let (a, b) = match (height.trajectory.last(), front.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(r.verdict(false)),
        };
        let d = hausdorff_distance(&a.nodes, &b.nodes, 8);
        r.metric("hausdorff", d).metric("height_time", a.t).metric("front_time", b.t);
        Ok(r.verdict(d < 5e-3 && (a.t - b.t).abs() < 1e-12))
    })
}
