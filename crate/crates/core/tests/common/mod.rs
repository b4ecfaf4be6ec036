//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use fmc_core::special::GaussLegendre;
use fmc_core::Vec2;

/// High-precision values of the circle eigenvalues `mu_k` at `s = 1/2`,
/// evaluated from the Gamma-function closed form in arbitrary precision.
pub const MU_HALF: [(u32, f64); 3] = [(1, 7.41629870920549), (3, 35.6688652204645), (8, 152.300944354210)];

/// Signed radial integral `int_eps^rmax sigma(rho) rho^{-1-s} d rho` along
/// the ray `x + rho d`, with `sigma = -1` inside the set and `+1` outside.
fn ray_integral(inside: &dyn Fn(Vec2) -> bool, x: Vec2, d: Vec2, s: f64, eps: f64, rmax: f64) -> f64 {
    let samples = 400;
    let at = |rho: f64| inside(x + d * rho);
    let mut breaks = vec![eps];
    let ratio = (rmax / eps).powf(1.0 / samples as f64);
    let mut prev_rho = eps;
    let mut prev_in = at(eps);
    for k in 1..=samples {
        let rho = eps * ratio.powi(k);
        let now = at(rho);
        if now != prev_in {
            let (mut lo, mut hi) = (prev_rho, rho);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if at(mid) == prev_in {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        prev_rho = rho;
        prev_in = now;
    }
    breaks.push(rmax);
    let antiderivative = |r: f64| -r.powf(-s) / s;
    let mut sign = if at(eps) { -1.0 } else { 1.0 };
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += sign * (antiderivative(w[1]) - antiderivative(w[0]));
        sign = -sign;
    }
    total
}

/// First radius at which the ray leaves its starting phase, or `rmax`.
fn first_crossing(inside: &dyn Fn(Vec2) -> bool, x: Vec2, d: Vec2, rmax: f64) -> f64 {
    let start = inside(x + d * 1e-14);
    let samples = 2000;
    let mut prev = 1e-14;
    for k in 1..=samples {
        let rho = 1e-14 * (rmax / 1e-14).powf(k as f64 / samples as f64);
        if inside(x + d * rho) != start {
            let (mut lo, mut hi) = (prev, rho);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if inside(x + d * mid) == start {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev = rho;
    }
    rmax
}

/// `int_{|y - x| > eps} (chi_{E^c} - chi_E)(y) |y - x|^{-(2+s)} dy` by polar
/// quadrature around `x`. Angles are measured from the outer normal; each
/// quarter is graded towards the tangent direction, with a breakpoint where
/// the first boundary crossing meets the cutoff circle.
pub fn volumetric_truncated(inside: &dyn Fn(Vec2) -> bool, x: Vec2, normal: Vec2, s: f64, eps: f64, rmax: f64) -> f64 {
    let gl = GaussLegendre::new(20);
    let tangent = Vec2::new(-normal.y, normal.x);
    let dir = |phi: f64| normal * phi.cos() + tangent * phi.sin();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    // Quarter q spans angles between a tangent direction and a normal one;
    // `t` is the angular distance from the tangent direction.
    for (tangent_angle, towards) in [(half_pi, -1.0), (half_pi, 1.0), (-half_pi, 1.0), (-half_pi, -1.0)] {
        let angle = |t: f64| tangent_angle + towards * t;
        let crossing = |t: f64| first_crossing(inside, x, dir(angle(t)), rmax);
        let mut cuts = vec![0.0];
        let (mut lo, mut hi) = (1e-12, half_pi);
        if (crossing(lo) - eps) * (crossing(hi) - eps) < 0.0 {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (crossing(mid) - eps) * (crossing(lo) - eps) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
        let start = *cuts.last().unwrap();
        let mut edge = start.max(1e-14);
        let mut graded = Vec::new();
        while edge < half_pi {
            graded.push(edge);
            edge *= 2.0;
        }
        if start == 0.0 {
            cuts.clear();
            cuts.push(0.0);
        }
        cuts.extend(graded.into_iter().filter(|c| *c > start));
        cuts.push(half_pi);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            total += (b - a) * gl.integrate(|xi| ray_integral(inside, x, dir(angle(a + (b - a) * xi)), s, eps, rmax));
        }
    }
    total + std::f64::consts::TAU * rmax.powf(-s) / s
}

/// Limit `eps -> 0` of the truncated integral by Richardson extrapolation
/// with exponents `1 - s`, `3 - s`, `5 - s`.
pub fn volumetric_curvature(inside: &dyn Fn(Vec2) -> bool, x: Vec2, normal: Vec2, s: f64, rmax: f64) -> f64 {
    let eps0 = 2e-2;
    let levels = 4;
    let mut table: Vec<f64> =
        (0..levels).map(|k| volumetric_truncated(inside, x, normal, s, eps0 / 2f64.powi(k), rmax)).collect();
    for (round, exponent) in [1.0 - s, 3.0 - s, 5.0 - s].into_iter().enumerate() {
        let factor = 2f64.powf(exponent);
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        if table.len() == 1 || round == 2 {
            break;
        }
    }
    table[0]
}
