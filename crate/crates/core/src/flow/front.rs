//! Direct node motion by `V = -H^s nu`, used as an independent reference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{first_self_intersection, ReferenceCurve};
use crate::nonlocal::fractional_mean_curvature;
use crate::spectral::TrigInterpolant;
use crate::Vec2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontSnapshot {
    pub t: f64,
    pub nodes: Vec<Vec2>,
}

/// Explicit Euler `x <- x - dt H^s(x) nu(x)` followed by redistribution to
/// equal arclength; snapshots every `record_every` steps and at the end.
pub fn front_tracking_reference(
    initial: &[Vec2],
    s: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<FrontSnapshot>> {
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and T >= 0, got dt = {dt}, T = {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut nodes = redistribute_arclength(ReferenceCurve::from_nodes(initial.to_vec())?.nodes());
    let mut out = vec![FrontSnapshot { t: 0.0, nodes: nodes.clone() }];
    for m in 0..steps {
        let curve = ReferenceCurve::from_nodes(nodes)?;
        let hs = fractional_mean_curvature(&curve, s)?;
        let step = dt.min(t_end - m as f64 * dt);
        let moved: Vec<Vec2> = curve
            .nodes()
            .iter()
            .zip(curve.normal())
            .zip(&hs)
            .map(|((x, nu), h)| x - nu * (step * h))
            .collect();
        if let Some((a, _)) = first_self_intersection(&moved) {
            return Err(Error::FoldOver { node: a, jacobian: 0.0 });
        }
        nodes = truncate_high_modes(&redistribute_arclength(&moved));
        let t = (m + 1) as f64 * dt;
        if (m + 1) % record_every.max(1) == 0 || m + 1 == steps {
            out.push(FrontSnapshot { t: t.min(t_end), nodes: nodes.clone() });
        }
    }
    Ok(out)
}

/// Truncates modes `|k| > N/3`, where the directly discretized curvature is
/// not dissipative.
fn truncate_high_modes(nodes: &[Vec2]) -> Vec<Vec2> {
    let n = nodes.len() as i64;
    crate::spectral::filter_points(nodes, |k| if 3 * k.abs() > n { 0.0 } else { 1.0 })
}

/// Resamples the trigonometric interpolant at equal arclength spacing,
/// starting from the point at parameter zero.
pub fn redistribute_arclength(nodes: &[Vec2]) -> Vec<Vec2> {
    let n = nodes.len();
    let interp = TrigInterpolant::new(nodes);
    let fine = 16 * n;
    let h = std::f64::consts::TAU / fine as f64;
    let speeds: Vec<f64> = (0..fine).map(|k| interp.eval(k as f64 * h).1.norm()).collect();
    let mut cumulative = Vec::with_capacity(fine + 1);
    cumulative.push(0.0);
    for k in 0..fine {
        let next = speeds[(k + 1) % fine];
        cumulative.push(cumulative[k] + 0.5 * h * (speeds[k] + next));
    }
    let total = cumulative[fine];
    (0..n)
        .map(|j| {
            let target = total * j as f64 / n as f64;
            let k = cumulative.partition_point(|c| *c <= target).saturating_sub(1).min(fine - 1);
            let frac = (target - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
            let mut theta = (k as f64 + frac) * h;
            // Newton on the exact arclength from the bracketing fine node.
            for _ in 0..3 {
                let len = cumulative[k] + interp.arclength_between(k as f64 * h, theta);
                let (_, d) = interp.eval(theta);
                theta -= (len - target) / d.norm();
            }
            interp.eval(theta).0
        })
        .collect()
}

/// Symmetric Hausdorff distance between two closed curves, each refined by
/// trigonometric interpolation to `upsample` times its node count.
pub fn hausdorff_distance(a: &[Vec2], b: &[Vec2], upsample: usize) -> f64 {
    let fa = refine(a, upsample);
    let fb = refine(b, upsample);
    directed(&fa, &fb).max(directed(&fb, &fa))
}

fn refine(nodes: &[Vec2], factor: usize) -> Vec<Vec2> {
    let interp = TrigInterpolant::new(nodes);
    let m = nodes.len() * factor.max(1);
    crate::spectral::grid(m).into_iter().map(|t| interp.eval(t).0).collect()
}

fn directed(from: &[Vec2], to: &[Vec2]) -> f64 {
    let m = to.len();
    from.par_iter()
        .map(|p| {
            (0..m)
                .map(|k| point_segment_distance(*p, to[k], to[(k + 1) % m]))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t - p).norm()
}

/// Mean distance of the nodes from `center`.
pub fn mean_radius(nodes: &[Vec2], center: Vec2) -> f64 {
    nodes.iter().map(|p| (p - center).norm()).sum::<f64>() / nodes.len() as f64
}
