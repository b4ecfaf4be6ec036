use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::spline::PeriodicSpline;
use crate::geometry::{curve, Differentiation, HeightField, ReferenceCurve};
use crate::{spectral, Vec2};

/// Smooth reference curve together with the height of the raw curve over it.
#[derive(Debug, Clone, Serialize)]
pub struct Mollified {
    pub reference: ReferenceCurve,
    pub h0: HeightField,
    /// Gaussian width in wavenumber units; zero when no smoothing was applied.
    pub sigma: f64,
    pub h0_c0: f64,
    pub h0_c2: f64,
    /// Largest tangential offset of the projected point from the normal line.
    pub projection_residual: f64,
}

/// Relative Fourier tail above which a curve counts as under-resolved.
pub const RESOLVED_TAIL: f64 = 1e-10;

const SIGMA_MAX: f64 = 1.0;
const BISECTION_STEPS: usize = 40;

/// Whether the modes `|k| > N/4` are negligible against the `|k| = 1` modes.
pub fn is_resolved(nodes: &[Vec2]) -> bool {
    let n = nodes.len();
    let c = spectral::coefficients(&spectral::to_complex(nodes));
    let scale = c[1].norm() + c[n - 1].norm();
    let tail = c
        .iter()
        .enumerate()
        .filter(|(idx, _)| spectral::wavenumber(*idx, n).unsigned_abs() as usize > n / 4)
        .fold(0.0_f64, |m, (_, v)| m.max(v.norm()));
    tail <= RESOLVED_TAIL * scale
}

/// Builds a smooth reference curve whose normal graph reproduces `raw` with
/// a height below `epsilon` in sup norm.
///
/// Modes `k = 0, +-1` are never damped so circles, ellipses and translations
/// pass through unchanged; curves already resolved at the sampling scale are
/// returned as their own reference with zero height.
pub fn mollify_reference(raw: &[Vec2], epsilon: f64, s: f64, alpha: f64) -> Result<Mollified> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let raw_curve = ReferenceCurve::with_differentiation(raw.to_vec(), Differentiation::FiniteDifference)?;
    let raw_nodes = raw_curve.nodes().to_vec();
    if let Some((a, b)) = curve::first_self_intersection(&raw_nodes) {
        return Err(Error::EmbeddingLost { a, b });
    }
    if is_resolved(&raw_nodes) {
        let reference = ReferenceCurve::from_nodes(raw_nodes)?;
        let h0 = HeightField::zeros(reference.len(), s, alpha)?;
        return Ok(Mollified { reference, h0, sigma: 0.0, h0_c0: 0.0, h0_c2: 0.0, projection_residual: 0.0 });
    }

    let spline = PeriodicSpline::new(&raw_nodes);
    let band = raw_curve.admissibility_bound();
    let attempt = |sigma: f64| -> Result<Mollified> {
        let filtered = spectral::filter_points(&raw_nodes, |k| {
            if k.abs() <= 1 {
                1.0
            } else {
                (-0.5 * (sigma * k as f64).powi(2)).exp()
            }
        });
        if let Some((a, b)) = curve::first_self_intersection(&filtered) {
            return Err(Error::EmbeddingLost { a, b });
        }
        let reference = ReferenceCurve::from_nodes(filtered)?;
        let band = band.min(reference.admissibility_bound());
        let (values, residual) = project_heights(&reference, &spline, band)?;
        let (h0_c0, h0_c2) = c0_c2(&reference, &values);
        Ok(Mollified {
            h0: HeightField::new(values, s, alpha)?,
            reference,
            sigma,
            h0_c0,
            h0_c2,
            projection_residual: residual,
        })
    };

    let mut best: Option<Mollified> = None;
    let mut last_err = None;
    match attempt(SIGMA_MAX) {
        Ok(m) if m.h0_c0 < epsilon => return Ok(m),
        Ok(_) => {}
        Err(e) => last_err = Some(e),
    }
    let (mut lo, mut hi) = (0.0, SIGMA_MAX);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Ok(m) if m.h0_c0 < epsilon => {
                lo = mid;
                best = Some(m);
            }
            Ok(_) => hi = mid,
            Err(e) => {
                hi = mid;
                last_err = Some(e);
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::NoGraphRepresentation { node: 0 }))
}

/// Height of the spline over each reference node along the normal line,
/// requiring a unique hit inside the band and an order-preserving map.
fn project_heights(reference: &ReferenceCurve, spline: &PeriodicSpline, band: f64) -> Result<(Vec<f64>, f64)> {
    let n = reference.len();
    let mut values = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    let mut residual = 0.0_f64;
    for node in 0..n {
        let x = reference.nodes()[node];
        let tau = reference.tangent()[node];
        let hits = spline.normal_line_hits(x, tau, band);
        if hits.len() != 1 {
            return Err(Error::NoGraphRepresentation { node });
        }
        let hit = hits[0];
        residual = residual.max((hit.point - x).dot(&tau).abs());
        values.push((hit.point - x).dot(&reference.normal()[node]));
        params.push(hit.param);
    }
    let segments = spline.segments() as f64;
    let mut turns = 0.0;
    for j in 0..n {
        let step = (params[(j + 1) % n] - params[j]).rem_euclid(segments);
        if step <= 0.0 || step >= 0.5 * segments {
            return Err(Error::NoGraphRepresentation { node: j });
        }
        turns += step;
    }
    if (turns - segments).abs() > 1e-6 * segments {
        return Err(Error::NoGraphRepresentation { node: 0 });
    }
    Ok((values, residual))
}

fn c0_c2(reference: &ReferenceCurve, values: &[f64]) -> (f64, f64) {
    let d1 = spectral::derivative(values, 1);
    let d2 = spectral::derivative(values, 2);
    let dspeed = spectral::derivative(reference.speed(), 1);
    let mut c0 = 0.0_f64;
    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for j in 0..values.len() {
        let sp = reference.speed()[j];
        c0 = c0.max(values[j].abs());
        c1 = c1.max((d1[j] / sp).abs());
        c2 = c2.max(((d2[j] * sp - d1[j] * dspeed[j]) / sp.powi(3)).abs());
    }
    (c0, c0 + c1 + c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn smooth_curves_are_fixed_points() {
        for pts in [shapes::circle(128, 1.0), shapes::ellipse(128, 1.0, 0.6)] {
            let m = mollify_reference(&pts, 0.005, 0.5, 0.1).unwrap();
            assert_eq!(m.sigma, 0.0);
            assert!(m.h0.values().iter().all(|v| *v == 0.0));
            assert_eq!(m.reference.nodes(), &pts[..]);
        }
    }

    #[test]
    fn bump_is_smoothed_below_epsilon() {
        let raw = shapes::bump_circle(256, 0.05, 0.6);
        assert!(!is_resolved(&raw));
        let m = mollify_reference(&raw, 0.01, 0.5, 0.1).unwrap();
        assert!(m.sigma > 0.0);
        assert!(m.h0_c0 < 0.01);
        assert!(m.projection_residual < 1e-10);
    }

    #[test]
    fn self_intersecting_input_is_rejected() {
        let pts: Vec<Vec2> = spectral::grid(64)
            .iter()
            .map(|t| Vec2::new(t.sin(), (2.0 * t).sin()))
            .collect();
        let r = mollify_reference(&pts, 0.01, 0.5, 0.1);
        assert!(matches!(r, Err(Error::EmbeddingLost { .. })), "{r:?}");
    }
}
