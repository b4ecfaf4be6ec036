use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SampledCurve;
use crate::quadrature::SingularRule;
use crate::Vec2;

pub(crate) fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("order s = {s} must lie in (0, 1)")))
    }
}

/// Fractional mean curvature at every node, from the boundary form
/// `(2/s) int ((y - x) . nu(y)) |y - x|^{-(n+1+s)} dH_y`.
pub fn fractional_mean_curvature<C: SampledCurve + ?Sized>(curve: &C, s: f64) -> Result<Vec<f64>> {
    check_order(s)?;
    let rule = SingularRule::for_order(s);
    let p = rule.exponent();
    let nodes = curve.nodes();
    let normals = curve.normals();
    let speeds = curve.speeds();
    let n = nodes.len();
    let scale = nodes.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = nodes[i];
            for (j, y) in nodes.iter().enumerate() {
                if j != i && (y - x).norm() <= 1e-14 * scale {
                    return Err(Error::DegenerateSpacing { i, j });
                }
            }
            let sum = rule.integrate_row(i, n, |j| {
                let d = nodes[j] - x;
                d.dot(&normals[j]) * d.norm().powf(-p) * speeds[j]
            });
            Ok(2.0 / s * sum)
        })
        .collect()
}

/// First variation `2 int (X(y) - X(x)) . nu(y) |y - x|^{-(n+1+s)} dH_y` of
/// minus the fractional curvature along the vector field `field`.
pub fn first_variation<C: SampledCurve + ?Sized>(curve: &C, s: f64, field: &[Vec2]) -> Result<Vec<f64>> {
    check_order(s)?;
    crate::error::check_len(curve.len(), field.len())?;
    let rule = SingularRule::for_order(s);
    let p = rule.exponent();
    let nodes = curve.nodes();
    let normals = curve.normals();
    let speeds = curve.speeds();
    let n = nodes.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            2.0 * rule.integrate_row(i, n, |j| {
                (field[j] - field[i]).dot(&normals[j]) * (nodes[j] - nodes[i]).norm().powf(-p) * speeds[j]
            })
        })
        .collect())
}
