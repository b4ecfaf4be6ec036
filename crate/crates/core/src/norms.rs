//! Discrete Hölder norms over the nodes of a reference curve.
//!
//! Seminorms are suprema over all node pairs of `|v(y) - v(x)| / d^beta` with
//! `d = min(|y - x|, 1)`, the chordal distance capped at one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::ReferenceCurve;
use crate::{spectral, Vec2};

/// Discrete estimates of the Hölder scale norms of one sample vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormReport {
    pub c0: f64,
    pub c_alpha: f64,
    pub c1: f64,
    pub c1_alpha: f64,
    pub c1_s_alpha: f64,
}

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Seminorms for several exponents in one pairwise sweep. `diff(i, j)` is
/// the magnitude of the increment between nodes `i` and `j`.
pub fn pairwise_seminorms<F>(nodes: &[Vec2], betas: &[f64], diff: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = nodes.len();
    let zero = || vec![0.0_f64; betas.len()];
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = zero();
            for j in i + 1..n {
                let dv = diff(i, j);
                if dv == 0.0 {
                    continue;
                }
                let d = (nodes[j] - nodes[i]).norm().min(1.0);
                let log_d = d.ln();
                for (b, beta) in best.iter_mut().zip(betas) {
                    *b = b.max(dv * (-beta * log_d).exp());
                }
            }
            best
        })
        .reduce(zero, |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect())
}

pub fn holder_seminorm(values: &[f64], base: &ReferenceCurve, beta: f64) -> f64 {
    pairwise_seminorms(base.nodes(), &[beta], |i, j| (values[j] - values[i]).abs())[0]
}

/// `||v||_{C^0} + [v]_beta`.
pub fn holder_norm(values: &[f64], base: &ReferenceCurve, beta: f64) -> f64 {
    sup_norm(values) + holder_seminorm(values, base, beta)
}

/// Hölder norm of a vector field, with Euclidean increments.
pub fn holder_norm_vec(values: &[Vec2], base: &ReferenceCurve, beta: f64) -> f64 {
    let c0 = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    c0 + pairwise_seminorms(base.nodes(), &[beta], |i, j| (values[j] - values[i]).norm())[0]
}

/// Arclength derivative by spectral differentiation in the parameter.
pub fn tangential_derivative(values: &[f64], base: &ReferenceCurve) -> Vec<f64> {
    spectral::derivative(values, 1).iter().zip(base.speed()).map(|(d, s)| d / s).collect()
}

pub fn c1_s_alpha_norm(values: &[f64], base: &ReferenceCurve, s: f64, alpha: f64) -> NormReport {
    let du = tangential_derivative(values, base);
    let betas = [alpha, s + alpha];
    let u_semi = pairwise_seminorms(base.nodes(), &betas, |i, j| (values[j] - values[i]).abs());
    let du_semi = pairwise_seminorms(base.nodes(), &betas, |i, j| (du[j] - du[i]).abs());
    let c0 = sup_norm(values);
    let d0 = sup_norm(&du);
    let c_alpha = c0 + u_semi[0];
    NormReport {
        c0,
        c_alpha,
        c1: c0 + d0,
        c1_alpha: c_alpha + d0 + du_semi[0],
        c1_s_alpha: c0 + u_semi[1] + d0 + du_semi[1],
    }
}

/// Weighted norm `||u||_{C^{1+s+alpha}} + lambda0 ||u||_{C^0}`.
pub fn x_norm(values: &[f64], base: &ReferenceCurve, s: f64, alpha: f64, lambda0: f64) -> f64 {
    let r = c1_s_alpha_norm(values, base, s, alpha);
    r.c1_s_alpha + lambda0 * r.c0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    fn circle(n: usize) -> ReferenceCurve {
        ReferenceCurve::from_nodes(shapes::circle(n, 1.0)).unwrap()
    }

    #[test]
    fn constants_have_zero_seminorm() {
        let base = circle(64);
        let v = vec![-0.3; 64];
        assert_eq!(holder_seminorm(&v, &base, 0.25), 0.0);
        assert!((holder_norm(&v, &base, 0.25) - 0.3).abs() < 1e-15);
        let r = c1_s_alpha_norm(&v, &base, 0.5, 0.1);
        assert!((r.c1_s_alpha - 0.3).abs() < 1e-12);
    }

    #[test]
    fn cosine_derivative_norm() {
        let base = circle(128);
        let v: Vec<f64> = base.params().iter().map(|t| t.cos()).collect();
        let r = c1_s_alpha_norm(&v, &base, 0.5, 0.1);
        assert!((r.c0 - 1.0).abs() < 1e-12);
        assert!((r.c1 - 2.0).abs() < 1e-3);
        assert!(r.c0 <= r.c_alpha && r.c_alpha <= r.c1_alpha && r.c1_alpha <= r.c1_s_alpha);
    }
}
