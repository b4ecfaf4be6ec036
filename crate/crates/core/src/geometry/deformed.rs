use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{HeightField, ReferenceCurve, SampledCurve};
use crate::{rot, spectral, Vec2};

/// The curve `Phi_h(x) = x + h(x) nu(x)` realized on the nodes of its base.
#[derive(Debug, Clone, Serialize)]
pub struct DeformedCurve {
    base: ReferenceCurve,
    height: HeightField,
    nodes: Vec<Vec2>,
    normal_e: Vec<Vec2>,
    tangential_jacobian: Vec<f64>,
    speed: Vec<f64>,
}

impl DeformedCurve {
    pub fn base(&self) -> &ReferenceCurve {
        &self.base
    }

    pub fn height(&self) -> &HeightField {
        &self.height
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    /// Unit normal of the deformed curve at `Phi(x_j)`.
    pub fn normal_e(&self) -> &[Vec2] {
        &self.normal_e
    }

    /// Ratio of arclength elements `|Phi'| / |gamma'|`.
    pub fn tangential_jacobian(&self) -> &[f64] {
        &self.tangential_jacobian
    }

    pub fn into_nodes(self) -> Vec<Vec2> {
        self.nodes
    }
}

impl SampledCurve for DeformedCurve {
    fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    fn normals(&self) -> &[Vec2] {
        &self.normal_e
    }

    fn speeds(&self) -> &[f64] {
        &self.speed
    }
}

/// Nodal factors of the normal decomposition
/// `(1 + Q1) nu + Q2 = J nu_E` at a scaled height `t' h`, with `Q3 = J - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct QFactors {
    pub q1: Vec<f64>,
    pub q2: Vec<Vec2>,
    pub q3: Vec<f64>,
}

/// Parameter derivative of `h nu`, shared by every member of the family
/// `Phi_{t' h}` since `Phi'_{t' h} = gamma' + t' (h nu)'`.
#[derive(Debug, Clone)]
pub struct NormalVariation {
    pub(crate) d_hnu: Vec<Vec2>,
}

impl NormalVariation {
    pub fn new(base: &ReferenceCurve, h: &[f64]) -> Result<Self> {
        crate::error::check_len(base.len(), h.len())?;
        let hnu: Vec<Vec2> = base.normal().iter().zip(h).map(|(nu, v)| nu * *v).collect();
        Ok(Self { d_hnu: spectral::derivative_points(&hnu, 1) })
    }

    /// `Phi'` of the scaled deformation, with the fold-over check.
    fn tangent_images(&self, base: &ReferenceCurve, tprime: f64) -> Result<Vec<Vec2>> {
        let gamma_dot = base.tangent().iter().zip(base.speed()).map(|(t, s)| t * *s);
        let mut out = Vec::with_capacity(base.len());
        for (node, (g, d)) in gamma_dot.zip(&self.d_hnu).enumerate() {
            let phi = g + d * tprime;
            let along = phi.dot(&g);
            if along <= 0.0 {
                return Err(Error::FoldOver { node, jacobian: along.signum() * phi.norm() / g.norm() });
            }
            out.push(phi);
        }
        Ok(out)
    }

    pub fn q_factors(&self, base: &ReferenceCurve, tprime: f64) -> Result<QFactors> {
        self.tangent_images(base, tprime)?;
        let n = base.len();
        let mut q1 = Vec::with_capacity(n);
        let mut q2 = Vec::with_capacity(n);
        let mut q3 = Vec::with_capacity(n);
        // Written in terms of the increment `e = t' (h nu)' / |gamma'|` so that
        // all three factors vanish exactly at zero height.
        for (((d, t), nu), sp) in self.d_hnu.iter().zip(base.tangent()).zip(base.normal()).zip(base.speed()) {
            let e = d * (tprime / sp);
            let re = rot(e);
            let a = re.dot(nu);
            q1.push(a);
            q2.push(re - nu * a);
            let stretch = 2.0 * t.dot(&e) + e.norm_squared();
            q3.push(stretch / ((t + e).norm() + 1.0));
        }
        Ok(QFactors { q1, q2, q3 })
    }
}

pub fn build_deformed(base: &ReferenceCurve, h: &HeightField) -> Result<DeformedCurve> {
    h.check_aligned(base)?;
    let variation = NormalVariation::new(base, h.values())?;
    let phi = variation.tangent_images(base, 1.0)?;
    let nodes: Vec<Vec2> = base
        .nodes()
        .iter()
        .zip(base.normal())
        .zip(h.values())
        .map(|((x, nu), v)| x + nu * *v)
        .collect();
    let speed: Vec<f64> = phi.iter().map(|p| p.norm()).collect();
    let normal_e = phi.iter().zip(&speed).map(|(p, s)| rot(*p) / *s).collect();
    let tangential_jacobian = speed.iter().zip(base.speed()).map(|(a, b)| a / b).collect();
    Ok(DeformedCurve {
        base: base.clone(),
        height: h.clone(),
        nodes,
        normal_e,
        tangential_jacobian,
        speed,
    })
}

pub fn build_q(base: &ReferenceCurve, h: &HeightField, tprime: f64) -> Result<QFactors> {
    h.check_aligned(base)?;
    NormalVariation::new(base, h.values())?.q_factors(base, tprime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    fn circle(n: usize) -> ReferenceCurve {
        ReferenceCurve::from_nodes(shapes::circle(n, 1.0)).unwrap()
    }

    #[test]
    fn zero_height_is_identity() {
        let base = circle(32);
        let h = HeightField::zeros(32, 0.5, 0.1).unwrap();
        let d = build_deformed(&base, &h).unwrap();
        for j in 0..32 {
            assert_eq!(d.nodes()[j], base.nodes()[j]);
            assert!((d.tangential_jacobian()[j] - 1.0).abs() < 1e-14);
            assert!((d.normal_e()[j] - base.normal()[j]).norm() < 1e-14);
        }
        let q = build_q(&base, &h, 0.7).unwrap();
        assert!(q.q1.iter().chain(&q.q3).all(|v| v.abs() < 1e-14));
        assert!(q.q2.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn constant_height_dilates_circle() {
        let base = circle(64);
        let h = HeightField::new(vec![0.1; 64], 0.5, 0.1).unwrap();
        let d = build_deformed(&base, &h).unwrap();
        let q = build_q(&base, &h, 1.0).unwrap();
        for j in 0..64 {
            assert!((d.nodes()[j].norm() - 1.1).abs() < 1e-14);
            assert!((d.tangential_jacobian()[j] - 1.1).abs() < 1e-12);
            assert!((q.q3[j] - 0.1).abs() < 1e-12);
            assert!(q.q2[j].norm() < 1e-12);
        }
    }

    #[test]
    fn excessive_inward_height_folds_over() {
        let base = circle(32);
        let h = HeightField::new(vec![-1.2; 32], 0.5, 0.1).unwrap();
        assert!(matches!(build_deformed(&base, &h), Err(Error::FoldOver { .. })));
    }
}
