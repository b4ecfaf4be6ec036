//! Right-hand side of the height-function equation over a reference curve.
//!
//! With `Phi_{xi u}(x) = x + xi u(x) nu(x)` and `K_{xi u}` the deformed-distance
//! kernel, the remainders are
//!
//! `R1(x) = 2 int_0^1 int_0^t' int (u(y) - u(x)) d/dxi[(1 + Q1(y, xi u)) K_{xi u}(y, x)] dy dxi dt'`
//!
//! `R2(x) = int_0^1 int_0^t' int |nu(y) - nu(x)|^2 d/dxi[(1 + Q1) K_{xi u}] dy dxi dt'
//!         + 2 int_0^1 int (nu(y) - nu(x)) . Q2(y, t' u) K_{t' u}(y, x) dy dt'`
//!
//! and they complete the Jacobi operator to the exact curvature of the graph:
//! `-H_E(x + u nu) = L[u] - H_Sigma + R1 + R2 u`. The inner triangle is
//! collapsed to `int_0^1 (1 - xi) (...) dxi`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_deformed, HeightField, NormalVariation, ReferenceCurve};
use crate::nonlocal::{fractional_mean_curvature, graph_nodes, NonlocalOperatorTable};
use crate::norms;
use crate::quadrature::SingularRule;
use crate::special::GaussLegendre;
use crate::{rot, spectral, Vec2};

/// Gauss-Legendre points used for the `xi` integrals.
pub const XI_POINTS: usize = 8;
/// Step of the centered difference in `xi` for `d/dxi Q1`.
pub const XI_STEP: f64 = 1e-5;

/// Per-node ingredients of one member `xi u` of the deformation family.
struct FamilyMember {
    xi: f64,
    weight: f64,
    phi: Vec<Vec2>,
    one_plus_q1: Vec<f64>,
    dq1: Vec<f64>,
    q2: Vec<Vec2>,
}

fn family(base: &ReferenceCurve, u: &[f64], points: usize) -> Result<Vec<FamilyMember>> {
    let variation = NormalVariation::new(base, u)?;
    let gl = GaussLegendre::new(points);
    gl.nodes
        .iter()
        .zip(&gl.weights)
        .map(|(&xi, &weight)| {
            let q = variation.q_factors(base, xi)?;
            let plus = variation.q_factors(base, xi + XI_STEP)?;
            let minus = variation.q_factors(base, xi - XI_STEP)?;
            let scaled: Vec<f64> = u.iter().map(|v| xi * v).collect();
            Ok(FamilyMember {
                xi,
                weight,
                phi: graph_nodes(base, &scaled),
                one_plus_q1: q.q1.iter().map(|v| 1.0 + v).collect(),
                dq1: plus.q1.iter().zip(&minus.q1).map(|(a, b)| (a - b) / (2.0 * XI_STEP)).collect(),
                q2: q.q2,
            })
        })
        .collect()
}

/// `R1` and `R2` at every node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Remainders {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
}

pub fn remainders(base: &ReferenceCurve, u: &HeightField) -> Result<Remainders> {
    remainders_with(base, u, XI_POINTS)
}

/// Remainders with a configurable number of `xi` quadrature points.
pub fn remainders_with(base: &ReferenceCurve, u: &HeightField, points: usize) -> Result<Remainders> {
    u.check_aligned(base)?;
    let members = family(base, u.values(), points)?;
    let rule = SingularRule::for_order(u.s());
    let p = rule.exponent();
    let n = base.len();
    let h = std::f64::consts::TAU / n as f64;
    let uv = u.values();
    let nu = base.normal();
    let sp = base.speed();
    let unu: Vec<Vec2> = nu.iter().zip(uv).map(|(v, a)| v * *a).collect();
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut r1, mut r2) = (0.0, 0.0);
            for m in &members {
                let (mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let w = rule.weight(i, j, n) * sp[j];
                    let d = m.phi[j] - m.phi[i];
                    let r2inv = 1.0 / d.norm_squared();
                    let k = r2inv.powf(0.5 * p);
                    let dk = -p * k * r2inv * d.dot(&(unu[j] - unu[i]));
                    let g = m.dq1[j] * k + m.one_plus_q1[j] * dk;
                    let dnu = nu[j] - nu[i];
                    a1 += w * (uv[j] - uv[i]) * g;
                    a2 += w * dnu.norm_squared() * g;
                    a3 += w * dnu.dot(&m.q2[j]) * k;
                }
                r1 += m.weight * (1.0 - m.xi) * 2.0 * a1;
                r2 += m.weight * ((1.0 - m.xi) * a2 + 2.0 * a3);
            }
            (h * r1, h * r2)
        })
        .collect();
    let (r1, r2) = rows.into_iter().unzip();
    Ok(Remainders { r1, r2 })
}

pub fn remainder_r1(base: &ReferenceCurve, u: &HeightField) -> Result<Vec<f64>> {
    Ok(remainders(base, u)?.r1)
}

pub fn remainder_r2(base: &ReferenceCurve, u: &HeightField) -> Result<Vec<f64>> {
    Ok(remainders(base, u)?.r2)
}

/// Directional derivative of `R1` at `u` in the direction `w`, obtained by
/// differentiating the integrand in closed form. `Q1` is affine in `xi u`,
/// with slope `c(u) = rot((u nu)') . nu / |gamma'|`, which is used here.
pub fn remainder_r1_derivative(base: &ReferenceCurve, u: &HeightField, w: &HeightField) -> Result<Vec<f64>> {
    u.check_aligned(base)?;
    w.check_aligned(base)?;
    let rule = SingularRule::for_order(u.s());
    let p = rule.exponent();
    let n = base.len();
    let h = std::f64::consts::TAU / n as f64;
    let x = base.nodes();
    let nu = base.normal();
    let sp = base.speed();
    let uv = u.values();
    let wv = w.values();
    let slope = |vals: &[f64]| -> Vec<f64> {
        let vnu: Vec<Vec2> = nu.iter().zip(vals).map(|(a, b)| a * *b).collect();
        spectral::derivative_points(&vnu, 1)
            .iter()
            .zip(nu)
            .zip(sp)
            .map(|((d, v), s)| rot(*d).dot(v) / s)
            .collect()
    };
    let cu = slope(uv);
    let cw = slope(wv);
    let unu: Vec<Vec2> = nu.iter().zip(uv).map(|(a, b)| a * *b).collect();
    let wnu: Vec<Vec2> = nu.iter().zip(wv).map(|(a, b)| a * *b).collect();
    let gl = GaussLegendre::new(XI_POINTS);
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut total = 0.0;
            for (&xi, &gw) in gl.nodes.iter().zip(&gl.weights) {
                let mut acc = 0.0;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let du = unu[j] - unu[i];
                    let dw = wnu[j] - wnu[i];
                    let d = x[j] - x[i] + du * xi;
                    let r2inv = 1.0 / d.norm_squared();
                    let k = r2inv.powf(0.5 * p);
                    let a = d.dot(&du);
                    let b = d.dot(&dw);
                    let dk_u = -p * k * r2inv * a;
                    let dk_w = -p * k * r2inv * b;
                    let d_dk_u = -p * k * r2inv * ((-p - 2.0) * r2inv * xi * b * a + xi * dw.dot(&du) + b);
                    let g = cu[j] * k + (1.0 + xi * cu[j]) * dk_u;
                    let dg = cw[j] * k + cu[j] * xi * dk_w + xi * cw[j] * dk_u + (1.0 + xi * cu[j]) * d_dk_u;
                    acc += rule.weight(i, j, n) * sp[j] * ((wv[j] - wv[i]) * g + (uv[j] - uv[i]) * dg);
                }
                total += gw * (1.0 - xi) * 2.0 * acc;
            }
            h * total
        })
        .collect())
}

/// `1 + Q = J / (1 + Q1) = 1 / (nu_E . nu)` at the full height.
pub fn q_velocity_factor(base: &ReferenceCurve, u: &HeightField) -> Result<Vec<f64>> {
    u.check_aligned(base)?;
    let q = NormalVariation::new(base, u.values())?.q_factors(base, 1.0)?;
    q.q1.iter()
        .zip(&q.q3)
        .enumerate()
        .map(|(node, (q1, q3))| {
            let cos = 1.0 + q1;
            if cos <= 0.0 {
                Err(Error::FoldOver { node, jacobian: 1.0 + q3 })
            } else {
                Ok((1.0 + q3) / cos)
            }
        })
        .collect()
}

/// Components of the right-hand side of the height equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhsBreakdown {
    pub linear: Vec<f64>,
    pub h_sigma_s: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2_times_h: Vec<f64>,
    pub q_factor: Vec<f64>,
    /// `P = Q (L[u] - H_Sigma) + (1 + Q)(R1 + R2 u)`.
    pub p: Vec<f64>,
    pub total: Vec<f64>,
    pub r3_bar: Option<f64>,
}

impl RhsBreakdown {
    /// Largest deviation of `total` from `q_factor (linear - h_sigma_s + r1 + r2_times_h [+ r3_bar])`.
    pub fn construction_residual(&self) -> f64 {
        let extra = self.r3_bar.unwrap_or(0.0);
        (0..self.total.len())
            .map(|i| {
                let expect = self.q_factor[i]
                    * (self.linear[i] - self.h_sigma_s[i] + self.r1[i] + self.r2_times_h[i] + extra);
                (self.total[i] - expect).abs()
            })
            .fold(0.0, f64::max)
    }
}

struct Pieces {
    linear: Vec<f64>,
    rem: Remainders,
    r2_times_h: Vec<f64>,
    q_factor: Vec<f64>,
}

fn pieces(table: &NonlocalOperatorTable, u: &HeightField) -> Result<Pieces> {
    check_table_order(table, u)?;
    let linear = table.jacobi_apply(u.values())?;
    let rem = remainders(&table.base, u)?;
    let r2_times_h = rem.r2.iter().zip(u.values()).map(|(a, b)| a * b).collect();
    let q_factor = q_velocity_factor(&table.base, u)?;
    Ok(Pieces { linear, rem, r2_times_h, q_factor })
}

fn check_table_order(table: &NonlocalOperatorTable, u: &HeightField) -> Result<()> {
    u.check_aligned(&table.base)?;
    if table.s != u.s() {
        return Err(Error::InvalidParameter(format!(
            "table order s = {} differs from height order s = {}",
            table.s,
            u.s()
        )));
    }
    Ok(())
}

fn breakdown(table: &NonlocalOperatorTable, pc: Pieces, r3_bar: Option<f64>) -> RhsBreakdown {
    let n = table.len();
    let extra = r3_bar.unwrap_or(0.0);
    let hs = &table.h_sigma_s;
    let mut p = Vec::with_capacity(n);
    let mut total = Vec::with_capacity(n);
    for i in 0..n {
        let inner = pc.linear[i] - hs[i] + pc.rem.r1[i] + pc.r2_times_h[i];
        let t = pc.q_factor[i] * (inner + extra);
        total.push(t);
        p.push(pc.q_factor[i] * inner - pc.linear[i] + hs[i]);
    }
    RhsBreakdown {
        linear: pc.linear,
        h_sigma_s: hs.clone(),
        r1: pc.rem.r1,
        r2_times_h: pc.r2_times_h,
        q_factor: pc.q_factor,
        p,
        total,
        r3_bar,
    }
}

/// Right-hand side `L[u] + P - H_Sigma` of the plain flow.
pub fn assemble_p(table: &NonlocalOperatorTable, u: &HeightField) -> Result<RhsBreakdown> {
    let pc = pieces(table, u)?;
    Ok(breakdown(table, pc, None))
}

fn r3_from_pieces(table: &NonlocalOperatorTable, u: &HeightField, pc: &Pieces) -> Result<f64> {
    let q = NormalVariation::new(&table.base, u.values())?.q_factors(&table.base, 1.0)?;
    let w = table.base.weights();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..table.len() {
        let jac = 1.0 + q.q3[i];
        let curv = -pc.linear[i] + table.h_sigma_s[i] - pc.rem.r1[i] - pc.r2_times_h[i];
        num += curv * jac * w[i];
        den += jac * w[i];
    }
    Ok(num / den)
}

/// `R3 = int (-L[u] + H_Sigma - R1 - R2 u)(1 + Q3) / int (1 + Q3)`, the mean
/// fractional curvature of the graph.
pub fn r3_bar(table: &NonlocalOperatorTable, u: &HeightField) -> Result<f64> {
    let pc = pieces(table, u)?;
    r3_from_pieces(table, u, &pc)
}

/// Right-hand side `(1 + Q)(L[u] - H_Sigma + R1 + R2 u + R3)` of the
/// volume-preserving flow.
pub fn assemble_volume(table: &NonlocalOperatorTable, u: &HeightField) -> Result<RhsBreakdown> {
    let pc = pieces(table, u)?;
    let r3 = r3_from_pieces(table, u, &pc)?;
    Ok(breakdown(table, pc, Some(r3)))
}

/// Residual of `-H_E(x + u nu) = L[u] - H_Sigma + R1 + R2 u`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_c0: f64,
    pub residual_alpha: f64,
}

pub fn rhs_consistency(table: &NonlocalOperatorTable, u: &HeightField) -> Result<ConsistencyReport> {
    let pc = pieces(table, u)?;
    let deformed = build_deformed(&table.base, u)?;
    let lhs: Vec<f64> = fractional_mean_curvature(&deformed, u.s())?.into_iter().map(|v| -v).collect();
    let rhs: Vec<f64> = (0..table.len())
        .map(|i| pc.linear[i] - table.h_sigma_s[i] + pc.rem.r1[i] + pc.r2_times_h[i])
        .collect();
    let residual: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let residual_c0 = norms::sup_norm(&residual);
    let residual_alpha = norms::holder_norm(&residual, &table.base, u.alpha());
    Ok(ConsistencyReport { lhs, rhs, residual, residual_c0, residual_alpha })
}
