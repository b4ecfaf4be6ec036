use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{rot, spectral, Vec2};

/// Minimal view of a closed sampled curve needed by the boundary integrals.
pub trait SampledCurve {
    fn nodes(&self) -> &[Vec2];
    /// Outward unit normal per node.
    fn normals(&self) -> &[Vec2];
    /// Parametric speed `|gamma'(theta_j)|`.
    fn speeds(&self) -> &[f64];

    fn len(&self) -> usize {
        self.nodes().len()
    }

    fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }
}

/// How tangents and curvature are obtained from the node positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differentiation {
    Spectral,
    /// Second-order centered differences, for raw input that is only C^{1,1}.
    FiniteDifference,
}

/// Smooth closed reference curve sampled at `theta_j = 2 pi j / N`,
/// oriented counter-clockwise.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceCurve {
    nodes: Vec<Vec2>,
    tangent: Vec<Vec2>,
    normal: Vec<Vec2>,
    curvature: Vec<f64>,
    weights: Vec<f64>,
    speed: Vec<f64>,
    c11_norm: f64,
}

pub const MIN_NODES: usize = 8;

impl ReferenceCurve {
    /// Builds the curve with spectral differentiation. Clockwise input is
    /// reoriented by reversing the node order while keeping node 0 fixed.
    pub fn from_nodes(nodes: Vec<Vec2>) -> Result<Self> {
        Self::with_differentiation(nodes, Differentiation::Spectral)
    }

    pub fn with_differentiation(mut nodes: Vec<Vec2>, method: Differentiation) -> Result<Self> {
        let n = nodes.len();
        if n < MIN_NODES {
            return Err(Error::TooFewNodes { min: MIN_NODES, got: n });
        }
        if let Some(bad) = nodes.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidParameter(format!("node {bad} is not finite")));
        }
        let scale = nodes.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            let j = (i + 1) % n;
            if (nodes[j] - nodes[i]).norm() <= 1e-14 * scale {
                return Err(Error::DegenerateSpacing { i, j });
            }
        }
        if shoelace_area(&nodes) < 0.0 {
            nodes = (0..n).map(|j| nodes[(n - j) % n]).collect();
        }
        let (d1, d2) = match method {
            Differentiation::Spectral => {
                (spectral::derivative_points(&nodes, 1), spectral::derivative_points(&nodes, 2))
            }
            Differentiation::FiniteDifference => finite_differences(&nodes),
        };
        let h = TAU / n as f64;
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut speed = Vec::with_capacity(n);
        for (i, (a, b)) in d1.iter().zip(&d2).enumerate() {
            let sp = a.norm();
            if !(sp > 0.0) {
                return Err(Error::DegenerateSpacing { i, j: i });
            }
            let t = a / sp;
            tangent.push(t);
            normal.push(rot(t));
            curvature.push((a.x * b.y - a.y * b.x) / sp.powi(3));
            weights.push(h * sp);
            speed.push(sp);
        }
        let c11_norm = reach_curvature(&nodes, &normal, &curvature);
        Ok(Self { nodes, tangent, normal, curvature, weights, speed, c11_norm })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn tangent(&self) -> &[Vec2] {
        &self.tangent
    }

    pub fn normal(&self) -> &[Vec2] {
        &self.normal
    }

    /// Signed curvature, positive on convex arcs.
    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// Arclength quadrature weight `h |gamma'|` per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// Reciprocal of the largest two-sided rolling-ball radius.
    pub fn c11_norm(&self) -> f64 {
        self.c11_norm
    }

    /// Largest `max |h|` for which the normal graph map stays injective.
    pub fn admissibility_bound(&self) -> f64 {
        0.5 / self.c11_norm
    }

    pub fn param(&self, j: usize) -> f64 {
        TAU * j as f64 / self.len() as f64
    }

    pub fn params(&self) -> Vec<f64> {
        spectral::grid(self.len())
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Enclosed area of the trigonometric interpolant.
    pub fn area(&self) -> f64 {
        spectral_area(&self.nodes)
    }

    pub fn total_turning(&self) -> f64 {
        self.curvature.iter().zip(&self.weights).map(|(k, w)| k * w).sum()
    }

    pub fn centroid(&self) -> Vec2 {
        let total = self.length();
        self.nodes.iter().zip(&self.weights).map(|(p, w)| p * *w).sum::<Vec2>() / total
    }

    pub fn translated(&self, shift: Vec2) -> Self {
        let mut out = self.clone();
        out.nodes.iter_mut().for_each(|p| *p += shift);
        out
    }

    /// Integral of sampled values against arclength.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

impl SampledCurve for ReferenceCurve {
    fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    fn normals(&self) -> &[Vec2] {
        &self.normal
    }

    fn speeds(&self) -> &[f64] {
        &self.speed
    }
}

fn finite_differences(nodes: &[Vec2]) -> (Vec<Vec2>, Vec<Vec2>) {
    let n = nodes.len();
    let h = TAU / n as f64;
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        let prev = nodes[(i + n - 1) % n];
        let next = nodes[(i + 1) % n];
        d1.push((next - prev) / (2.0 * h));
        d2.push((next - 2.0 * nodes[i] + prev) / (h * h));
    }
    (d1, d2)
}

/// `max 2 |(y - x) . nu(x)| / |y - x|^2` over all pairs, together with the
/// local curvature; the inverse of the reach.
pub fn reach_curvature(nodes: &[Vec2], normal: &[Vec2], curvature: &[f64]) -> f64 {
    let local = curvature.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    let global = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let x = nodes[i];
            let nu = normal[i];
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| {
                    let d = y - x;
                    2.0 * d.dot(&nu).abs() / d.norm_squared()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    local.max(global)
}

/// Signed polygon area, positive for counter-clockwise order.
pub fn shoelace_area(nodes: &[Vec2]) -> f64 {
    let n = nodes.len();
    0.5 * (0..n)
        .map(|i| {
            let a = nodes[i];
            let b = nodes[(i + 1) % n];
            a.x * b.y - a.y * b.x
        })
        .sum::<f64>()
}

/// Signed area of the trigonometric interpolant through the nodes.
pub fn spectral_area(nodes: &[Vec2]) -> f64 {
    let d = spectral::derivative_points(nodes, 1);
    let h = TAU / nodes.len() as f64;
    0.5 * h * nodes.iter().zip(&d).map(|(p, v)| p.x * v.y - p.y * v.x).sum::<f64>()
}

/// Length of the closed polygon through the nodes.
pub fn polygon_length(nodes: &[Vec2]) -> f64 {
    let n = nodes.len();
    (0..n).map(|i| (nodes[(i + 1) % n] - nodes[i]).norm()).sum()
}

/// First pair of non-adjacent polygon edges that intersect, if any.
pub fn first_self_intersection(nodes: &[Vec2]) -> Option<(usize, usize)> {
    let n = nodes.len();
    for a in 0..n {
        let p0 = nodes[a];
        let p1 = nodes[(a + 1) % n];
        for b in a + 2..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            if segments_intersect(p0, p1, nodes[b], nodes[(b + 1) % n]) {
                return Some((a, b));
            }
        }
    }
    None
}

fn segments_intersect(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> bool {
    let cross = |o: Vec2, a: Vec2, b: Vec2| (a - o).perp(&(b - o));
    let d1 = cross(q0, q1, p0);
    let d2 = cross(q0, q1, p1);
    let d3 = cross(p0, p1, q0);
    let d4 = cross(p0, p1, q1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    let within = |o: Vec2, a: Vec2, p: Vec2| {
        p.x >= o.x.min(a.x) && p.x <= o.x.max(a.x) && p.y >= o.y.min(a.y) && p.y <= o.y.max(a.y)
    };
    (d1 == 0.0 && within(q0, q1, p0))
        || (d2 == 0.0 && within(q0, q1, p1))
        || (d3 == 0.0 && within(p0, p1, q0))
        || (d4 == 0.0 && within(p0, p1, q1))
}
