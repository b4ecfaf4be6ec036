//! Periodic cubic interpolating spline with unit knot spacing.

use rustfft::num_complex::Complex64;

use crate::{spectral, Vec2};

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    points: Vec<Vec2>,
    moments: Vec<Vec2>,
}

/// Intersection of a line with the spline.
#[derive(Debug, Clone, Copy)]
pub struct LineHit {
    /// Global spline parameter in `[0, N)`; node `j` sits at `j`.
    pub param: f64,
    pub point: Vec2,
}

impl PeriodicSpline {
    pub fn new(points: &[Vec2]) -> Self {
        let n = points.len();
        // M_{j-1} + 4 M_j + M_{j+1} = 6 (P_{j+1} - 2 P_j + P_{j-1}) is circulant.
        let coeffs = spectral::coefficients(&spectral::to_complex(points));
        let solved: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let cosk = (std::f64::consts::TAU * idx as f64 / n as f64).cos();
                c * (6.0 * (2.0 * cosk - 2.0) / (4.0 + 2.0 * cosk))
            })
            .collect();
        let moments = spectral::from_complex(&spectral::synthesize(&solved));
        Self { points: points.to_vec(), moments }
    }

    pub fn segments(&self) -> usize {
        self.points.len()
    }

    fn ends(&self, seg: usize) -> (Vec2, Vec2, Vec2, Vec2) {
        let j1 = (seg + 1) % self.points.len();
        (self.points[seg], self.points[j1], self.moments[seg], self.moments[j1])
    }

    /// Position on segment `seg` at local parameter `t in [0, 1]`.
    pub fn eval(&self, seg: usize, t: f64) -> Vec2 {
        let (p0, p1, m0, m1) = self.ends(seg);
        let u = 1.0 - t;
        p0 * u + p1 * t + m0 * ((u * u * u - u) / 6.0) + m1 * ((t * t * t - t) / 6.0)
    }

    pub fn derivative(&self, seg: usize, t: f64) -> Vec2 {
        let (p0, p1, m0, m1) = self.ends(seg);
        let u = 1.0 - t;
        p1 - p0 + m0 * ((1.0 - 3.0 * u * u) / 6.0) + m1 * ((3.0 * t * t - 1.0) / 6.0)
    }

    /// Position at a global parameter in `[0, N)`.
    pub fn at(&self, param: f64) -> Vec2 {
        let n = self.points.len() as f64;
        let p = param.rem_euclid(n);
        let seg = (p.floor() as usize).min(self.points.len() - 1);
        self.eval(seg, p - seg as f64)
    }

    /// All points of the spline on the line through `origin` orthogonal to
    /// `tangent` that lie within `band` of `origin`.
    pub fn normal_line_hits(&self, origin: Vec2, tangent: Vec2, band: f64) -> Vec<LineHit> {
        const SUB: usize = 8;
        let mut hits = Vec::new();
        for seg in 0..self.segments() {
            let (p0, p1, m0, m1) = self.ends(seg);
            let reach = (p1 - p0).norm() + (m0.norm() + m1.norm()) / 8.0;
            if (p0 - origin).norm() - reach > band {
                continue;
            }
            let g = |t: f64| (self.eval(seg, t) - origin).dot(&tangent);
            let mut t0 = 0.0;
            let mut g0 = g(t0);
            for k in 1..=SUB {
                let t1 = k as f64 / SUB as f64;
                let g1 = g(t1);
                let root = if g0 == 0.0 {
                    Some(t0)
                } else if g0 * g1 < 0.0 {
                    Some(self.refine_root(seg, &g, t0, t1, g0, tangent))
                } else {
                    None
                };
                if let Some(t) = root {
                    let point = self.eval(seg, t);
                    if (point - origin).norm() < band {
                        hits.push(LineHit { param: seg as f64 + t, point });
                    }
                }
                t0 = t1;
                g0 = g1;
            }
        }
        hits
    }

    fn refine_root(
        &self,
        seg: usize,
        g: &impl Fn(f64) -> f64,
        mut lo: f64,
        mut hi: f64,
        g_lo: f64,
        tangent: Vec2,
    ) -> f64 {
        let lo_sign = g_lo.signum();
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-9 {
                break;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..3 {
            let slope = self.derivative(seg, t).dot(&tangent);
            if slope == 0.0 {
                break;
            }
            let next = t - g(t) / slope;
            if !(next >= lo - 1e-9 && next <= hi + 1e-9) {
                break;
            }
            t = next;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn spline_interpolates_nodes_and_approximates_circle() {
        let pts = shapes::circle(64, 1.0);
        let sp = PeriodicSpline::new(&pts);
        for (j, p) in pts.iter().enumerate() {
            assert!((sp.eval(j, 0.0) - p).norm() < 1e-13);
        }
        let mid = sp.at(10.5);
        assert!((mid.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radial_line_meets_circle_once() {
        let pts = shapes::circle(64, 1.0);
        let sp = PeriodicSpline::new(&pts);
        let theta: f64 = 0.3;
        let origin = 0.98 * Vec2::new(theta.cos(), theta.sin());
        let tangent = Vec2::new(-theta.sin(), theta.cos());
        let hits = sp.normal_line_hits(origin, tangent, 0.5);
        assert_eq!(hits.len(), 1);
        assert!((hits[0].point.norm() - 1.0).abs() < 1e-6);
        assert!((hits[0].point - origin).dot(&tangent).abs() < 1e-12);
    }
}
