use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::geometry::{HeightField, ReferenceCurve};
use crate::norms;
use crate::quadrature::{kernel_exponent, SingularRule, DIM};
use crate::{spectral, Vec2};

/// Dense two-point kernel; row `i` is the target `x_i`, column `j` the
/// source `y_j`. Diagonal entries are zero and never read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    n: usize,
    exponent: f64,
    data: Vec<f64>,
}

impl KernelMatrix {
    fn from_rows(exponent: f64, rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        Self { n, exponent, data: rows.concat() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The exponent `n + 1 + s` of the model kernel this one is compared to.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { data: self.data.iter().map(|v| v * factor).collect(), ..self.clone() }
    }

    pub fn max_abs_offdiag(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }
}

pub(crate) fn graph_nodes(base: &ReferenceCurve, u: &[f64]) -> Vec<Vec2> {
    base.nodes().iter().zip(base.normal()).zip(u).map(|((x, nu), v)| x + nu * *v).collect()
}

/// Extremes of `|Phi_u(y) - Phi_u(x)| / |y - x|` over all pairs, with the
/// pair attaining the worse one.
pub fn comparability_range(base: &ReferenceCurve, u: &[f64]) -> (f64, f64, (usize, usize)) {
    let phi = graph_nodes(base, u);
    let x = base.nodes();
    let n = x.len();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut worst = (0, 0);
    let mut worst_dev = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = (phi[j] - phi[i]).norm() / (x[j] - x[i]).norm();
            lo = lo.min(r);
            hi = hi.max(r);
            let dev = r.max(1.0 / r);
            if dev > worst_dev {
                worst_dev = dev;
                worst = (i, j);
            }
        }
    }
    (lo, hi, worst)
}

fn check_comparability(base: &ReferenceCurve, u: &[f64]) -> Result<()> {
    let (lo, hi, (i, j)) = comparability_range(base, u);
    if lo < 0.5 {
        return Err(Error::ComparabilityViolated { i, j, ratio: lo });
    }
    if hi > 2.0 {
        return Err(Error::ComparabilityViolated { i, j, ratio: hi });
    }
    Ok(())
}

/// `K_u(y, x) = |Phi_u(y) - Phi_u(x)|^{-(n+1+s)}`.
pub fn kernel_ku(base: &ReferenceCurve, u: &HeightField) -> Result<KernelMatrix> {
    u.check_aligned(base)?;
    check_comparability(base, u.values())?;
    let p = kernel_exponent(u.s());
    let phi = graph_nodes(base, u.values());
    let rows = (0..phi.len())
        .into_par_iter()
        .map(|i| {
            phi.iter()
                .enumerate()
                .map(|(j, y)| if j == i { 0.0 } else { (y - phi[i]).norm().powf(-p) })
                .collect()
        })
        .collect();
    Ok(KernelMatrix::from_rows(p, rows))
}

/// Derivative of `K_{u + eta w}` in `eta` at zero:
/// `-(n+1+s) |D Phi|^{-(n+3+s)} D Phi . D(w nu)`.
pub fn kernel_linearized(base: &ReferenceCurve, u: &HeightField, w: &HeightField) -> Result<KernelMatrix> {
    u.check_aligned(base)?;
    w.check_aligned(base)?;
    check_comparability(base, u.values())?;
    let p = kernel_exponent(u.s());
    let phi = graph_nodes(base, u.values());
    let wnu: Vec<Vec2> = base.normal().iter().zip(w.values()).map(|(nu, v)| nu * *v).collect();
    let rows = (0..phi.len())
        .into_par_iter()
        .map(|i| {
            (0..phi.len())
                .map(|j| {
                    if j == i {
                        return 0.0;
                    }
                    let d = phi[j] - phi[i];
                    -p * d.norm().powf(-p - 2.0) * d.dot(&(wnu[j] - wnu[i]))
                })
                .collect()
        })
        .collect();
    Ok(KernelMatrix::from_rows(p, rows))
}

/// `psi(x_i) = int (y - x_i) K(y, x_i) dH_y` with opposite-side pairing.
pub fn moment_psi(kernel: &KernelMatrix, base: &ReferenceCurve) -> Result<Vec<Vec2>> {
    check_len(base.len(), kernel.n())?;
    let rule = SingularRule::new(kernel.exponent());
    let x = base.nodes();
    let sp = base.speed();
    let n = x.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let cx = rule.integrate_row(i, n, |j| (x[j].x - x[i].x) * kernel.get(i, j) * sp[j]);
            let cy = rule.integrate_row(i, n, |j| (x[j].y - x[i].y) * kernel.get(i, j) * sp[j]);
            Vec2::new(cx, cy)
        })
        .collect())
}

/// Measured constants of the size, gradient and moment conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDiagnostics {
    pub kappa_i: f64,
    pub kappa_ii: f64,
    pub psi_alpha_norm: f64,
    pub passes: [bool; 3],
}

/// `kappa_i = max |K| |y - x|^{n+1+s}`; `kappa_ii = max |grad_x K| |y - x|^{n+2+s}`
/// with the gradient taken as the centered difference quotient along the
/// curve; `psi_alpha_norm = ||psi||_{C^alpha}`.
pub fn s_kappa_diagnostics(kernel: &KernelMatrix, base: &ReferenceCurve, alpha: f64) -> Result<KernelDiagnostics> {
    check_len(base.len(), kernel.n())?;
    let p = kernel.exponent();
    let x = base.nodes();
    let n = x.len();
    let (kappa_i, kappa_ii) = (0..n)
        .into_par_iter()
        .map(|i| {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let span = (x[next] - x[prev]).norm();
            let mut ki = 0.0_f64;
            let mut kii = 0.0_f64;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = (x[j] - x[i]).norm();
                ki = ki.max(kernel.get(i, j).abs() * d.powf(p));
                let gap = (j + n - i) % n;
                if gap.min(n - gap) >= 2 {
                    let grad = (kernel.get(next, j) - kernel.get(prev, j)).abs() / span;
                    kii = kii.max(grad * d.powf(p + 1.0));
                }
            }
            (ki, kii)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let psi = moment_psi(kernel, base)?;
    let psi_alpha_norm = norms::holder_norm_vec(&psi, base, alpha);
    let passes = [kappa_i.is_finite(), kappa_ii.is_finite(), psi_alpha_norm.is_finite()];
    Ok(KernelDiagnostics { kappa_i, kappa_ii, psi_alpha_norm, passes })
}

/// Both sides of the integration-by-parts identity that rewrites the
/// moment of `K_u` as an absolutely convergent integral:
/// `(I + (|T|^2 - 1) tau (x) tau) psi(x) = int F(y, x) K_u(y, x) dH_y` with
/// `T = D_tau Phi_u` and
/// `F = -H(y) nu(y) |D Phi|^2/(n-1+s) + ((y-x).nu(x)) nu(x)
///      - (T(y) - T(x)) . D Phi  - T(x) . (D Phi - T(x) tau(x).(y-x))`
/// where `A . v` abbreviates `tau (A . v)` for the rank-one differentials.
#[derive(Debug, Clone)]
pub struct MomentIdentity {
    pub lhs: Vec<Vec2>,
    pub rhs: Vec<Vec2>,
}

impl MomentIdentity {
    /// `max |lhs - rhs| / max |rhs|`.
    pub fn relative_residual(&self) -> f64 {
        let err = self.lhs.iter().zip(&self.rhs).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        let scale = self.rhs.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        err / scale
    }
}

pub fn moment_identity(base: &ReferenceCurve, u: &HeightField) -> Result<MomentIdentity> {
    let kernel = kernel_ku(base, u)?;
    let psi = moment_psi(&kernel, base)?;
    let s = u.s();
    let rule = SingularRule::new(kernel.exponent());
    let x = base.nodes();
    let tau = base.tangent();
    let nu = base.normal();
    let kappa = base.curvature();
    let sp = base.speed();
    let n = x.len();
    let phi = graph_nodes(base, u.values());
    let unu: Vec<Vec2> = nu.iter().zip(u.values()).map(|(v, h)| v * *h).collect();
    let d_unu = spectral::derivative_points(&unu, 1);
    let t_phi: Vec<Vec2> = (0..n).map(|j| tau[j] + d_unu[j] / sp[j]).collect();
    let lhs = (0..n)
        .map(|i| {
            let tt = tau[i].dot(&psi[i]);
            psi[i] + tau[i] * ((t_phi[i].norm_squared() - 1.0) * tt)
        })
        .collect();
    let integrand = |i: usize, j: usize| -> Vec2 {
        let dphi = phi[j] - phi[i];
        let dx = x[j] - x[i];
        let f1 = -nu[j] * (kappa[j] * dphi.norm_squared() / (DIM - 1.0 + s));
        let f3 = nu[i] * dx.dot(&nu[i]);
        let f_diff = tau[j] * t_phi[j].dot(&dphi) - tau[i] * t_phi[i].dot(&dphi);
        let f2 = tau[i] * t_phi[i].dot(&(dphi - t_phi[i] * tau[i].dot(&dx)));
        (f1 + f3 - f_diff - f2) * kernel.get(i, j) * sp[j]
    };
    let rhs = (0..n)
        .into_par_iter()
        .map(|i| {
            let cx = rule.integrate_row(i, n, |j| integrand(i, j).x);
            let cy = rule.integrate_row(i, n, |j| integrand(i, j).y);
            Vec2::new(cx, cy)
        })
        .collect();
    Ok(MomentIdentity { lhs, rhs })
}
