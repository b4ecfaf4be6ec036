use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::fmc::{check_order, fractional_mean_curvature};
use super::kernel::{moment_psi, KernelMatrix};
use crate::error::{check_len, Error, Result};
use crate::geometry::ReferenceCurve;
use crate::norms::tangential_derivative;
use crate::quadrature::SingularRule;

/// Operators of the Jacobi linearization assembled on a fixed curve.
#[derive(Debug, Clone)]
pub struct NonlocalOperatorTable {
    pub base: ReferenceCurve,
    /// `(A u)_i` approximates `2 int (u(y) - u(x_i)) |y - x_i|^{-(n+1+s)} dH_y`.
    pub frac_laplacian: DMatrix<f64>,
    pub c_s_squared: Vec<f64>,
    /// Fractional mean curvature of the base curve.
    pub h_sigma_s: Vec<f64>,
    pub s: f64,
}

impl NonlocalOperatorTable {
    pub fn assemble(base: &ReferenceCurve, s: f64) -> Result<Self> {
        check_order(s)?;
        let rule = SingularRule::for_order(s);
        let p = rule.exponent();
        let n = base.len();
        let h = std::f64::consts::TAU / n as f64;
        let x = base.nodes();
        let sp = base.speed();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row: Vec<f64> = (0..n)
                    .map(|j| {
                        if j == i {
                            0.0
                        } else {
                            2.0 * h * rule.weight(i, j, n) * sp[j] * (x[j] - x[i]).norm().powf(-p)
                        }
                    })
                    .collect();
                row[i] = -row.iter().sum::<f64>();
                row
            })
            .collect();
        let frac_laplacian = DMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
        Ok(Self {
            base: base.clone(),
            frac_laplacian,
            c_s_squared: c_s_squared(base, s)?,
            h_sigma_s: fractional_mean_curvature(base, s)?,
            s,
        })
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn fractional_laplacian_apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), u.len())?;
        Ok((&self.frac_laplacian * DVector::from_column_slice(u)).as_slice().to_vec())
    }

    /// `L[u] = Delta^{(1+s)/2} u + c_s^2 u`.
    pub fn jacobi_apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.fractional_laplacian_apply(u)?;
        out.iter_mut().zip(&self.c_s_squared).zip(u).for_each(|((o, c), v)| *o += c * v);
        Ok(out)
    }

    /// Writes `N` as a little-endian `u64` followed by the row-major
    /// little-endian `f64` entries of the fractional Laplacian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.len();
        out.write_all(&(n as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * n * n);
        for i in 0..n {
            for j in 0..n {
                buf.extend_from_slice(&self.frac_laplacian[(i, j)].to_le_bytes());
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }
}

/// Reads a matrix written by [`NonlocalOperatorTable::write_binary`].
pub fn read_binary_matrix<R: Read>(mut input: R) -> Result<DMatrix<f64>> {
    let mut header = [0u8; 8];
    input.read_exact(&mut header)?;
    let n = u64::from_le_bytes(header) as usize;
    if n == 0 || n > 1 << 16 {
        return Err(Error::InvalidParameter(format!("implausible matrix size {n}")));
    }
    let mut body = vec![0u8; 8 * n * n];
    input.read_exact(&mut body)?;
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
    Ok(DMatrix::from_row_iterator(n, n, values))
}

/// `c_s^2(x) = int |nu(y) - nu(x)|^2 |y - x|^{-(n+1+s)} dH_y`.
pub fn c_s_squared(base: &ReferenceCurve, s: f64) -> Result<Vec<f64>> {
    check_order(s)?;
    let rule = SingularRule::for_order(s);
    let p = rule.exponent();
    let x = base.nodes();
    let nu = base.normal();
    let sp = base.speed();
    let n = x.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            rule.integrate_row(i, n, |j| {
                (nu[j] - nu[i]).norm_squared() * (x[j] - x[i]).norm().powf(-p) * sp[j]
            })
        })
        .collect())
}

/// Fractional Laplacian by singularity subtraction: the tangential linear
/// part of `u` is removed from the integrand and restored through the
/// moment `psi` of the model kernel.
pub fn fractional_laplacian_subtracted(base: &ReferenceCurve, s: f64, u: &[f64]) -> Result<Vec<f64>> {
    check_order(s)?;
    check_len(base.len(), u.len())?;
    let zero = crate::geometry::HeightField::zeros(base.len(), s, 0.25 * (1.0 - s))?;
    let kernel: KernelMatrix = super::kernel::kernel_ku(base, &zero)?;
    let psi = moment_psi(&kernel, base)?;
    let rule = SingularRule::for_order(s);
    let du = tangential_derivative(u, base);
    let x = base.nodes();
    let tau = base.tangent();
    let sp = base.speed();
    let n = x.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let grad = tau[i] * du[i];
            let local = rule.integrate_row(i, n, |j| {
                (u[j] - u[i] - grad.dot(&(x[j] - x[i]))) * kernel.get(i, j) * sp[j]
            });
            2.0 * (local + grad.dot(&psi[i]))
        })
        .collect())
}
