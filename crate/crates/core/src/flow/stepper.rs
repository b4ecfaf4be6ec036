use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::state::{FlowMode, FlowState};
use crate::error::{Error, Result};
use crate::norms::x_norm;
use crate::pde::ImplicitOperator;
use crate::rhs::{assemble_p, assemble_volume};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepSettings {
    pub dt: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub lambda0: f64,
    /// Consecutive non-contracting iterations tolerated before failing.
    pub stall_limit: usize,
}

impl StepSettings {
    pub fn new(dt: f64) -> Self {
        Self { dt, tol: 1e-10, max_iter: 50, lambda0: 100.0, stall_limit: 3 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StepReport {
    pub iterations: usize,
    /// Successive increments `||h^{(m+1)} - h^{(m)}||_X`.
    pub increments: Vec<f64>,
    /// `rho_m = increment_m / increment_{m-1}`.
    pub ratios: Vec<f64>,
    pub converged: bool,
}

impl StepReport {
    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().copied().reduce(f64::max)
    }
}

/// One time step: the fixed point of
/// `(I - dt A) u = h(t) + dt (c_s^2 h^{(m)} + P(h^{(m)}) - H_Sigma [+ (1 + Q) R3])`.
pub fn step_fixed_point(state: &FlowState, settings: &StepSettings) -> Result<(FlowState, StepReport)> {
    if !(settings.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {} must be positive", settings.dt)));
    }
    let operator = match &state.operator {
        Some(op) if op.dt() == settings.dt => op.clone(),
        _ => Arc::new(ImplicitOperator::new(&state.table, settings.dt)?),
    };
    let table = &state.table;
    let base = &state.base;
    let (s, alpha) = (state.s(), state.alpha());
    let h_n = state.h.values();
    let mut iterate = state.h.clone();
    let mut report = StepReport::default();
    let mut stalled = 0;
    // Ratios are not judged once increments reach the rounding floor.
    let noise_floor = 1e3 * settings.tol;
    for m in 0..settings.max_iter {
        let rhs = match state.mode {
            FlowMode::Plain => assemble_p(table, &iterate)?,
            FlowMode::VolumePreserving => assemble_volume(table, &iterate)?,
        };
        let a_h = table.fractional_laplacian_apply(iterate.values())?;
        let b: Vec<f64> = (0..h_n.len()).map(|i| h_n[i] + settings.dt * (rhs.total[i] - a_h[i])).collect();
        let next = operator.solve(&b)?;
        let diff: Vec<f64> = next.iter().zip(iterate.values()).map(|(a, b)| a - b).collect();
        let inc = x_norm(&diff, base, s, alpha, settings.lambda0);
        if let Some(prev) = report.increments.last().copied() {
            let rho = inc / prev;
            report.ratios.push(rho);
            if rho >= 1.0 && inc > noise_floor {
                stalled += 1;
                if stalled >= settings.stall_limit {
                    return Err(Error::NoContraction { iteration: m, ratio: rho });
                }
            } else {
                stalled = 0;
            }
        }
        report.increments.push(inc);
        report.iterations = m + 1;
        iterate = iterate.with_values(next)?;
        if inc < settings.tol {
            report.converged = true;
            break;
        }
    }
    let mut out = state.clone();
    out.t += settings.dt;
    out.h = iterate;
    out.operator = Some(operator);
    Ok((out, report))
}
