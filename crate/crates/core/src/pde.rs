//! Linear fractional heat equation with forcing on a fixed curve.

use nalgebra::{DMatrix, DVector, LU};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::nonlocal::NonlocalOperatorTable;
use crate::norms::{self, sup_norm};

/// `du/dt = Delta^{(1+s)/2} u + f(t) + g`, `u(0) = initial`.
#[derive(Debug, Clone)]
pub struct LinearHeatProblem<'a> {
    pub table: &'a NonlocalOperatorTable,
    /// `f` sampled at `t_m = m dt` for `m = 0..steps`; empty means zero.
    pub forcing_f: Vec<Vec<f64>>,
    pub forcing_g: Vec<f64>,
    pub initial: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
}

impl<'a> LinearHeatProblem<'a> {
    /// Unforced problem.
    pub fn free(table: &'a NonlocalOperatorTable, initial: Vec<f64>, horizon: f64, dt: f64) -> Self {
        let n = table.len();
        Self { table, forcing_f: Vec::new(), forcing_g: vec![0.0; n], initial, horizon, dt }
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt <= T, got dt = {}, T = {}",
                self.dt, self.horizon
            )));
        }
        let n = self.table.len();
        check_len(n, self.initial.len())?;
        check_len(n, self.forcing_g.len())?;
        if !self.forcing_f.is_empty() {
            check_len(self.steps(), self.forcing_f.len())?;
            for f in &self.forcing_f {
                check_len(n, f.len())?;
            }
        }
        Ok(())
    }

    fn f_at(&self, m: usize) -> Option<&[f64]> {
        self.forcing_f.get(m).map(|v| v.as_slice())
    }

    /// `sup_m ||f(t_m)||_{C^0}`.
    pub fn f_sup(&self) -> f64 {
        self.forcing_f.iter().map(|f| sup_norm(f)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Factorization of `I - dt A`, reusable across steps and problems sharing
/// the same table and step size.
pub struct ImplicitOperator {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    dt: f64,
}

impl ImplicitOperator {
    pub fn new(table: &NonlocalOperatorTable, dt: f64) -> Result<Self> {
        let n = table.len();
        let m = DMatrix::<f64>::identity(n, n) - &table.frac_laplacian * dt;
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::SingularSystem);
        }
        Ok(Self { lu, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.lu
            .solve(&DVector::from_column_slice(rhs))
            .map(|v| v.as_slice().to_vec())
            .ok_or(Error::SingularSystem)
    }
}

/// Implicit Euler in the operator, explicit in the forcing:
/// `(I - dt A) u^{m+1} = u^m + dt (f(t_m) + g)`.
pub fn solve_linear(problem: &LinearHeatProblem<'_>) -> Result<Trajectory> {
    problem.validate()?;
    let op = ImplicitOperator::new(problem.table, problem.dt)?;
    let steps = problem.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut u = problem.initial.clone();
    times.push(0.0);
    states.push(u.clone());
    for m in 0..steps {
        let rhs: Vec<f64> = (0..u.len())
            .map(|i| {
                let f = problem.f_at(m).map_or(0.0, |f| f[i]);
                u[i] + problem.dt * (f + problem.forcing_g[i])
            })
            .collect();
        u = op.solve(&rhs)?;
        times.push((m + 1) as f64 * problem.dt);
        states.push(u.clone());
    }
    Ok(Trajectory { times, states })
}

/// Outcome of the sup-norm bound `||u(t)|| <= ||u0|| + t (sup ||f|| + ||g||)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaximumPrincipleReport {
    pub holds: bool,
    /// Smallest `bound - ||u(t_m)||` over the trajectory.
    pub margin: f64,
}

pub fn maximum_principle_check(trajectory: &Trajectory, problem: &LinearHeatProblem<'_>) -> MaximumPrincipleReport {
    let u0 = sup_norm(&problem.initial);
    let forcing = problem.f_sup() + sup_norm(&problem.forcing_g);
    let mut margin = f64::INFINITY;
    for (t, u) in trajectory.times.iter().zip(&trajectory.states) {
        let bound = u0 + t * forcing;
        margin = margin.min(bound - sup_norm(u));
    }
    let tolerance = 1e-12 * (1.0 + u0 + problem.horizon * forcing);
    MaximumPrincipleReport { holds: margin >= -tolerance, margin }
}

/// Measured ratio of the parabolic Schauder estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SchauderReport {
    pub solution_sup: f64,
    pub data: f64,
    pub ratio: f64,
}

/// `sup_t ||u||_{C^{1+s+alpha}} / (||u0||_{C^{1+s+alpha}} + sup_t ||f||_{C^alpha} + T ||g||_{C^{1+s+alpha}})`.
pub fn schauder_diagnostic(trajectory: &Trajectory, problem: &LinearHeatProblem<'_>, alpha: f64) -> SchauderReport {
    let base = &problem.table.base;
    let s = problem.table.s;
    let strong = |v: &[f64]| norms::c1_s_alpha_norm(v, base, s, alpha).c1_s_alpha;
    let solution_sup = trajectory.states.iter().map(|u| strong(u)).fold(0.0, f64::max);
    let f_alpha = problem
        .forcing_f
        .iter()
        .map(|f| norms::holder_norm(f, base, alpha))
        .fold(0.0, f64::max);
    let data = strong(&problem.initial) + f_alpha + problem.horizon * strong(&problem.forcing_g);
    SchauderReport { solution_sup, data, ratio: solution_sup / data }
}
