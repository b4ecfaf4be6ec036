use serde::{Deserialize, Serialize};

use super::front::hausdorff_distance;
use super::state::{FlowEvent, FlowMode, FlowState, ThresholdPolicy};
use super::stepper::{step_fixed_point, StepSettings};
use crate::error::{Error, Result};
use crate::geometry::shapes::Shape;
use crate::geometry::{mollify_reference, polygon_length, spectral_area, DeltaEpsilonBudget, HeightField};
use crate::norms::NormReport;
use crate::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub shape: Shape,
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub mode: FlowMode,
    pub lambda0: f64,
    pub on_threshold: ThresholdPolicy,
    pub tol: f64,
    pub max_iter: usize,
    /// Relative enclosed-area drift that aborts a volume-preserving run.
    pub area_tolerance: f64,
    /// Trajectory snapshots are kept every this many steps.
    pub record_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            shape: Shape::Perturbed { radius: 1.0, amplitude: 0.03, mode: 2 },
            n: 128,
            s: 0.5,
            alpha: 0.1,
            delta: 0.5,
            epsilon: 0.05,
            dt: 1e-3,
            t_end: 0.02,
            mode: FlowMode::Plain,
            lambda0: 100.0,
            on_threshold: ThresholdPolicy::Reparametrize,
            tol: 1e-10,
            max_iter: 50,
            area_tolerance: 1e-3,
            record_every: 1,
        }
    }
}

impl FlowConfig {
    pub fn step_settings(&self) -> StepSettings {
        StepSettings { dt: self.dt, tol: self.tol, max_iter: self.max_iter, lambda0: self.lambda0, stall_limit: 3 }
    }

    pub fn budget(&self) -> Result<DeltaEpsilonBudget> {
        DeltaEpsilonBudget::new(self.delta, self.epsilon)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    /// Realized curve `x + h nu` on the current reference nodes.
    pub nodes: Vec<Vec2>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    ThresholdExit,
    FoldOver,
    AreaDrift,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: FlowConfig,
    pub stop_reason: StopReason,
    pub final_time: f64,
    pub steps: usize,
    pub events: Vec<FlowEvent>,
    /// Measured contraction ratios of every step, in order.
    pub contraction_ratios: Vec<Vec<f64>>,
    pub iterations: Vec<usize>,
    pub times: Vec<f64>,
    pub area_series: Vec<f64>,
    pub norm_series: Vec<NormReport>,
    /// `L^2 / (4 pi A) - 1` of the realized polygon; reported, not asserted.
    pub isoperimetric_deficit: Vec<f64>,
    /// Whether every realized curve stayed convex; reported, not asserted.
    pub stayed_convex: bool,
    pub mollifier_sigma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutput {
    pub trajectory: Vec<TrajectoryRecord>,
    pub report: RunReport,
}

/// Replaces the reference curve by a smoothing of the current realized
/// curve and re-expresses the set as a small graph over it.
pub fn reparametrize(state: &FlowState, epsilon: f64) -> Result<FlowState> {
    let realized = state.deformed()?.into_nodes();
    let area_before = spectral_area(&realized);
    let m = mollify_reference(&realized, epsilon, state.s(), state.alpha())?;
    let mut next = FlowState::new(m.reference, m.h0, state.budget, state.mode)?;
    next.t = state.t;
    next.events = state.events.clone();
    let after = next.deformed()?.into_nodes();
    let hausdorff = hausdorff_distance(&realized, &after, 4);
    next.events.push(FlowEvent::Reparametrized {
        t: state.t,
        hausdorff,
        area_change: spectral_area(&after) - area_before,
        h_c0: next.h.max_abs(),
    });
    Ok(next)
}

fn is_convex(nodes: &[Vec2]) -> bool {
    let n = nodes.len();
    (0..n).all(|i| {
        let a = nodes[(i + n - 1) % n];
        let b = nodes[i];
        let c = nodes[(i + 1) % n];
        (b - a).perp(&(c - b)) >= 0.0
    })
}

/// Evolves `initial` by the configured flow until `t_end`, a fold-over, an
/// unrecoverable budget exit or, in volume mode, excessive area drift.
pub fn run(initial: &[Vec2], config: &FlowConfig) -> Result<RunOutput> {
    let budget = config.budget()?;
    if !(config.dt > 0.0 && config.t_end >= 0.0) {
        return Err(Error::InvalidParameter("need dt > 0 and T >= 0".into()));
    }
    let m = mollify_reference(initial, config.epsilon, config.s, config.alpha)?;
    let sigma = m.sigma;
    let mut state = FlowState::new(m.reference, m.h0, budget, config.mode)?;
    let settings = config.step_settings();
    let steps = (config.t_end / config.dt - 1e-9).ceil().max(0.0) as usize;

    let mut trajectory = Vec::new();
    let mut report = RunReport {
        config: config.clone(),
        stop_reason: StopReason::Completed,
        final_time: 0.0,
        steps: 0,
        events: Vec::new(),
        contraction_ratios: Vec::new(),
        iterations: Vec::new(),
        times: Vec::new(),
        area_series: Vec::new(),
        norm_series: Vec::new(),
        isoperimetric_deficit: Vec::new(),
        stayed_convex: true,
        mollifier_sigma: sigma,
    };
    let record = |state: &FlowState, trajectory: &mut Vec<TrajectoryRecord>, report: &mut RunReport, keep: bool| -> Result<()> {
        let nodes = state.deformed()?.into_nodes();
        let area = spectral_area(&nodes);
        report.times.push(state.t);
        report.area_series.push(area);
        report.norm_series.push(state.norms());
        let len = polygon_length(&nodes);
        let poly_area = crate::geometry::shoelace_area(&nodes);
        report.isoperimetric_deficit.push(len * len / (4.0 * std::f64::consts::PI * poly_area) - 1.0);
        report.stayed_convex &= is_convex(&nodes);
        if keep {
            trajectory.push(TrajectoryRecord { t: state.t, nodes, h: state.h.values().to_vec() });
        }
        Ok(())
    };
    record(&state, &mut trajectory, &mut report, true)?;
    let area0 = report.area_series[0];

    for step in 0..steps {
        if !state.within_budget() {
            let r = state.norms();
            state.events.push(FlowEvent::ThresholdExit { t: state.t, c1_s_alpha: r.c1_s_alpha, c0: r.c0 });
            match config.on_threshold {
                ThresholdPolicy::Stop => {
                    report.stop_reason = StopReason::ThresholdExit;
                    break;
                }
                ThresholdPolicy::Reparametrize => {
                    state = reparametrize(&state, config.epsilon)?;
                    if !state.within_budget() {
                        report.stop_reason = StopReason::ThresholdExit;
                        break;
                    }
                }
            }
        }
        let mut step_settings = settings;
        let remaining = config.t_end - state.t;
        if step + 1 == steps && remaining > 0.0 && remaining < settings.dt * (1.0 - 1e-9) {
            step_settings.dt = remaining;
        }
        match step_fixed_point(&state, &step_settings) {
            Ok((next, step_report)) => {
                state = next;
                report.contraction_ratios.push(step_report.ratios);
                report.iterations.push(step_report.iterations);
            }
            Err(Error::FoldOver { node, .. }) => {
                state.events.push(FlowEvent::FoldOver { t: state.t, node });
                report.stop_reason = StopReason::FoldOver;
                break;
            }
            Err(e) => return Err(e),
        }
        report.steps += 1;
        let keep = (step + 1) % config.record_every.max(1) == 0 || step + 1 == steps;
        record(&state, &mut trajectory, &mut report, keep)?;
        if config.mode == FlowMode::VolumePreserving {
            let drift = (report.area_series.last().copied().unwrap_or(area0) - area0).abs() / area0.abs();
            if drift > config.area_tolerance {
                report.stop_reason = StopReason::AreaDrift;
                break;
            }
        }
    }
    report.final_time = state.t;
    report.events = state.events.clone();
    Ok(RunOutput { trajectory, report })
}

/// Height field on the unit-circle grid used by several checks.
pub fn cosine_height(base: &crate::geometry::ReferenceCurve, s: f64, alpha: f64, amplitude: f64, mode: u32) -> Result<HeightField> {
    HeightField::from_fn(base, s, alpha, |t| amplitude * (mode as f64 * t).cos())
}
