//! Time evolution of the height function and the front-tracking reference.

mod front;
mod run;
mod state;
mod stepper;

pub use front::{front_tracking_reference, hausdorff_distance, mean_radius, redistribute_arclength, FrontSnapshot};
pub use run::{cosine_height, reparametrize, run, FlowConfig, RunOutput, RunReport, StopReason, TrajectoryRecord};
pub use state::{FlowEvent, FlowMode, FlowState, ThresholdPolicy};
pub use stepper::{step_fixed_point, StepReport, StepSettings};

/// Radius of the circle flowing by `V = -lambda_s R^{-s}` from `r0`:
/// `(r0^{1+s} - (1+s) lambda_s t)^{1/(1+s)}`.
pub fn shrinking_circle_radius(r0: f64, s: f64, lambda_s: f64, t: f64) -> f64 {
    (r0.powf(1.0 + s) - (1.0 + s) * lambda_s * t).powf(1.0 / (1.0 + s))
}
