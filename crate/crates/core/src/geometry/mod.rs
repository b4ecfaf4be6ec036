//! Reference curves, normal height fields and the curves they generate.

mod curve;
mod deformed;
mod height;
mod mollify;
pub mod shapes;
pub mod spline;

pub use curve::{
    first_self_intersection, polygon_length, reach_curvature, shoelace_area, spectral_area,
    Differentiation, ReferenceCurve, SampledCurve, MIN_NODES,
};
pub use deformed::{build_deformed, build_q, DeformedCurve, NormalVariation, QFactors};
pub use height::{validate_orders, DeltaEpsilonBudget, HeightField};
pub use mollify::{is_resolved, mollify_reference, Mollified, RESOLVED_TAIL};
