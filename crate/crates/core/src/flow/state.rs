use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_deformed, spectral_area, DeformedCurve, DeltaEpsilonBudget, HeightField, ReferenceCurve};
use crate::nonlocal::NonlocalOperatorTable;
use crate::norms::{c1_s_alpha_norm, NormReport};
use crate::pde::ImplicitOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    Plain,
    VolumePreserving,
}

impl FromStr for FlowMode {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.trim() {
            "plain" => Ok(Self::Plain),
            "volume" | "volume_preserving" => Ok(Self::VolumePreserving),
            other => Err(Error::InvalidParameter(format!("unknown flow mode `{other}`"))),
        }
    }
}

impl fmt::Display for FlowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::VolumePreserving => "volume_preserving",
        })
    }
}

/// What to do when the height leaves the smallness budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    Stop,
    Reparametrize,
}

impl FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.trim() {
            "stop" => Ok(Self::Stop),
            "reparametrize" => Ok(Self::Reparametrize),
            other => Err(Error::InvalidParameter(format!("unknown threshold policy `{other}`"))),
        }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stop => "stop",
            Self::Reparametrize => "reparametrize",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowEvent {
    ThresholdExit { t: f64, c1_s_alpha: f64, c0: f64 },
    Reparametrized { t: f64, hausdorff: f64, area_change: f64, h_c0: f64 },
    FoldOver { t: f64, node: usize },
}

/// Height field over a reference curve at time `t`, with the operator table
/// of that curve.
#[derive(Clone)]
pub struct FlowState {
    pub t: f64,
    pub base: ReferenceCurve,
    pub h: HeightField,
    pub budget: DeltaEpsilonBudget,
    pub events: Vec<FlowEvent>,
    pub mode: FlowMode,
    pub(crate) table: Arc<NonlocalOperatorTable>,
    pub(crate) operator: Option<Arc<ImplicitOperator>>,
}

impl fmt::Debug for FlowState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowState")
            .field("t", &self.t)
            .field("n", &self.base.len())
            .field("s", &self.h.s())
            .field("budget", &self.budget)
            .field("mode", &self.mode)
            .field("events", &self.events)
            .finish()
    }
}

impl FlowState {
    pub fn new(base: ReferenceCurve, h: HeightField, budget: DeltaEpsilonBudget, mode: FlowMode) -> Result<Self> {
        h.check_aligned(&base)?;
        let table = Arc::new(NonlocalOperatorTable::assemble(&base, h.s())?);
        Ok(Self { t: 0.0, base, h, budget, events: Vec::new(), mode, table, operator: None })
    }

    pub fn table(&self) -> &NonlocalOperatorTable {
        &self.table
    }

    pub fn s(&self) -> f64 {
        self.h.s()
    }

    pub fn alpha(&self) -> f64 {
        self.h.alpha()
    }

    pub fn deformed(&self) -> Result<DeformedCurve> {
        build_deformed(&self.base, &self.h)
    }

    pub fn norms(&self) -> NormReport {
        c1_s_alpha_norm(self.h.values(), &self.base, self.s(), self.alpha())
    }

    /// Whether both smallness thresholds hold.
    pub fn within_budget(&self) -> bool {
        let r = self.norms();
        r.c1_s_alpha <= self.budget.delta && r.c0 <= self.budget.epsilon
    }

    /// Enclosed area of the realized curve.
    pub fn area(&self) -> Result<f64> {
        Ok(spectral_area(self.deformed()?.nodes()))
    }
}
