//! Numerical checks of the quantitative statements of the theory, grouped
//! into suites and reported as versioned JSON.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::*;

/// Version of the report layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The statement involves a constant that is not computable; the
    /// numbers are reported without a verdict.
    MeasuredOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub paper_anchor: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckResult {
    pub fn new(name: &str, anchor: &str) -> Self {
        Self { name: name.into(), paper_anchor: anchor.into(), status: Status::MeasuredOnly, metrics: BTreeMap::new() }
    }

    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        self.metrics.insert(key.into(), value);
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.status = if pass { Status::Pass } else { Status::Fail };
        self
    }

    pub fn measured_only(mut self) -> Self {
        self.status = Status::MeasuredOnly;
        self
    }

    /// A check whose computation itself failed.
    pub fn errored(name: &str, anchor: &str, error: &Error) -> Self {
        let mut r = Self::new(name, anchor);
        r.metric("error", f64::NAN);
        r.paper_anchor = format!("{anchor} (error: {error})");
        r.verdict(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Fast,
    Kernels,
    Flow,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "fast" => Ok(Suite::Fast),
            "kernels" => Ok(Suite::Kernels),
            "flow" => Ok(Suite::Flow),
            other => Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::All => "all",
            Suite::Fast => "fast",
            Suite::Kernels => "kernels",
            Suite::Flow => "flow",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub seed: u64,
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { suite: Suite::All, seed: 7, n: 128, s: 0.5, alpha: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub measured_only: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

type Check = fn(&VerifyConfig) -> CheckResult;

fn kernel_checks() -> Vec<Check> {
    vec![
        circle_constant_curvature,
        scaling_law,
        first_variation_check,
        kernel_class_check,
        remainder_smallness_check,
        commutation_circle_check,
        commutation_noncircle_check,
        rhs_consistency_check,
    ]
}

fn fast_flow_checks() -> Vec<Check> {
    vec![
        maximum_principle_trials,
        schauder_check,
        spectral_decay_check,
        circle_first_step_check,
        volume_stationary_circle_check,
        contraction_check,
        contraction_scan,
    ]
}

fn slow_flow_checks() -> Vec<Check> {
    vec![shrinking_circle_check, volume_area_check, cross_integrator_check]
}

fn suite_checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Kernels => kernel_checks(),
        Suite::Flow => fast_flow_checks().into_iter().chain(slow_flow_checks()).collect(),
        Suite::Fast => kernel_checks().into_iter().chain(fast_flow_checks()).collect(),
        Suite::All => kernel_checks().into_iter().chain(fast_flow_checks()).chain(slow_flow_checks()).collect(),
    }
}

/// Runs every check of the configured suite. Checks run concurrently; the
/// report lists them in a fixed order.
pub fn run_all(config: &VerifyConfig) -> Result<SuiteReport> {
    crate::geometry::validate_orders(config.s, config.alpha)?;
    if config.n < 32 {
        return Err(Error::TooFewNodes { min: 32, got: config.n });
    }
    let checks: Vec<CheckResult> = suite_checks(config.suite).par_iter().map(|c| c(config)).collect();
    let count = |st: Status| checks.iter().filter(|c| c.status == st).count();
    Ok(SuiteReport {
        schema: SCHEMA,
        config: *config,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        measured_only: count(Status::MeasuredOnly),
        checks,
    })
}
