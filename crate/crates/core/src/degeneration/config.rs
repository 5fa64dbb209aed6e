//! Scenario configuration and tolerance profiles.

use crate::cp1::CP1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegenerationError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("root bracketing failed at t = {t}: no sign change on [{lo:.3e}, {hi:.3e}]")]
    RootBracketFailure { t: f64, lo: f64, hi: f64 },
    #[error("solver failure at sample {sample}: {reason}")]
    SolverFailure { sample: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    HyperbolicNeck,
    EllipticNeck,
}

impl ScenarioKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ScenarioKind::HyperbolicNeck => "hyperbolic",
            ScenarioKind::EllipticNeck => "elliptic",
        }
    }
}

/// Full description of a degeneration run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Strictly increasing sample times, at least 8 of them.
    pub times: Vec<f64>,
    /// The limit point on CP¹ toward which the construction degenerates;
    /// the scenario is built in the normalized frame and conjugated so the
    /// designated point lands here.
    #[serde(default = "default_base_point")]
    pub base_point: CP1,
    /// Reference geodesic endpoints (the elliptic scenario rotates about
    /// axes orthogonal to this geodesic).
    #[serde(default = "default_reference")]
    pub reference_endpoints: (CP1, CP1),
    /// Imaginary offsets of the two tangent planes (hyperbolic scenario);
    /// the upper plane must sit strictly above the lower one.
    #[serde(default = "default_offset_upper")]
    pub plane_offset_upper: f64,
    #[serde(default = "default_offset_lower")]
    pub plane_offset_lower: f64,
    /// Axis foot height grows as scale·t^power.
    #[serde(default = "default_one")]
    pub axis_height_scale: f64,
    #[serde(default = "default_height_power")]
    pub axis_height_power: f64,
    /// Translation lengths decay as scale/t.
    #[serde(default = "default_one")]
    pub length_scale: f64,
    /// Elliptic axis feet move out as scale·t.
    #[serde(default = "default_elliptic_axis_scale")]
    pub elliptic_axis_scale: f64,
    /// Elliptic axis direction spins as rate·t².
    #[serde(default = "default_spin_rate")]
    pub spin_rate: f64,
    /// Second endpoint of the anchor geodesic (elliptic scenario).
    #[serde(default = "default_anchor")]
    pub anchor_endpoint: CP1,
    /// Root-finding tolerance for the scenario solves.
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    /// Twist target schedule s(t) = scale/t.
    #[serde(default = "default_one")]
    pub twist_schedule_scale: f64,
}

fn default_base_point() -> CP1 {
    CP1::Infinity
}
fn default_reference() -> (CP1, CP1) {
    (CP1::new(0.0, 0.0), CP1::Infinity)
}
fn default_offset_upper() -> f64 {
    10.0
}
fn default_offset_lower() -> f64 {
    -10.0
}
fn default_one() -> f64 {
    1.0
}
fn default_elliptic_axis_scale() -> f64 {
    2.5
}
fn default_height_power() -> f64 {
    1.0
}
fn default_spin_rate() -> f64 {
    2.0
}
fn default_anchor() -> CP1 {
    CP1::new(1.0, 0.0)
}
fn default_solver_tol() -> f64 {
    1e-12
}

impl ScenarioConfig {
    /// Geometric time grid from t0 to t1.
    pub fn geometric_times(n: usize, t0: f64, t1: f64) -> Vec<f64> {
        (0..n)
            .map(|k| t0 * (t1 / t0).powf(k as f64 / (n - 1) as f64))
            .collect()
    }

    /// The bundled default for a scenario: 64 samples up to t = 10³.
    pub fn bundled(scenario: ScenarioKind) -> ScenarioConfig {
        ScenarioConfig {
            scenario,
            times: Self::geometric_times(64, 25.0, 1000.0),
            base_point: default_base_point(),
            reference_endpoints: default_reference(),
            plane_offset_upper: default_offset_upper(),
            plane_offset_lower: default_offset_lower(),
            axis_height_scale: 1.0,
            axis_height_power: 1.0,
            length_scale: 0.0005,
            elliptic_axis_scale: 2.5,
            spin_rate: default_spin_rate(),
            anchor_endpoint: default_anchor(),
            solver_tol: default_solver_tol(),
            twist_schedule_scale: default_one(),
        }
    }

    pub fn validate(&self) -> Result<(), DegenerationError> {
        if self.times.len() < 8 {
            return Err(DegenerationError::ConfigInvalid(format!(
                "time grid has {} samples, need at least 8",
                self.times.len()
            )));
        }
        if !self.times.windows(2).all(|w| w[0] < w[1]) {
            return Err(DegenerationError::ConfigInvalid(
                "time grid must be strictly increasing".into(),
            ));
        }
        if self.times[0] <= 0.0 {
            return Err(DegenerationError::ConfigInvalid(
                "times must be positive".into(),
            ));
        }
        if self.plane_offset_lower >= self.plane_offset_upper {
            return Err(DegenerationError::ConfigInvalid(
                "lower plane offset must sit below the upper one".into(),
            ));
        }
        if self.solver_tol <= 0.0 || self.axis_height_scale <= 0.0 || self.length_scale <= 0.0 {
            return Err(DegenerationError::ConfigInvalid(
                "scales and tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Tolerance profile for trace certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolProfile {
    /// Floor below which the neck would count as the identity.
    pub identity_floor: f64,
    /// |tr² − 4| at the final sample.
    pub tr2_tol: f64,
    /// Consecutive axis-endpoint drift at the tail (geodesic target) or
    /// endpoint distance to the limit point (point target).
    pub axis_tol: f64,
    /// Tail Cauchy modulus for the side restrictions.
    pub side_tol: f64,
    /// Fraction of the path regarded as the tail.
    pub tail_frac: f64,
    /// Slack allowed in the monotonicity check of |tr² − 4|.
    pub monotone_slack: f64,
}

impl TolProfile {
    pub fn default_profile() -> Self {
        TolProfile {
            identity_floor: 1e-9,
            tr2_tol: 1e-6,
            axis_tol: 1e-3,
            side_tol: 5e-3,
            tail_frac: 0.5,
            monotone_slack: 1e-12,
        }
    }

    pub fn strict_profile() -> Self {
        TolProfile {
            identity_floor: 1e-9,
            tr2_tol: 1e-6,
            axis_tol: 1e-3,
            side_tol: 1e-3,
            tail_frac: 0.5,
            monotone_slack: 0.0,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default_profile()),
            "strict" => Some(Self::strict_profile()),
            _ => None,
        }
    }
}
