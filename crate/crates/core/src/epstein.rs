//! Exact holonomy and frame geometry for the exponential developing model of
//! flat cylinders, plus validators for the curvature/speed estimates that
//! control how far a measured frame transport may drift from the model.

use crate::cp1::Complex;
use crate::mobius::{MobiusError, MobiusMap};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpsteinError {
    #[error("zero period has no cylinder holonomy")]
    ZeroPeriod,
    #[error("distance to the zero set must be positive, got {0}")]
    NonPositiveDistance(f64),
}

/// Frame transport along the reference axis: signed hyperbolic distance and
/// unwrapped rotation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFrame {
    pub distance: f64,
    pub angle: f64,
}

impl ModelFrame {
    pub fn add(&self, other: &ModelFrame) -> ModelFrame {
        ModelFrame {
            distance: self.distance + other.distance,
            angle: self.angle + other.angle,
        }
    }

    pub fn scale(&self, k: f64) -> ModelFrame {
        ModelFrame { distance: k * self.distance, angle: k * self.angle }
    }
}

/// Exact frame transport of the exponential model: a flat step w moves the
/// frame by hyperbolic distance √2·Re w and turns it by √2·Im w. Linear in w.
pub fn model_epstein_frame(w: Complex) -> ModelFrame {
    ModelFrame { distance: SQRT_2 * w.re, angle: SQRT_2 * w.im }
}

/// Exact holonomy of a flat cylinder of period c in the model normalization:
/// the Möbius map ω ↦ e^{√2 c} ω with axis (0, ∞).
///
/// Its complex length equals √2·c mod 2πi; the real part is translation and
/// the imaginary part rotation.
pub fn cylinder_holonomy(c: Complex) -> Result<MobiusMap, EpsteinError> {
    if c.norm() == 0.0 {
        return Err(EpsteinError::ZeroPeriod);
    }
    Ok(MobiusMap::dilation(SQRT_2 * c))
}

/// Same map about an arbitrary axis.
pub fn cylinder_holonomy_about(
    c: Complex,
    axis: &crate::mobius::GeodesicH3,
) -> Result<MobiusMap, EpsteinError> {
    let std = cylinder_holonomy(c)?;
    let frame = MobiusMap::taking_zero_inf_to(axis.p, axis.q)
        .map_err(|_| EpsteinError::ZeroPeriod)?;
    Ok(std.conjugate(&frame))
}

impl From<MobiusError> for EpsteinError {
    fn from(_: MobiusError) -> Self {
        EpsteinError::ZeroPeriod
    }
}

/// Measured frame quantities fed to the bound validators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredFrame {
    /// Speed of the image of a unit horizontal vector.
    pub h_speed: f64,
    /// Speed of the image of a unit vertical vector.
    pub v_speed: f64,
    /// Curvature in the vertical principal direction.
    pub v_curvature: f64,
    /// Product of horizontal curvature and horizontal speed.
    pub h_curv_speed_product: f64,
}

impl MeasuredFrame {
    /// The exact model saturates the bounds: zero horizontal speed and
    /// curvature, vertical speed √2, horizontal product √2.
    pub fn exact_model() -> Self {
        MeasuredFrame {
            h_speed: 0.0,
            v_speed: SQRT_2,
            v_curvature: 0.0,
            h_curv_speed_product: SQRT_2,
        }
    }
}

/// One inequality outcome with its measured slack (nonnegative = pass).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub pass: bool,
    pub slack: f64,
}

/// Report of the four frame bounds at distance d from the zero set.
///
/// The checks are meaningful only when 6/d² < 3/4 (`applicable`). The
/// vertical lower bound is evaluated with an epsilon so that the exact model
/// value √2 passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d: f64,
    pub applicable: bool,
    /// h_speed < 6/d².
    pub horizontal_speed: BoundCheck,
    /// √2 ≤ v_speed < √2 + 6/d².
    pub vertical_speed: BoundCheck,
    /// |v_curvature| < 6/d².
    pub vertical_curvature: BoundCheck,
    /// |h_curv_speed_product − √2| ≤ K/d.
    pub horizontal_product: BoundCheck,
    /// The constant K in the horizontal product bound. An artifact constant
    /// standing in for an unspecified O(1/d); configurable, never asserted
    /// as anything more.
    pub product_constant: f64,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.applicable
            && self.horizontal_speed.pass
            && self.vertical_speed.pass
            && self.vertical_curvature.pass
            && self.horizontal_product.pass
    }

    pub fn csv_header() -> &'static str {
        "d,applicable,h_speed_slack,v_speed_slack,v_curv_slack,h_product_slack,all_pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6e},{},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            self.d,
            self.applicable,
            self.horizontal_speed.slack,
            self.vertical_speed.slack,
            self.vertical_curvature.slack,
            self.horizontal_product.slack,
            self.all_pass()
        )
    }
}

pub const DEFAULT_PRODUCT_CONSTANT: f64 = 12.0;

pub fn dumas_bounds_check(d: f64, m: &MeasuredFrame) -> Result<BoundReport, EpsteinError> {
    dumas_bounds_check_with(d, m, DEFAULT_PRODUCT_CONSTANT)
}

pub fn dumas_bounds_check_with(
    d: f64,
    m: &MeasuredFrame,
    product_constant: f64,
) -> Result<BoundReport, EpsteinError> {
    if d <= 0.0 {
        return Err(EpsteinError::NonPositiveDistance(d));
    }
    let bound = 6.0 / (d * d);
    let applicable = bound < 0.75;
    let eps = 1e-12;

    let h_slack = bound - m.h_speed;
    let v_lower = m.v_speed - SQRT_2;
    let v_upper = SQRT_2 + bound - m.v_speed;
    let v_slack = v_lower.min(v_upper);
    let k_slack = bound - m.v_curvature.abs();
    let p_slack = product_constant / d - (m.h_curv_speed_product - SQRT_2).abs();

    Ok(BoundReport {
        d,
        applicable,
        horizontal_speed: BoundCheck { pass: h_slack > 0.0, slack: h_slack },
        vertical_speed: BoundCheck { pass: v_slack > -eps, slack: v_slack },
        vertical_curvature: BoundCheck { pass: k_slack > 0.0, slack: k_slack },
        horizontal_product: BoundCheck { pass: p_slack >= 0.0, slack: p_slack },
        product_constant,
    })
}

/// Polygonal frame transport along the core of a cylinder of period c,
/// sampled at `n_steps`, each step scaled by `step_scale` (1.0 reproduces
/// the exact transport; tests inject multiplicative noise through it).
pub fn polygonal_transport(c: Complex, n_steps: usize, step_scale: f64) -> ModelFrame {
    assert!(n_steps >= 2, "need at least two steps");
    let step = c / n_steps as f64;
    let mut acc = ModelFrame { distance: 0.0, angle: 0.0 };
    for _ in 0..n_steps {
        acc = acc.add(&model_epstein_frame(step).scale(step_scale));
    }
    acc
}

/// Relative discrepancy between two frames: the larger of the translation
/// and rotation relative errors.
pub fn frame_discrepancy(exact: &ModelFrame, measured: &ModelFrame) -> f64 {
    let rel = |e: f64, m: f64| {
        let scale = e.abs().max(1e-12);
        (m - e).abs() / scale
    };
    rel(exact.distance, measured.distance).max(rel(exact.angle, measured.angle))
}

/// Compares the exact holonomy decomposition (translation √2 Re c, rotation
/// √2 Im c) against the polygonal frame transport along the core. The model
/// is exact, so the result is zero for any step count; the injected-noise
/// variants live in [`polygonal_transport`].
pub fn cylinder_estimate_discrepancy(
    c: Complex,
    height: f64,
    n_steps: usize,
) -> Result<f64, EpsteinError> {
    if c.norm() == 0.0 {
        return Err(EpsteinError::ZeroPeriod);
    }
    assert!(height > 0.0, "cylinder height must be positive");
    assert!(n_steps >= 2, "need at least two steps");
    let exact = model_epstein_frame(c);
    let transported = polygonal_transport(c, n_steps, 1.0);
    Ok(frame_discrepancy(&exact, &transported))
}
