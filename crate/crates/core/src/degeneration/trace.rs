//! Per-sample degeneration records and their CSV form.

use super::config::ScenarioKind;
use crate::cp1::{Complex, CP1};
use crate::mobius::AxisResult;
use crate::surface_rep::{SurfaceRep, Word};
use serde::{Deserialize, Serialize};

/// One sample of a degeneration path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub rep: SurfaceRep,
    /// Squared trace of the neck image.
    pub tr2: Complex,
    /// tr² − 4 computed through the cancellation-free discriminant; the
    /// difference `tr2 - 4` loses everything below one ulp of 4.
    pub tr2_gap: Complex,
    /// Classification tag of the neck image.
    pub neck_class: String,
    /// Sign-insensitive distance of the neck image from the identity.
    pub neck_dist_identity: f64,
    pub axis: AxisResult,
    pub relator_defect: f64,
    /// Minimal Jørgensen certificate over the declared pair list, restricted
    /// to pairs with a non-elementary witness.
    pub jorgensen_min: Option<f64>,
    /// Maximal generator movement since the previous sample, per side.
    pub side_drift: [f64; 2],
    /// Maximal distance of the side-2 generator images from the identity.
    pub side2_dist_identity: f64,
    /// Twist exponent used at this sample (hyperbolic scenario).
    pub twist_exponent: Option<f64>,
}

/// A sampled degeneration path with its diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerationTrace {
    pub scenario: ScenarioKind,
    pub neck_word: Word,
    /// Word pairs scanned by the Jørgensen certificate search.
    pub jorgensen_pairs: Vec<(Word, Word)>,
    /// The expected limit point of the neck axis, when the construction
    /// pins one (elliptic scenario).
    pub axis_point_hint: Option<CP1>,
    pub samples: Vec<TraceSample>,
}

impl DegenerationTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn csv_header() -> &'static str {
        "t,tr2_gap_re,tr2_gap_im,neck_class,neck_dist_identity,axis_kind,axis_p_re,axis_p_im,axis_q_re,axis_q_im,relator_defect,jorgensen_min,side1_drift,side2_drift,side2_dist_identity,twist_exponent"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.samples
            .iter()
            .map(|s| {
                let (kind, p, q) = match &s.axis {
                    AxisResult::Geodesic(g) => ("geodesic", flat(&g.p), flat(&g.q)),
                    AxisResult::Point(pt) => ("point", flat(pt), (f64::NAN, f64::NAN)),
                    AxisResult::Undefined => {
                        ("undefined", (f64::NAN, f64::NAN), (f64::NAN, f64::NAN))
                    }
                };
                format!(
                    "{:.9e},{:.12e},{:.12e},{},{:.6e},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.6e},{},{:.6e},{:.6e},{:.6e},{}",
                    s.t,
                    s.tr2_gap.re,
                    s.tr2_gap.im,
                    s.neck_class,
                    s.neck_dist_identity,
                    kind,
                    p.0,
                    p.1,
                    q.0,
                    q.1,
                    s.relator_defect,
                    s.jorgensen_min
                        .map(|j| format!("{j:.6e}"))
                        .unwrap_or_else(|| "nan".into()),
                    s.side_drift[0],
                    s.side_drift[1],
                    s.side2_dist_identity,
                    s.twist_exponent
                        .map(|r| format!("{r:.6e}"))
                        .unwrap_or_else(|| "nan".into()),
                )
            })
            .collect()
    }
}

fn flat(p: &CP1) -> (f64, f64) {
    match p {
        CP1::Finite(z) => (z.re, z.im),
        CP1::Infinity => (f64::INFINITY, f64::INFINITY),
    }
}
