//! End-to-end construction of the two degeneration scenarios and the
//! certification of their limit behavior.

pub mod certify;
pub mod config;
pub mod controls;
pub mod elliptic;
pub mod hyperbolic;
pub mod pieces;
pub mod trace;

pub use certify::{certify_trace, CertificateReport, ClauseReport};
pub use config::{DegenerationError, ScenarioConfig, ScenarioKind, TolProfile};
pub use elliptic::{build_elliptic_path, elliptic_neck_path};
pub use hyperbolic::{build_small_hyperbolics, hyperbolic_neck_path, PlaneData};
pub use trace::{DegenerationTrace, TraceSample};

use crate::mobius::MobiusMap;
use crate::surface_rep::{elementary_type, ElementaryType, SurfaceRep, Word};

/// Assembles one trace sample: neck diagnostics, relator defect, and the
/// Jørgensen scan over the declared pairs. The per-side drifts are computed
/// by the scenarios on their normalized restrictions; `class_tol` is the
/// classification tolerance appropriate to the scenario's trace scale.
#[allow(clippy::too_many_arguments)]
pub(crate) fn sample_record(
    t: f64,
    rep: SurfaceRep,
    neck: MobiusMap,
    pairs: &[(Word, Word)],
    class_tol: f64,
    side_drift: [f64; 2],
    side2_dist_identity: f64,
    twist_exponent: Option<f64>,
) -> TraceSample {
    let tr2_gap = neck.trace_sq_minus_four();
    let tr2 = tr2_gap + 4.0;
    let class = neck.classify(class_tol);
    let axis = neck.axis_with_tol(class_tol);
    let relator_defect = rep.relator_defect();

    let mut j_min: Option<f64> = None;
    for (u, v) in pairs {
        let (Ok(a), Ok(b)) = (rep.evaluate(u), rep.evaluate(v)) else {
            continue;
        };
        if elementary_type(&[a, b], 1e-9) != ElementaryType::NonElementary {
            continue;
        }
        let j = crate::mobius::jorgensen_certificate(&a, &b);
        j_min = Some(j_min.map_or(j, |m: f64| m.min(j)));
    }

    TraceSample {
        t,
        rep,
        tr2,
        tr2_gap,
        neck_class: class.tag().to_string(),
        neck_dist_identity: neck.dist_to_identity(),
        axis,
        relator_defect,
        jorgensen_min: j_min,
        side_drift,
        side2_dist_identity,
        twist_exponent,
    }
}

/// Max generator movement between two image lists over an index range.
pub(crate) fn drift_over(
    current: &[MobiusMap],
    prev: Option<&[MobiusMap]>,
    range: std::ops::Range<usize>,
) -> f64 {
    match prev {
        Some(p) => range
            .map(|i| current[i].dist(&p[i]))
            .fold(0.0f64, f64::max),
        None => f64::NAN,
    }
}
