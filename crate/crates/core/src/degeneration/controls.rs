//! Negative controls guarding the certifiers against vacuous passes: a
//! constant path whose neck trace stays away from 4, and a constant discrete
//! free group on which the Jørgensen certificate must never fire.

use super::config::ScenarioKind;
use super::trace::DegenerationTrace;
use crate::cp1::Complex;
use crate::mobius::MobiusMap;
use crate::surface_rep::{SurfacePresentation, SurfaceRep};

fn c64(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// A constant genus-4 representation sampled along the grid. The neck trace
/// sits at a fixed hyperbolic value, so certificate clauses (a) and (b) must
/// fail on it.
pub fn constant_control_trace(times: &[f64]) -> DegenerationTrace {
    let a = MobiusMap::dilation(c64(0.9, 0.0));
    let b = MobiusMap::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.8, 0.0), c64(1.0, 0.0)).unwrap();
    let pres = SurfacePresentation::new(4, 0);
    let t1 = MobiusMap::translation(c64(1.0, 0.5));
    let d1 = MobiusMap::dilation(c64(0.3, 0.0));
    let images = relator_exact_double(&pres, vec![a, b, t1, d1]);
    let rep = SurfaceRep::new(pres, images);
    let m_word = super::hyperbolic::neck_word();
    let pairs = super::hyperbolic::jorgensen_pairs();
    let neck = rep.evaluate(&m_word).unwrap();
    let samples = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let drift = if k == 0 { f64::NAN } else { 0.0 };
            super::sample_record(
                t,
                rep.clone(),
                neck,
                &pairs,
                1e-9,
                [drift, drift],
                0.0,
                None,
            )
        })
        .collect();
    DegenerationTrace {
        scenario: ScenarioKind::HyperbolicNeck,
        neck_word: m_word,
        jorgensen_pairs: pairs,
        axis_point_hint: None,
        samples,
    }
}

/// A constant discrete free-group control: the standard pair of parabolic
/// generators with large translation, arranged on all four handles. The
/// Jørgensen scan must never report a certificate below 1 on it.
pub fn discrete_control_trace(times: &[f64]) -> DegenerationTrace {
    let a = MobiusMap::new(c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
    let b = MobiusMap::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)).unwrap();
    let pres = SurfacePresentation::new(4, 0);
    // Relator-exact: the second block undoes the first.
    let images = vec![a, b, b * a * b.inverse(), b, a, b, b * a * b.inverse(), b];
    let images = relator_exact_double(&pres, images);
    let rep = SurfaceRep::new(pres, images);
    let m_word = super::hyperbolic::neck_word();
    let pairs = super::hyperbolic::jorgensen_pairs();
    let neck = rep.evaluate(&m_word).unwrap();
    let samples = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let drift = if k == 0 { f64::NAN } else { 0.0 };
            super::sample_record(
                t,
                rep.clone(),
                neck,
                &pairs,
                1e-9,
                [drift, drift],
                0.0,
                None,
            )
        })
        .collect();
    DegenerationTrace {
        scenario: ScenarioKind::EllipticNeck,
        neck_word: m_word,
        jorgensen_pairs: pairs,
        axis_point_hint: None,
        samples,
    }
}

/// Makes the 8-generator assignment relator-exact by mirroring the first
/// half: with (a₃,b₃,a₄,b₄) = (b₂,a₂,b₁,a₁), the commutator blocks cancel.
fn relator_exact_double(
    pres: &SurfacePresentation,
    first_half: Vec<MobiusMap>,
) -> Vec<MobiusMap> {
    assert_eq!(pres.genus, 4);
    let (a1, b1, a2, b2) = (first_half[0], first_half[1], first_half[2], first_half[3]);
    vec![a1, b1, a2, b2, b2, a2, b1, a1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::certify::certify_trace;
    use crate::degeneration::config::TolProfile;

    fn times() -> Vec<f64> {
        crate::degeneration::ScenarioConfig::geometric_times(16, 1.0, 100.0)
    }

    #[test]
    fn constant_control_fails_trace_clause() {
        let trace = constant_control_trace(&times());
        assert!(trace.samples[0].relator_defect < 1e-9);
        let report = certify_trace(&trace, &TolProfile::default_profile());
        assert!(!report.pass);
        let b = report.clauses.iter().find(|c| c.name.starts_with("b-")).unwrap();
        assert!(!b.pass, "constant trace must fail the tr² limit clause");
    }

    #[test]
    fn discrete_control_never_fires_jorgensen() {
        let trace = discrete_control_trace(&times());
        assert!(trace.samples[0].relator_defect < 1e-12);
        for s in &trace.samples {
            if let Some(j) = s.jorgensen_min {
                assert!(j >= 1.0, "discrete control produced certificate {j}");
            }
        }
        let report = certify_trace(&trace, &TolProfile::default_profile());
        assert!(report.jorgensen_threshold_index.is_none());
    }
}
