//! The elliptic-neck scenario: pants built from π-rotations about axes
//! symmetric across a reference geodesic, closed up by one-holed torus
//! pieces and doubled by the π-rotation about the neck axis.
//!
//! The construction lives in a pushed frame where the neck axis is the
//! constant geodesic (−1, 1) crossing the reference geodesic orthogonally;
//! there every piece converges and mixed traces stay bounded. The emitted
//! path is the unpushed one — conjugated per sample by the dilation-rotation
//! carrying (−1, 1) to the escaping, spinning axis — so the neck image is a
//! small elliptic whose axis runs off to the designated boundary point while
//! all squared traces still converge. The per-side drifts are recorded on
//! the pushed (normalized) restrictions, which is where the sides converge.

use super::config::{DegenerationError, ScenarioConfig, ScenarioKind};
use super::pieces::{torus_with_boundary, ShearCorner};
use super::trace::{DegenerationTrace, TraceSample};
use crate::cp1::{Complex, CP1};
use crate::mobius::{pi_rotation, GeodesicH3, MobiusMap};
use crate::surface_rep::{amalgamate, SurfacePresentation, SurfaceRep, Word};
use std::f64::consts::PI;

/// Schedule data produced by [`build_elliptic_path`].
#[derive(Debug, Clone, Copy)]
pub struct EllipticStep {
    /// The small elliptic element.
    pub e: MobiusMap,
    /// The real power taking its angle to π.
    pub u: f64,
    /// Rotation angle of `e`.
    pub angle: f64,
    /// Axis of `e` (endpoints in the caller's frame).
    pub axis: GeodesicH3,
}

/// A path of elliptic elements tending to the identity whose axes cross the
/// reference geodesic orthogonally, spin with the schedule, and escape to
/// the second endpoint of `r`; the rotation angle follows the admissible
/// branch (π + 2πk)/u at k = 0, so that e^{u} rotates by exactly π.
///
/// The spin accumulates quadratically, so the angle decays like 1/t² while
/// the axis feet move out linearly.
pub fn build_elliptic_path(
    r: &GeodesicH3,
    t: f64,
    axis_scale: f64,
    spin_rate: f64,
) -> Result<EllipticStep, DegenerationError> {
    assert!(t > 0.0, "schedule parameter must be positive");
    let frame = MobiusMap::taking_zero_inf_to(r.p, r.q).map_err(|e| {
        DegenerationError::ConfigInvalid(format!("bad reference geodesic: {e}"))
    })?;
    let mut spin = spin_rate * t * t;
    for retry in 0..2 {
        let u = 2.0 * spin;
        // Admissible angles are (π + 2πk)/u; the principal branch k = 0 is
        // the one on the decaying schedule.
        let angle = PI / u;
        let s = axis_scale * t;
        let dir = Complex::from_polar(s, spin);
        let axis_int = GeodesicH3::new(CP1::Finite(-dir), CP1::Finite(dir))
            .expect("distinct endpoints");
        let e_int = MobiusMap::rotation_about(&axis_int, angle).expect("valid axis");
        let e = e_int.conjugate(&frame);
        let axis = frame.apply_geodesic(&axis_int);
        // The angle adjustment makes angle·u ≡ π (mod 2π) exactly; validate
        // the real power against the directly built π-rotation, relatively,
        // since the trace route cannot resolve angles near π to 1e-9.
        let power = e.real_power(u);
        let target = MobiusMap::rotation_about(&axis, PI).expect("valid axis");
        let scale = 1.0
            + target.a.norm().max(target.b.norm()).max(target.c.norm()).max(target.d.norm());
        let ok = power.dist(&target) < 1e-8 * scale;
        if ok {
            return Ok(EllipticStep { e, u, angle, axis });
        }
        if retry == 0 {
            spin += 1e-4;
        }
    }
    Err(DegenerationError::SolverFailure {
        sample: 0,
        reason: format!("rotation branch selection failed at t = {t}"),
    })
}

/// The neck word of the glued genus-4 presentation (side-1 commutator block).
pub fn neck_word() -> Word {
    super::hyperbolic::neck_word()
}

/// Runs the elliptic-neck scenario.
pub fn elliptic_neck_path(cfg: &ScenarioConfig) -> Result<DegenerationTrace, DegenerationError> {
    assert_eq!(cfg.scenario, ScenarioKind::EllipticNeck);
    cfg.validate()?;
    let r_ext = GeodesicH3::new(cfg.reference_endpoints.0, cfg.reference_endpoints.1)
        .map_err(|e| DegenerationError::ConfigInvalid(format!("reference geodesic: {e}")))?;
    let frame = MobiusMap::taking_zero_inf_to(r_ext.p, r_ext.q)
        .map_err(|e| DegenerationError::ConfigInvalid(format!("reference geodesic: {e}")))?;
    // Internal frame: r = (0, ∞) with the degeneration point at ∞; pushed
    // frame: the neck axis is the constant geodesic (−1, 1).
    let r_int = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).expect("standard geodesic");
    let pushed_axis =
        GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0, 0.0)).expect("standard geodesic");
    let doubling_rot = pi_rotation(&pushed_axis).expect("standard axis");
    let anchor_end = match frame.inverse().apply(cfg.anchor_endpoint) {
        CP1::Finite(z) if z.norm() > 1e-9 => CP1::Finite(z),
        _ => CP1::new(1.0, 0.0),
    };
    let anchor = GeodesicH3::new(CP1::new(0.0, 0.0), anchor_end)
        .map_err(|e| DegenerationError::ConfigInvalid(format!("anchor geodesic: {e}")))?;
    let anchor_rot = pi_rotation(&anchor).expect("valid anchor");
    // Fixed generator bases limiting to parabolic elements through the
    // shared cusp endpoint of the anchor and the reference geodesic.
    let aux1 = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::new(2.0, 0.0)).expect("distinct");
    let aux2 = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::new(-2.0, 0.0)).expect("distinct");
    let rot_r = pi_rotation(&r_int).expect("reference geodesic");
    let base1 = rot_r * pi_rotation(&aux1).expect("valid aux");
    let base2 = rot_r * pi_rotation(&aux2).expect("valid aux");

    let m_word = neck_word();
    let pairs = super::hyperbolic::jorgensen_pairs();

    let mut samples: Vec<TraceSample> = Vec::with_capacity(cfg.times.len());
    let mut prev_pushed: Option<Vec<MobiusMap>> = None;
    let mut state = PieceState::fresh();

    for (k, &t) in cfg.times.iter().enumerate() {
        let spin = cfg.spin_rate * t * t;
        let u_power = 2.0 * spin;
        let angle = PI / u_power;
        // Pushed neck elliptic: rotation about the constant axis.
        let e = MobiusMap::rotation_about(&pushed_axis, angle).expect("standard axis");

        // Symmetric rotation axes: q = e^{1/4}·r, q' = e^{−1/4}·r; the
        // reference π-rotation reverses the neck axis, so R(q)R(q') = e.
        let quarter = e.real_power(0.25);
        let q_t = quarter.apply_geodesic(&r_int);
        let q_t_back = quarter.inverse().apply_geodesic(&r_int);
        let rot_q = pi_rotation(&q_t).map_err(|er| DegenerationError::SolverFailure {
            sample: k,
            reason: er.to_string(),
        })?;
        let rot_qb = pi_rotation(&q_t_back).map_err(|er| DegenerationError::SolverFailure {
            sample: k,
            reason: er.to_string(),
        })?;
        let recomposed = rot_q * rot_qb;
        if recomposed.dist(&e) > 1e-9 {
            return Err(DegenerationError::SolverFailure {
                sample: k,
                reason: format!("rotation decomposition residual {:.3e}", recomposed.dist(&e)),
            });
        }

        // Pants boundaries R(h)R(q), R(q)R(q') = e, R(q')R(h).
        let b1 = anchor_rot * rot_q;
        let b3 = rot_qb * anchor_rot;

        let piece1 = torus_with_boundary(
            &b1.inverse(),
            &base1,
            ShearCorner::Upper,
            state.s1,
            &state.beta1,
            k,
        )?;
        let piece2 = torus_with_boundary(
            &b3.inverse(),
            &base2,
            ShearCorner::Upper,
            state.s2,
            &state.beta2,
            k,
        )?;
        state.s1 = piece1.shift;
        state.s2 = piece2.shift;
        state.beta1 = piece1.b;
        state.beta2 = piece2.b;

        let pres = SurfacePresentation::new(2, 1);
        let side = SurfaceRep::new(
            pres.clone(),
            vec![piece1.a, piece1.b, piece2.a, piece2.b, e.inverse()],
        );
        let boundary_eval = side
            .evaluate(&Word::commutator(&Word::generator(0), &Word::generator(1)).concat(
                &Word::commutator(&Word::generator(2), &Word::generator(3)),
            ))
            .expect("valid word");
        if boundary_eval.dist(&e) > 1e-8 {
            return Err(DegenerationError::SolverFailure {
                sample: k,
                reason: format!("side peripheral residual {:.3e}", boundary_eval.dist(&e)),
            });
        }

        // Double across the neck by the π-rotation about the (pushed) neck
        // axis, which commutes with the neck elliptic.
        let rep2 = SurfaceRep::new(
            pres,
            vec![
                side.images[3].conjugate(&doubling_rot),
                side.images[2].conjugate(&doubling_rot),
                side.images[1].conjugate(&doubling_rot),
                side.images[0].conjugate(&doubling_rot),
                e.conjugate(&doubling_rot),
            ],
        );
        let glued = amalgamate(&side, &rep2, &MobiusMap::IDENTITY, 1e-6).map_err(|er| {
            DegenerationError::SolverFailure { sample: k, reason: er.to_string() }
        })?;

        // Normalized-restriction drifts live in the pushed frame.
        let side1_drift = super::drift_over(&glued.images, prev_pushed.as_deref(), 0..4);
        let side2_drift = super::drift_over(&glued.images, prev_pushed.as_deref(), 4..8);
        prev_pushed = Some(glued.images.clone());

        // Unpush: carry the constant axis (−1, 1) to (−d_t, d_t) with
        // d_t = s·e^{iθ}, then into the external frame. Traces are
        // unchanged; the neck axis now escapes to the designated point.
        let s_len = cfg.elliptic_axis_scale * t;
        let unpush = MobiusMap::dilation(Complex::new(s_len.ln(), spin));
        let stored = glued.conjugated(&(frame * unpush));
        let neck = stored
            .evaluate(&m_word)
            .map_err(|er| DegenerationError::SolverFailure { sample: k, reason: er.to_string() })?;

        samples.push(super::sample_record(
            t,
            stored,
            neck,
            &pairs,
            1e-15,
            [side1_drift, side2_drift],
            f64::NAN,
            None,
        ));
    }

    Ok(DegenerationTrace {
        scenario: ScenarioKind::EllipticNeck,
        neck_word: m_word,
        jorgensen_pairs: pairs,
        axis_point_hint: Some(r_ext.q),
        samples,
    })
}

struct PieceState {
    s1: Complex,
    s2: Complex,
    beta1: MobiusMap,
    beta2: MobiusMap,
}

impl PieceState {
    fn fresh() -> Self {
        PieceState {
            s1: Complex::new(0.0, 0.0),
            s2: Complex::new(0.0, 0.0),
            beta1: MobiusMap::translation(Complex::new(0.0, 1.0)),
            beta2: MobiusMap::translation(Complex::new(0.0, -1.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::MobiusClass;

    #[test]
    fn elliptic_path_powers_to_pi() {
        let r = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let mut last_angle = f64::INFINITY;
        for t in [25.0, 100.0, 400.0, 1000.0] {
            let step = build_elliptic_path(&r, t, 2.5, 2.0).unwrap();
            // The designated real power rotates by π about the same axis.
            let p = step.e.real_power(step.u);
            let target = MobiusMap::rotation_about(&step.axis, PI).unwrap();
            let scale = 1.0 + target.b.norm().max(target.c.norm());
            assert!(p.dist(&target) < 1e-8 * scale);
            assert!(matches!(p.classify(1e-6), MobiusClass::Elliptic { angle } if (angle - PI).abs() < 1e-5));
            // The angle decays monotonically along the schedule.
            assert!(step.angle < last_angle);
            last_angle = step.angle;
            // The axis feet escape toward the designated endpoint of r.
            let foot_gap = step.axis.p.chordal(&CP1::Infinity).min(step.axis.q.chordal(&CP1::Infinity));
            assert!(foot_gap < 2.0 / (2.0 * t), "feet at chordal {foot_gap:.3e} from the endpoint");
        }
    }
}
