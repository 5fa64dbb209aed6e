//! The hyperbolic-neck scenario: a punctured genus-2 representation built
//! from the L-shape translation holonomy deformed through rotation axes,
//! doubled with a diverging twist so the neck image is hyperbolic with real
//! squared trace tending to 4 while the second side collapses to the
//! trivial representation.

use super::config::{DegenerationError, ScenarioConfig, ScenarioKind};
use super::pieces::{ray_rotation, torus_with_boundary, ShearCorner};
use super::trace::{DegenerationTrace, TraceSample};
use crate::cp1::{Complex, CP1};
use crate::h3::{displacement, H3Point};
use crate::mobius::{GeodesicH3, MobiusMap};
use crate::surface_rep::{amalgamate, SurfacePresentation, SurfaceRep, Word};

/// A hyperbolic plane tangent to the degeneration point: in the normalized
/// frame (point at ∞) it is the vertical plane over the horizontal line
/// Im z = offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneData {
    pub offset: f64,
}

/// Schedule knobs for [`build_small_hyperbolics`].
#[derive(Debug, Clone, Copy)]
pub struct SmallHyperbolicScales {
    /// Axis foot height y = scale·t^power.
    pub axis_height_scale: f64,
    pub axis_height_power: f64,
    /// First translation length ℓ₁ = scale/t.
    pub length_scale: f64,
    /// Root-finding tolerance on the fixed-point condition.
    pub solver_tol: f64,
}

impl Default for SmallHyperbolicScales {
    fn default() -> Self {
        SmallHyperbolicScales {
            axis_height_scale: 1.0,
            axis_height_power: 1.0,
            length_scale: 0.0005,
            solver_tol: 1e-12,
        }
    }
}

/// The frame sending the normalized degeneration point ∞ to `p`.
fn frame_to(p: CP1) -> MobiusMap {
    match p {
        CP1::Infinity => MobiusMap::IDENTITY,
        // z ↦ p + 1/z sends ∞ to p.
        CP1::Finite(w) => MobiusMap::new(
            w,
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        )
        .expect("unimodular"),
    }
}

/// Two small hyperbolic elements whose axes rise toward the degeneration
/// point orthogonally to the two tangent planes, with the second translation
/// length tuned so that h₁h₂ fixes the midpoint target w* between the
/// planes. As t grows, both elements tend to the identity and the
/// composition becomes a hyperbolic element whose axis approaches the
/// geodesic from the degeneration point to w*.
pub fn build_small_hyperbolics(
    p: CP1,
    h1_plane: PlaneData,
    h2_plane: PlaneData,
    t: f64,
    scales: &SmallHyperbolicScales,
) -> Result<(MobiusMap, MobiusMap), DegenerationError> {
    assert!(t > 0.0, "schedule parameter must be positive");
    let (beta1, beta2) = (h1_plane.offset, h2_plane.offset);
    if (beta1 - beta2).abs() < 1e-12 {
        return Err(DegenerationError::ConfigInvalid(
            "tangent planes must be distinct".into(),
        ));
    }
    let (upper, lower) = if beta1 > beta2 { (beta1, beta2) } else { (beta2, beta1) };
    // The axis top rises like t^power: fast enough that the composition's
    // escaping fixed point reaches the degeneration point, slow enough that
    // the squared neck trace stays resolvably away from 4 at desk scale.
    let y = scales.axis_height_scale * t.powf(scales.axis_height_power);
    let ell1 = scales.length_scale / t;
    let target = (upper + lower) / 2.0;

    // Axis endpoints on the boundary line of the common perpendicular plane,
    // oriented so the cyclic order of the fixed points is (v2, u1, u2, v1):
    // h1 attracts downward toward upper − y, h2 attracts upward to lower + y.
    let h1_axis = GeodesicH3::new(
        CP1::new(0.0, upper + y),
        CP1::new(0.0, upper - y),
    )
    .expect("distinct endpoints");
    let h1 = MobiusMap::translation_along(&h1_axis, ell1).expect("valid axis");

    let h2_of = |ell: f64| -> MobiusMap {
        let axis = GeodesicH3::new(CP1::new(0.0, lower - y), CP1::new(0.0, lower + y))
            .expect("distinct endpoints");
        MobiusMap::translation_along(&axis, ell).expect("valid axis")
    };
    let w_star = Complex::new(0.0, target);
    let gap = |ell: f64| -> f64 {
        let m = h1 * h2_of(ell);
        match m.apply(CP1::Finite(w_star)) {
            CP1::Finite(z) => z.im - target,
            CP1::Infinity => f64::INFINITY,
        }
    };

    let (mut lo, mut hi) = (ell1 / 50.0, ell1 * 50.0);
    let (mut glo, mut ghi) = (gap(lo), gap(hi));
    if glo.signum() == ghi.signum() {
        lo = ell1 / 2000.0;
        hi = ell1 * 2000.0;
        glo = gap(lo);
        ghi = gap(hi);
        if glo.signum() == ghi.signum() {
            return Err(DegenerationError::RootBracketFailure { t, lo, hi });
        }
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        let gm = gap(mid);
        if gm == 0.0 || (hi - lo) < scales.solver_tol * ell1 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    let _ = ghi;
    let ell2 = 0.5 * (lo + hi);
    let h2 = h2_of(ell2);

    let frame = frame_to(p);
    Ok((h1.conjugate(&frame), h2.conjugate(&frame)))
}

/// Names of the eight handle generators of the glued genus-4 surface.
pub const GLUED_GENUS: usize = 4;

pub(crate) struct ScenarioPieces {
    pub side: SurfaceRep,
    pub neck_image: MobiusMap,
}

/// Builds the punctured genus-2 side representation in the normalized frame:
/// two one-holed-torus pieces with boundary images h₁, h₂, so the peripheral
/// word evaluates to h₁h₂ exactly.
fn build_side(
    h1: &MobiusMap,
    h2: &MobiusMap,
    cfg: &ScenarioConfig,
    t: f64,
    state: &mut SideState,
    sample: usize,
) -> Result<ScenarioPieces, DegenerationError> {
    let (upper, lower) = (cfg.plane_offset_upper, cfg.plane_offset_lower);
    let _ = t;

    // Rotated rays q_{i,t} = h_i^{1/4}·(vertical ray over the foot): the
    // symmetric involution factors of the boundary elements.
    let q1 = ray_rotation(Complex::new(0.0, upper)).conjugate(&h1.real_power(0.25));
    let q2 = ray_rotation(Complex::new(0.0, lower)).conjugate(&h2.real_power(0.25));

    // Generator bases R(q_{i,t})·R(ray): translations in the limit, with
    // offsets in the two crossing directions of the L-shape.
    let base1 = q1 * ray_rotation(Complex::new(0.0, upper) + Complex::new(0.25, 0.0));
    let base2 = q2 * ray_rotation(Complex::new(0.0, lower) + Complex::new(0.15, 0.0));

    let piece1 = torus_with_boundary(h1, &base1, ShearCorner::Lower, state.s1, &state.beta1, sample)?;
    let piece2 = torus_with_boundary(h2, &base2, ShearCorner::Lower, state.s2, &state.beta2, sample)?;
    state.s1 = piece1.shift;
    state.s2 = piece2.shift;
    state.beta1 = piece1.b;
    state.beta2 = piece2.b;

    let neck_image = *h1 * *h2;
    let pres = SurfacePresentation::new(2, 1);
    let side = SurfaceRep::new(
        pres,
        vec![
            piece1.a,
            piece1.b,
            piece2.a,
            piece2.b,
            neck_image.inverse(),
        ],
    );
    Ok(ScenarioPieces { side, neck_image })
}

pub(crate) struct SideState {
    pub s1: Complex,
    pub s2: Complex,
    pub beta1: MobiusMap,
    pub beta2: MobiusMap,
}

impl SideState {
    fn fresh() -> Self {
        SideState {
            s1: Complex::new(0.0, 0.0),
            s2: Complex::new(0.0, 0.0),
            beta1: MobiusMap::translation(Complex::new(0.0, 0.25)),
            beta2: MobiusMap::translation(Complex::new(0.0, 0.15)),
        }
    }
}

/// The neck word of the glued genus-4 presentation: the side-1 commutator
/// block [a₁,b₁][a₂,b₂].
pub fn neck_word() -> Word {
    let pres = SurfacePresentation::new(4, 0);
    Word::commutator(&Word::generator(pres.a(1)), &Word::generator(pres.b(1))).concat(
        &Word::commutator(&Word::generator(pres.a(2)), &Word::generator(pres.b(2))),
    )
}

/// Word pairs scanned for the Jørgensen certificate.
pub fn jorgensen_pairs() -> Vec<(Word, Word)> {
    let m = neck_word();
    let mut pairs = Vec::new();
    for g in 0..8 {
        pairs.push((m.clone(), Word::generator(g)));
    }
    for g in 0..4 {
        pairs.push((Word::generator(g), Word::generator(4 + g)));
    }
    pairs
}

/// Runs the hyperbolic-neck scenario.
pub fn hyperbolic_neck_path(cfg: &ScenarioConfig) -> Result<DegenerationTrace, DegenerationError> {
    assert_eq!(cfg.scenario, ScenarioKind::HyperbolicNeck);
    cfg.validate()?;
    let scales = SmallHyperbolicScales {
        axis_height_scale: cfg.axis_height_scale,
        axis_height_power: cfg.axis_height_power,
        length_scale: cfg.length_scale,
        solver_tol: cfg.solver_tol,
    };
    let frame = frame_to(cfg.base_point);
    let m_word = neck_word();
    let pairs = jorgensen_pairs();

    let mut state = SideState::fresh();
    let mut samples: Vec<TraceSample> = Vec::with_capacity(cfg.times.len());
    let mut prev_images: Option<Vec<MobiusMap>> = None;
    let mut r_prev = 1.0f64;

    for (k, &t) in cfg.times.iter().enumerate() {
        let (h1, h2) = build_small_hyperbolics(
            CP1::Infinity,
            PlaneData { offset: cfg.plane_offset_upper },
            PlaneData { offset: cfg.plane_offset_lower },
            t,
            &scales,
        )?;
        let pieces = build_side(&h1, &h2, cfg, t, &mut state, k)?;
        let side = pieces.side;
        let w = pieces.neck_image;

        // Inverted copy carrying the second side; its peripheral image is
        // w⁻¹-inverse-compatible by the reindexing.
        let pres = SurfacePresentation::new(2, 1);
        let rep2 = SurfaceRep::new(
            pres,
            vec![
                side.images[3],
                side.images[2],
                side.images[1],
                side.images[0],
                w,
            ],
        );

        // Twist exponent: doubling line search until the conjugated side-2
        // displacement at the basepoint drops below the schedule.
        let schedule = cfg.twist_schedule_scale / t;
        // Powers of w through its fixed-point frame: the conjugator then
        // commutes with w to the frame's own roundoff, independently of the
        // exponent, which real_power's logarithm route cannot guarantee for
        // near-parabolic w at large exponents.
        let w_fixed = w.fixed_points().map_err(|e| DegenerationError::SolverFailure {
            sample: k,
            reason: e.to_string(),
        })?;
        let w_frame = MobiusMap::taking_zero_inf_to(w_fixed[0], w_fixed[1]).map_err(|e| {
            DegenerationError::SolverFailure { sample: k, reason: e.to_string() }
        })?;
        // The neck stays genuinely hyperbolic but its squared trace sits
        // within the default classification tolerance of 4 at the tail, so
        // compute the length through the unguarded route.
        let w_length = w.complex_length_unchecked();
        let twist_power = |r: f64| -> MobiusMap {
            MobiusMap::dilation(r * w_length).conjugate(&w_frame)
        };
        let side2_disp = |r: f64| -> f64 {
            let tw = twist_power(r);
            rep2.images[..4]
                .iter()
                .map(|g| displacement(&tw.conjugate_into(g), &H3Point::ORIGIN))
                .fold(0.0f64, f64::max)
        };
        let mut r = r_prev.max(1.0);
        let mut best_r = r;
        let mut best_d = side2_disp(r);
        let mut worse = 0;
        for _ in 0..60 {
            if best_d <= schedule {
                break;
            }
            r *= 2.0;
            let d = side2_disp(r);
            if d < best_d {
                best_d = d;
                best_r = r;
                worse = 0;
            } else {
                worse += 1;
                if worse >= 3 {
                    break;
                }
            }
        }
        // The doubling brackets the contraction optimum; refine inside the
        // bracket since a factor-2 grid can sit well above the minimum.
        let (mut lo, mut hi) = (best_r / 2.0, best_r * 2.0);
        for _ in 0..40 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if side2_disp(m1) <= side2_disp(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let refined = 0.5 * (lo + hi);
        if side2_disp(refined) < best_d {
            best_r = refined;
        }
        r_prev = best_r;
        let twist = twist_power(best_r);

        let glued = amalgamate(&side, &rep2, &twist, 1e-6).map_err(|e| {
            DegenerationError::SolverFailure { sample: k, reason: e.to_string() }
        })?;
        let glued = glued.conjugated(&frame);
        let neck = glued
            .evaluate(&m_word)
            .map_err(|e| DegenerationError::SolverFailure { sample: k, reason: e.to_string() })?;

        let side_drift = [
            super::drift_over(&glued.images, prev_images.as_deref(), 0..4),
            super::drift_over(&glued.images, prev_images.as_deref(), 4..8),
        ];
        let side2_dist = glued.images[4..]
            .iter()
            .map(|m| m.dist_to_identity())
            .fold(0.0f64, f64::max);
        // The neck trace gap decays to ~1e-16, far below the default
        // boundary-case tolerance but far above the discriminant noise.
        samples.push(super::sample_record(
            t,
            glued,
            neck,
            &pairs,
            1e-18,
            side_drift,
            side2_dist,
            Some(best_r),
        ));
        prev_images = Some(samples.last().unwrap().rep.images.clone());
    }

    Ok(DegenerationTrace {
        scenario: ScenarioKind::HyperbolicNeck,
        neck_word: m_word,
        jorgensen_pairs: pairs,
        axis_point_hint: None,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{AxisResult, MobiusClass};

    fn scales() -> SmallHyperbolicScales {
        SmallHyperbolicScales::default()
    }

    #[test]
    fn small_hyperbolics_at_large_t() {
        let (h1, h2) = build_small_hyperbolics(
            CP1::Infinity,
            PlaneData { offset: 10.0 },
            PlaneData { offset: -10.0 },
            1000.0,
            &scales(),
        )
        .unwrap();
        assert!(h1.dist_to_identity() < 1e-2, "{}", h1.dist_to_identity());
        let w = h1 * h2;
        assert!(matches!(w.classify(1e-18), MobiusClass::Hyperbolic { .. }));
        // Axis approaches the vertical geodesic from the degeneration point
        // to the midpoint target w* = 0.
        let AxisResult::Geodesic(axis) = w.axis_with_tol(1e-18) else {
            panic!("expected a geodesic axis");
        };
        let q = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        assert!(crate::mobius::geodesic_distance(&axis, &q) < 1e-3);
    }

    #[test]
    fn small_hyperbolics_approach_is_asymptotic() {
        // The composition is hyperbolic from the start, with the axis
        // strictly closer to the target at later times.
        let q = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let gap_at = |t: f64| -> f64 {
            let (h1, h2) = build_small_hyperbolics(
                CP1::Infinity,
                PlaneData { offset: 10.0 },
                PlaneData { offset: -10.0 },
                t,
                &scales(),
            )
            .unwrap();
            let w = h1 * h2;
            assert!(matches!(w.classify(1e-18), MobiusClass::Hyperbolic { .. }));
            let AxisResult::Geodesic(axis) = w.axis_with_tol(1e-18) else {
                panic!("expected a geodesic axis");
            };
            crate::mobius::geodesic_distance(&axis, &q)
        };
        // The finite endpoint is pinned by the root-finding from the start,
        // so the axis is near the target at every time; the escaping
        // endpoint's extraction noise dominates the late-time gap.
        assert!(gap_at(30.0) < 1e-3);
        assert!(gap_at(1000.0) < 1e-3);
    }

    #[test]
    fn small_hyperbolics_cyclic_order() {
        // Fixed points on the boundary line of the common perpendicular
        // plane in the cyclic order (u2, v1, v2, u1): linearly along the
        // imaginary axis that reads v2 < u1 < u2 < v1.
        let (h1, h2) = build_small_hyperbolics(
            CP1::Infinity,
            PlaneData { offset: 10.0 },
            PlaneData { offset: -10.0 },
            100.0,
            &scales(),
        )
        .unwrap();
        let f1 = h1.fixed_points().unwrap(); // repelling, attracting
        let f2 = h2.fixed_points().unwrap();
        let im = |p: &CP1| p.finite().unwrap().im;
        let (v1, u1) = (im(&f1[0]), im(&f1[1]));
        let (v2, u2) = (im(&f2[0]), im(&f2[1]));
        assert!(v2 < u1 && u1 < u2 && u2 < v1, "order: v2={v2} u1={u1} u2={u2} v1={v1}");
    }

    #[test]
    fn small_hyperbolics_rejects_unbracketable_target() {
        // Equal plane offsets leave no target between the planes.
        let err = build_small_hyperbolics(
            CP1::Infinity,
            PlaneData { offset: 1.0 },
            PlaneData { offset: 1.0 },
            100.0,
            &scales(),
        );
        assert!(matches!(err, Err(DegenerationError::ConfigInvalid(_))));
    }
}
