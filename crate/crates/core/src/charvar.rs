//! Character-variety utilities: squared-trace coordinates, extended-orbit
//! equivalence, hyperbolic generating-set adjustment, the (γ, Λ) pairing
//! rules, and the path-lifting algorithm that turns a conjugacy-scrambled
//! path convergent in the character variety into a convergent matrix path.

#![allow(clippy::needless_range_loop)]

use crate::cp1::{Complex, CP1};
use crate::h3::{displacement, H3Point};
use crate::mobius::{MobiusClass, MobiusMap};
use crate::surface_rep::{SurfaceRep, SurfaceRepError, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharVarError {
    #[error("trace coordinates are not Cauchy (tail variation {0:.3e})")]
    NotConvergentInChi(f64),
    #[error("normalization failed in case {case}: {reason}")]
    NormalizationFailure { case: &'static str, reason: String },
    #[error("no hyperbolic generator found within products of length ≤ 3")]
    NoHyperbolicGenerator,
    #[error(transparent)]
    Rep(#[from] SurfaceRepError),
}

/// A word list with the squared traces of a representation on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCoordinates {
    pub words: Vec<Word>,
    pub values: Vec<Complex>,
}

/// Squared traces of `rep` on `words`.
pub fn trace_coords(rep: &SurfaceRep, words: &[Word]) -> Result<TraceCoordinates, CharVarError> {
    assert!(!words.is_empty(), "word list must be nonempty");
    let values = words
        .iter()
        .map(|w| rep.evaluate(w).map(|m| m.trace_sq()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TraceCoordinates { words: words.to_vec(), values })
}

/// Extended-orbit equivalence relative to the word list: componentwise
/// agreement of the squared traces within `tol`.
pub fn equivalent(
    rep1: &SurfaceRep,
    rep2: &SurfaceRep,
    words: &[Word],
    tol: f64,
) -> Result<bool, CharVarError> {
    let t1 = trace_coords(rep1, words)?;
    let t2 = trace_coords(rep2, words)?;
    Ok(t1
        .values
        .iter()
        .zip(t2.values.iter())
        .all(|(a, b)| (a - b).norm() <= tol))
}

/// The default separating word list: all generators, all pairwise products,
/// and the prefixes of the relator word.
pub fn default_word_list(rep: &SurfaceRep) -> Vec<Word> {
    let n = rep.presentation.generator_count();
    let mut words: Vec<Word> = (0..n).map(Word::generator).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                words.push(Word::generator(i).concat(&Word::generator(j)));
            }
        }
    }
    let relator = rep.presentation.relator();
    for len in 1..relator.0.len() {
        words.push(Word(relator.0[..len].to_vec()));
    }
    words.dedup();
    words
}

/// An element of the enlarged group: a Möbius map paired with an unordered
/// pair of boundary points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatPslElement {
    pub gamma: MobiusMap,
    pub lambda: (CP1, CP1),
}

/// Validates the (γ, Λ) pairing rules: a hyperbolic γ with zero rotation
/// (real lifted trace outside [−2, 2]) may pair with any two of its fixed
/// points; any other non-identity γ requires Λ = {a, a} for a fixed point a;
/// the identity pairs with any doubled point.
pub fn hatpsl_validate(e: &HatPslElement, tol: f64) -> bool {
    let (l1, l2) = e.lambda;
    if e.gamma.dist_to_identity() < tol {
        return l1.chordal(&l2) < tol;
    }
    let fixed = match e.gamma.fixed_points() {
        Ok(f) => f,
        Err(_) => return false,
    };
    let is_fixed = |p: &CP1| fixed.iter().any(|f| f.chordal(p) < tol);
    let t = e.gamma.trace();
    let zero_rotation_hyperbolic = t.im.abs() < tol && t.re.abs() > 2.0 + tol;
    if zero_rotation_hyperbolic {
        is_fixed(&l1) && is_fixed(&l2)
    } else {
        l1.chordal(&l2) < tol && is_fixed(&l1)
    }
}

/// Replaces generators so that all but at most one image is hyperbolic, the
/// exceptional one being an elliptic that reverses the reference axis.
///
/// Replacement rules: compose identity/parabolic/orientation-preserving
/// images with the hyperbolic reference word; merge pairs of axis-reversing
/// elliptics. Errors when no hyperbolic image exists among the generators or
/// products of up to three of them.
pub fn hyperbolic_generating_adjustment(
    rep: &SurfaceRep,
    tol: f64,
) -> Result<Vec<Word>, CharVarError> {
    let n = rep.presentation.generator_count();
    let mut words: Vec<Word> = (0..n).map(Word::generator).collect();
    let is_hyp = |rep: &SurfaceRep, w: &Word| -> bool {
        matches!(
            rep.evaluate(w).map(|m| m.classify(tol)),
            Ok(MobiusClass::Hyperbolic { .. })
        )
    };

    // Locate a hyperbolic word, searching products of length ≤ 3 if needed.
    let mut h_idx = (0..n).find(|i| is_hyp(rep, &words[*i]));
    if h_idx.is_none() {
        'search: for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pair = Word::generator(i).concat(&Word::generator(j));
                if is_hyp(rep, &pair) {
                    words[i] = pair;
                    h_idx = Some(i);
                    break 'search;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let triple = Word::generator(i)
                        .concat(&Word::generator(j))
                        .concat(&Word::generator(k));
                    if is_hyp(rep, &triple) {
                        words[i] = triple;
                        h_idx = Some(i);
                        break 'search;
                    }
                }
            }
        }
    }
    let h_idx = h_idx.ok_or(CharVarError::NoHyperbolicGenerator)?;
    let h_word = words[h_idx].clone();
    let axis = match rep.evaluate(&h_word)?.axis() {
        crate::mobius::AxisResult::Geodesic(g) => g,
        _ => return Err(CharVarError::NoHyperbolicGenerator),
    };
    let reverses = |m: &MobiusMap| -> bool {
        m.apply(axis.p).chordal(&axis.q) < 0.05 && m.apply(axis.q).chordal(&axis.p) < 0.05
    };

    let mut reverser: Option<usize> = None;
    for i in 0..n {
        if i == h_idx {
            continue;
        }
        for _round in 0..8 {
            let m = rep.evaluate(&words[i])?;
            match m.classify(tol) {
                MobiusClass::Hyperbolic { .. } => break,
                MobiusClass::Identity | MobiusClass::Parabolic => {
                    words[i] = h_word.concat(&words[i]);
                }
                MobiusClass::Elliptic { .. } => {
                    if reverses(&m) {
                        match reverser {
                            None => {
                                reverser = Some(i);
                                break;
                            }
                            Some(r) => {
                                // Product of two reversers preserves the axis
                                // orientation; retry hyperbolization.
                                let merged = words[r].concat(&words[i]);
                                words[i] = merged;
                            }
                        }
                    } else {
                        words[i] = h_word.concat(&words[i]);
                    }
                }
            }
        }
    }
    Ok(words)
}

/// A path of representations sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    pub times: Vec<f64>,
    pub reps: Vec<SurfaceRep>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, reps: Vec<SurfaceRep>) -> Self {
        assert_eq!(times.len(), reps.len());
        assert!(
            times.windows(2).all(|w| w[0] < w[1]),
            "sample times must be strictly increasing"
        );
        assert!(!reps.is_empty());
        SampledPath { times, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Which branch of the lifting algorithm ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftCase {
    /// Non-elementary limit: three tracked fixed points pinned to 0, 1, ∞.
    NonElementary,
    /// Elementary with a hyperbolic value and an axis-reversing witness:
    /// axis pinned to (0, ∞), reverser fixed point to 1.
    ElementaryAxis,
    /// Elementary with a hyperbolic value, everything sharing fixed points:
    /// axis pinned to (0, ∞), a matrix entry scale-normalized.
    ElementaryFixed,
    /// No hyperbolic value on the list: fixed-point pinning followed by the
    /// balanced-displacement basepoint search.
    EllipticParabolic,
}

impl LiftCase {
    pub fn tag(&self) -> &'static str {
        match self {
            LiftCase::NonElementary => "non-elementary",
            LiftCase::ElementaryAxis => "elementary-axis",
            LiftCase::ElementaryFixed => "elementary-fixed",
            LiftCase::EllipticParabolic => "elliptic-parabolic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LiftOptions {
    /// Matrix tolerance for classifications inside the algorithm.
    pub tol: f64,
    /// Fraction of samples forming the tail window for case detection.
    pub window_frac: f64,
    /// Margin separating hyperbolic squared traces from the segment [0, 4].
    pub case_tol: f64,
    /// Cauchy threshold on the squared-trace tail variation.
    pub drift_tol: f64,
    /// Minimal pairwise chordal separation for a pinning triple.
    pub pin_separation: f64,
    /// Iteration budget for the balanced-displacement basepoint search.
    pub descent_budget: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            tol: 1e-9,
            window_frac: 0.1,
            case_tol: 1e-3,
            drift_tol: 0.5,
            pin_separation: 0.1,
            descent_budget: 50,
        }
    }
}

/// Per-run diagnostics of the lift.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftDiagnostics {
    pub case: LiftCase,
    pub pinning_words: Vec<Word>,
    /// Consecutive sup-norm generator gaps of the lifted path.
    pub residual_drift: Vec<f64>,
    /// Whether the lifted tail passes the Cauchy test.
    pub cauchy_ok: bool,
    pub final_drift: f64,
}

/// Distance from a squared trace to the segment [0, 4] on the real axis.
fn segment_distance(t2: Complex) -> f64 {
    let re = t2.re.clamp(0.0, 4.0);
    (t2 - Complex::new(re, 0.0)).norm()
}

fn fixed_points_of(rep: &SurfaceRep, w: &Word) -> Vec<CP1> {
    rep.evaluate(w)
        .ok()
        .map(|m| pin_candidates(&m))
        .unwrap_or_default()
}

/// Pinning candidates of a map: both fixed points in dynamical order when
/// the repelling/attracting labels are resolved well above roundoff, and
/// the root midpoint (a − d)/2c otherwise — roundoff may swap a near-tied
/// pair per sample, while the midpoint varies smoothly along a path.
fn pin_candidates(m: &MobiusMap) -> Vec<CP1> {
    let Ok(pts) = m.fixed_points() else {
        return Vec::new();
    };
    if pts.len() != 2 || labels_stable(m, &pts) {
        pts
    } else {
        vec![midpoint(m)]
    }
}

/// Root midpoint (a − d)/2c of the fixed-point quadratic.
fn midpoint(m: &MobiusMap) -> CP1 {
    let scale = m.a.norm() + m.b.norm() + m.c.norm() + m.d.norm();
    if m.c.norm() < 1e-14 * scale {
        CP1::Infinity
    } else {
        CP1::Finite((m.a - m.d) / (2.0 * m.c))
    }
}

/// Whether the ordering of a fixed-point pair resolves above roundoff:
/// either the multiplier moduli separate repelling from attracting, or a
/// genuinely elliptic rotation separates the pair by handedness.
fn labels_stable(m: &MobiusMap, pts: &[CP1]) -> bool {
    let deriv = |p: &CP1| -> Complex {
        match p {
            CP1::Finite(w) => 1.0 / ((m.c * w + m.d) * (m.c * w + m.d)),
            CP1::Infinity => 1.0 / (m.a * m.a),
        }
    };
    let d0 = deriv(&pts[0]);
    let d1 = deriv(&pts[1]);
    let modulus_gap = (d0.norm() - d1.norm()).abs() > 1e-3 * (d0.norm() + d1.norm());
    let handedness = d0.im.abs() > 1e-3 * d0.norm();
    modulus_gap || handedness
}

/// Tracks one pinning candidate of `word` along the path. The mode is
/// decided once at the tail: a stable label index follows the raw dynamical
/// order at every sample, and the midpoint mode follows the root midpoint,
/// so the track never jumps between regimes mid-path.
fn track_fixed_point(
    path: &SampledPath,
    word: &Word,
    index: usize,
) -> Result<Vec<CP1>, CharVarError> {
    let n = path.len();
    let tail = path.reps[n - 1].evaluate(word).map_err(CharVarError::Rep)?;
    let use_midpoint = pin_candidates(&tail).len() == 1 && !tail.trace_sq_minus_four().norm().is_nan();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let m = path.reps[k].evaluate(word).map_err(CharVarError::Rep)?;
        if use_midpoint {
            out.push(midpoint(&m));
        } else {
            let pts = m.fixed_points().map_err(|e| CharVarError::NormalizationFailure {
                case: "tracking",
                reason: format!("no fixed points at sample {k}: {e}"),
            })?;
            out.push(pts[index.min(pts.len() - 1)]);
        }
    }
    Ok(out)
}

/// Lifts a path convergent in trace coordinates to a convergent matrix path.
///
/// Returns per-sample conjugators ω_k, the conjugated path, and diagnostics.
/// The case decision looks at the tail window; every pinning datum is drawn
/// from conjugation-covariant quantities (fixed points, axes, displacement
/// minimizers in the pinned frame), so scrambling the input by bounded
/// conjugators changes the output by at most one global conjugation.
pub fn lift_path(
    path: &SampledPath,
    words: &[Word],
    opts: &LiftOptions,
) -> Result<(Vec<MobiusMap>, SampledPath, LiftDiagnostics), CharVarError> {
    assert!(!words.is_empty(), "word list must be nonempty");
    let n = path.len();

    // Cauchy test in trace coordinates.
    let coords: Vec<TraceCoordinates> = path
        .reps
        .iter()
        .map(|r| trace_coords(r, words))
        .collect::<Result<Vec<_>, _>>()?;
    let gaps: Vec<f64> = (1..n)
        .map(|k| {
            coords[k]
                .values
                .iter()
                .zip(coords[k - 1].values.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let tail_start = n / 2;
    let tail_variation: f64 = gaps[tail_start.saturating_sub(1)..].iter().sum();
    if tail_variation > opts.drift_tol {
        return Err(CharVarError::NotConvergentInChi(tail_variation));
    }

    let last = &path.reps[n - 1];
    let hyperbolic_words: Vec<usize> = (0..words.len())
        .filter(|&i| segment_distance(coords[n - 1].values[i]) > opts.case_tol)
        .collect();

    // Case 1: a pinning triple with separated fixed points at the tail.
    if !hyperbolic_words.is_empty() {
        if let Some((wa, ia, wb, ib, wc, ic)) = find_pinning_triple(last, words, opts) {
            let ta = track_fixed_point(path, &words[wa], ia)?;
            let tb = track_fixed_point(path, &words[wb], ib)?;
            let tc = track_fixed_point(path, &words[wc], ic)?;
            let mut conjugators = Vec::with_capacity(n);
            for k in 0..n {
                let sep = ta[k]
                    .chordal(&tb[k])
                    .min(tb[k].chordal(&tc[k]))
                    .min(ta[k].chordal(&tc[k]));
                if sep < opts.pin_separation / 4.0 {
                    return Err(CharVarError::NormalizationFailure {
                        case: "non-elementary",
                        reason: format!("pinning triple collapses at sample {k} (sep {sep:.3e})"),
                    });
                }
                let m = MobiusMap::pinning_to_standard(ta[k], tb[k], tc[k]).map_err(|e| {
                    CharVarError::NormalizationFailure {
                        case: "non-elementary",
                        reason: e.to_string(),
                    }
                })?;
                conjugators.push(m);
            }
            let lifted = apply_conjugators(path, &conjugators);
            let diag = diagnostics(LiftCase::NonElementary, vec![
                words[wa].clone(),
                words[wb].clone(),
                words[wc].clone(),
            ], &lifted, opts);
            return Ok((conjugators, lifted, diag));
        }
    }

    // Case 2: elementary with a hyperbolic value.
    if let Some(&h) = hyperbolic_words.first() {
        let (conjugators, case, pins) = lift_elementary_hyperbolic(path, words, h)?;
        let lifted = apply_conjugators(path, &conjugators);
        let diag = diagnostics(case, pins, &lifted, opts);
        return Ok((conjugators, lifted, diag));
    }

    // Case 3: all elliptic or parabolic on the list.
    let (conjugators, pins) = lift_elliptic_parabolic(path, words, opts)?;
    let lifted = apply_conjugators(path, &conjugators);
    let diag = diagnostics(LiftCase::EllipticParabolic, pins, &lifted, opts);
    Ok((conjugators, lifted, diag))
}

/// The lexicographically first (word, fixed-point index) triple with
/// pairwise separation at least `pin_separation` at the tail sample.
fn find_pinning_triple(
    last: &SurfaceRep,
    words: &[Word],
    opts: &LiftOptions,
) -> Option<(usize, usize, usize, usize, usize, usize)> {
    let fixed: Vec<Vec<CP1>> = words.iter().map(|w| fixed_points_of(last, w)).collect();
    let sep = opts.pin_separation;
    for a in 0..words.len() {
        for (ia, pa) in fixed[a].iter().enumerate() {
            for b in (a + 1)..words.len() {
                for (ib, pb) in fixed[b].iter().enumerate() {
                    if pa.chordal(pb) < sep {
                        continue;
                    }
                    for c in (b + 1)..words.len() {
                        for (ic, pc) in fixed[c].iter().enumerate() {
                            if pa.chordal(pc) >= sep && pb.chordal(pc) >= sep {
                                return Some((a, ia, b, ib, c, ic));
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Case 2 normalization: axis of the hyperbolic word to (0, ∞), then either
/// an axis-reversing fixed point to 1 or an entry-scale normalization.
fn lift_elementary_hyperbolic(
    path: &SampledPath,
    words: &[Word],
    h: usize,
) -> Result<(Vec<MobiusMap>, LiftCase, Vec<Word>), CharVarError> {
    let n = path.len();
    let last = &path.reps[n - 1];
    let h_fixed = fixed_points_of(last, &words[h]);
    if h_fixed.len() != 2 {
        return Err(CharVarError::NormalizationFailure {
            case: "elementary-hyperbolic",
            reason: "hyperbolic word lost its axis".into(),
        });
    }
    // Repelling first, attracting second (the fixed-point order).
    let rep_track = track_fixed_point(path, &words[h], 0)?;
    let att_track = track_fixed_point(path, &words[h], 1)?;

    // Axis-reversing witness at the tail.
    let reverser = words.iter().enumerate().find(|(i, w)| {
        *i != h
            && last.evaluate(w).is_ok_and(|m| {
                m.apply(h_fixed[0]).chordal(&h_fixed[1]) < 0.05
                    && m.apply(h_fixed[1]).chordal(&h_fixed[0]) < 0.05
            })
    });

    let mut conjugators = Vec::with_capacity(n);
    match reverser {
        Some((e, _)) => {
            let e_fixed = fixed_points_of(last, &words[e]);
            if e_fixed.is_empty() {
                return Err(CharVarError::NormalizationFailure {
                    case: "elementary-axis",
                    reason: "reversing word has no fixed points".into(),
                });
            }
            let _ = &e_fixed;
            let e_track = track_fixed_point(path, &words[e], 0)?;
            for k in 0..n {
                let frame = axis_frame(rep_track[k], att_track[k])?;
                // Send the reverser fixed point to 1 by a diagonal scale.
                let w = frame.apply(e_track[k]);
                let scale = match w {
                    CP1::Finite(z) if z.norm() > 1e-12 => MobiusMap::dilation(-(z.ln())),
                    _ => MobiusMap::IDENTITY,
                };
                conjugators.push(scale * frame);
            }
            Ok((
                conjugators,
                LiftCase::ElementaryAxis,
                vec![words[h].clone(), words[reverser.unwrap().0].clone()],
            ))
        }
        None => {
            // Pick the first word with a usable off-diagonal entry at the
            // tail in the axis frame.
            let tail_frame = axis_frame(rep_track[n - 1], att_track[n - 1])?;
            let probe = words.iter().enumerate().find_map(|(i, w)| {
                let m = path.reps[n - 1].evaluate(w).ok()?.conjugate(&tail_frame);
                if m.b.norm() > 1e-8 {
                    Some((i, false))
                } else if m.c.norm() > 1e-8 {
                    Some((i, true))
                } else {
                    None
                }
            });
            let mut prev_s = Complex::new(1.0, 0.0);
            for k in 0..n {
                let frame = axis_frame(rep_track[k], att_track[k])?;
                let scale = match probe {
                    Some((i, lower)) => {
                        let m = path.reps[k].evaluate(&words[i])?.conjugate(&frame);
                        let entry = if lower { m.c } else { m.b };
                        if entry.norm() > 1e-10 {
                            // diag(s, 1/s) sends b ↦ s²b and c ↦ c/s²; target 1.
                            let s2 = if lower { entry } else { 1.0 / entry };
                            let mut s = s2.sqrt();
                            if (s - prev_s).norm() > (s + prev_s).norm() {
                                s = -s;
                            }
                            prev_s = s;
                            MobiusMap::new(
                                s,
                                Complex::new(0.0, 0.0),
                                Complex::new(0.0, 0.0),
                                1.0 / s,
                            )
                            .unwrap()
                        } else {
                            MobiusMap::IDENTITY
                        }
                    }
                    None => MobiusMap::IDENTITY,
                };
                conjugators.push(scale * frame);
            }
            Ok((conjugators, LiftCase::ElementaryFixed, vec![words[h].clone()]))
        }
    }
}

/// Case 3: pin a tracked pinning point of the first genuinely non-identity
/// word to ∞ (and a second separated one to 0 when available), normalize an
/// entry scale, then run the balanced-displacement basepoint search in the
/// pinned frame. Pinning points come from `pin_candidates`, whose midpoint
/// mode keeps near-tied fixed-point pairs from flipping mid-path.
fn lift_elliptic_parabolic(
    path: &SampledPath,
    words: &[Word],
    opts: &LiftOptions,
) -> Result<(Vec<MobiusMap>, Vec<Word>), CharVarError> {
    let n = path.len();
    let last = &path.reps[n - 1];
    let near_id_floor = 1e-8;

    // First word that is genuinely non-identity at the tail.
    let r1 = words
        .iter()
        .position(|w| {
            last.evaluate(w)
                .is_ok_and(|m| m.dist_to_identity() >= near_id_floor)
        })
        .ok_or_else(|| CharVarError::NormalizationFailure {
            case: "elliptic-parabolic",
            reason: "every word is the identity at the tail".into(),
        })?;
    let p1_seed = fixed_points_of(last, &words[r1])
        .first()
        .copied()
        .ok_or_else(|| CharVarError::NormalizationFailure {
            case: "elliptic-parabolic",
            reason: "reference word has no fixed point".into(),
        })?;
    let p1_track = track_fixed_point(path, &words[r1], 0)?;

    // Second word with a pinning point separated from P1 at the tail: take
    // the first comfortably separated one, falling back to the best
    // separation found when everything clusters.
    let mut second: Option<(usize, usize)> = None;
    let mut best_sep = 1e-5;
    'outer: for (i, w) in words.iter().enumerate() {
        if i == r1 {
            continue;
        }
        let Ok(m) = last.evaluate(w) else { continue };
        if m.dist_to_identity() < near_id_floor {
            continue;
        }
        for (idx, p) in pin_candidates(&m).iter().enumerate() {
            let sep = p.chordal(&p1_seed);
            if sep >= 0.05 {
                second = Some((i, idx));
                break 'outer;
            }
            if sep > best_sep {
                best_sep = sep;
                second = Some((i, idx));
            }
        }
    }

    let mut pins = vec![words[r1].clone()];
    let mut frames: Vec<MobiusMap> = Vec::with_capacity(n);
    match second {
        Some((r2, p2_idx)) => {
            pins.push(words[r2].clone());
            let p2_track = track_fixed_point(path, &words[r2], p2_idx)?;
            for k in 0..n {
                frames.push(axis_frame(p2_track[k], p1_track[k])?);
            }
        }
        None => {
            // All pinning points coincide; any map sending P1 to ∞ works
            // and the residual translation freedom acts trivially on the
            // commuting images.
            for k in 0..n {
                let m = match p1_track[k] {
                    CP1::Infinity => MobiusMap::IDENTITY,
                    CP1::Finite(p) => MobiusMap::new(
                        Complex::new(0.0, 0.0),
                        Complex::new(1.0, 0.0),
                        Complex::new(1.0, 0.0),
                        -p,
                    )
                    .unwrap(),
                };
                frames.push(m);
            }
        }
    }

    // Entry-scale normalization: first usable entry at the tail.
    let tail_frame = frames[n - 1];
    let probe = words.iter().enumerate().find_map(|(i, w)| {
        let m = last.evaluate(w).ok()?.conjugate(&tail_frame);
        if m.b.norm() > 1e-8 {
            Some((i, false))
        } else if m.c.norm() > 1e-8 {
            Some((i, true))
        } else {
            None
        }
    });
    let mut prev_s = Complex::new(1.0, 0.0);
    let mut conjugators = Vec::with_capacity(n);
    let mut prev_base: Option<H3Point> = None;
    for k in 0..n {
        let mut frame = frames[k];
        if let Some((i, lower)) = probe {
            let m = path.reps[k].evaluate(&words[i])?.conjugate(&frame);
            let entry = if lower { m.c } else { m.b };
            if entry.norm() > 1e-10 {
                let s2 = if lower { entry } else { 1.0 / entry };
                let mut s = s2.sqrt();
                if (s - prev_s).norm() > (s + prev_s).norm() {
                    s = -s;
                }
                prev_s = s;
                let scale =
                    MobiusMap::new(s, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), 1.0 / s)
                        .unwrap();
                frame = scale * frame;
            }
        }
        // Balanced displacement: minimize the maximum displacement of the
        // generator images over basepoints in the pinned frame.
        let gens: Vec<MobiusMap> = path.reps[k]
            .images
            .iter()
            .map(|m| m.conjugate(&frame))
            .collect();
        let init = prev_base.unwrap_or(H3Point::ORIGIN);
        let base = balanced_basepoint(&gens, init, opts.descent_budget);
        prev_base = Some(base);
        conjugators.push(move_to_origin(&base) * frame);
    }
    Ok((conjugators, pins))
}

/// Deterministic map taking (p, q) to (0, ∞).
fn axis_frame(p: CP1, q: CP1) -> Result<MobiusMap, CharVarError> {
    MobiusMap::taking_zero_inf_to(p, q)
        .map(|m| m.inverse())
        .map_err(|e| CharVarError::NormalizationFailure {
            case: "axis-frame",
            reason: e.to_string(),
        })
}

/// The vertical translation-dilation sending z + t·j to j.
fn move_to_origin(x: &H3Point) -> MobiusMap {
    let shift = MobiusMap::translation(-x.z);
    let scale = MobiusMap::dilation(Complex::new(-x.t.ln(), 0.0));
    scale * shift
}

/// Coordinate descent on (Re z, Im z, log t) minimizing the maximum
/// displacement of the maps, with a fixed iteration budget.
fn balanced_basepoint(mats: &[MobiusMap], init: H3Point, budget: usize) -> H3Point {
    let objective = |x: &H3Point| -> f64 {
        mats.iter()
            .map(|m| displacement(m, x))
            .fold(0.0f64, f64::max)
    };
    let mut x = init;
    let mut fx = objective(&x);
    let mut step = 0.5f64;
    for _ in 0..budget {
        let mut improved = false;
        for dim in 0..3 {
            for sgn in [-1.0f64, 1.0] {
                let cand = match dim {
                    0 => H3Point { z: x.z + Complex::new(sgn * step * x.t, 0.0), t: x.t },
                    1 => H3Point { z: x.z + Complex::new(0.0, sgn * step * x.t), t: x.t },
                    _ => H3Point { z: x.z, t: x.t * (sgn * step).exp() },
                };
                let fc = objective(&cand);
                if fc < fx - 1e-15 {
                    x = cand;
                    fx = fc;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    x
}

fn apply_conjugators(path: &SampledPath, conjugators: &[MobiusMap]) -> SampledPath {
    let reps = path
        .reps
        .iter()
        .zip(conjugators.iter())
        .map(|(r, w)| r.conjugated(w))
        .collect();
    SampledPath { times: path.times.clone(), reps }
}

fn diagnostics(
    case: LiftCase,
    pins: Vec<Word>,
    lifted: &SampledPath,
    opts: &LiftOptions,
) -> LiftDiagnostics {
    let n = lifted.len();
    let mut drift = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let gap = lifted.reps[k]
            .images
            .iter()
            .zip(lifted.reps[k - 1].images.iter())
            .map(|(a, b)| a.dist(b))
            .fold(0.0f64, f64::max);
        drift.push(gap);
    }
    let tail = &drift[drift.len() / 2..];
    let tail_sum: f64 = tail.iter().sum();
    let final_drift = drift.last().copied().unwrap_or(0.0);
    LiftDiagnostics {
        case,
        pinning_words: pins,
        residual_drift: drift.clone(),
        cauchy_ok: tail_sum < opts.drift_tol,
        final_drift,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{pi_rotation, GeodesicH3};
    use crate::rng::SplitMix64;
    use crate::surface_rep::{lshape_rep, SurfacePresentation};

    fn c64(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn random_conjugator(rng: &mut SplitMix64, size: f64) -> MobiusMap {
        loop {
            let m = MobiusMap::new(
                c64(1.0 + rng.uniform(-size, size), rng.uniform(-size, size)),
                c64(rng.uniform(-size, size), rng.uniform(-size, size)),
                c64(rng.uniform(-size, size), rng.uniform(-size, size)),
                c64(1.0 + rng.uniform(-size, size), rng.uniform(-size, size)),
            );
            if let Ok(m) = m {
                return m;
            }
        }
    }

    /// A non-elementary two-generator rep moving smoothly with t.
    fn moving_rep(t: f64) -> SurfaceRep {
        let alpha = MobiusMap::dilation(c64(1.0 + 1.0 / (1.0 + t), 0.0));
        let g = GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0 + 0.1 / (1.0 + t), 0.2)).unwrap();
        let beta = MobiusMap::translation_along(&g, 0.8).unwrap();
        let peripheral = (alpha * beta * alpha.inverse() * beta.inverse()).inverse();
        SurfaceRep::new(
            SurfacePresentation::new(1, 1),
            vec![alpha, beta, peripheral],
        )
    }

    fn geometric_times(n: usize, t0: f64, t1: f64) -> Vec<f64> {
        (0..n)
            .map(|k| t0 * (t1 / t0).powf(k as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn trace_coords_examples() {
        // Trivial rep: all squared traces are 4.
        let pres = SurfacePresentation::new(1, 0);
        let rep = SurfaceRep::new(pres, vec![MobiusMap::IDENTITY, MobiusMap::IDENTITY]);
        let words = vec![Word::generator(0), Word::generator(1)];
        let tc = trace_coords(&rep, &words).unwrap();
        assert!(tc.values.iter().all(|v| (v - 4.0).norm() < 1e-14));

        // Conjugation invariance.
        let rep = moving_rep(1.0);
        let words = default_word_list(&rep);
        let mut rng = SplitMix64::new(2);
        let conj = rep.conjugated(&random_conjugator(&mut rng, 0.7));
        let a = trace_coords(&rep, &words).unwrap();
        let b = trace_coords(&conj, &words).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert!((x - y).norm() < 1e-9);
        }

        // L-shape generators are unipotent: (4, 4, 4, 4).
        let l = lshape_rep(2.0, 2.0, 1.0, 1.0).unwrap();
        let words: Vec<Word> = (0..4).map(Word::generator).collect();
        let tc = trace_coords(&l, &words).unwrap();
        assert!(tc.values.iter().all(|v| (v - 4.0).norm() < 1e-13));
    }

    #[test]
    fn equivalent_examples() {
        let rep = moving_rep(2.0);
        let words = default_word_list(&rep);
        let mut rng = SplitMix64::new(3);
        let conj = rep.conjugated(&random_conjugator(&mut rng, 0.5));
        assert!(equivalent(&rep, &conj, &words, 1e-8).unwrap());

        // Changing a generator length by 0.1 changes its squared trace.
        let mut other = rep.clone();
        other.images[0] = MobiusMap::dilation(c64(
            other.images[0].complex_length().unwrap().re + 0.1,
            0.0,
        ));
        assert!(!equivalent(&rep, &other, &words, 1e-4).unwrap());

        // Distinct reducible reps sharing all squared traces: extended-orbit
        // behavior, not matrix conjugacy.
        let pres = SurfacePresentation::new(1, 0);
        let diag = SurfaceRep::new(
            pres.clone(),
            vec![
                MobiusMap::dilation(c64(0.8, 0.0)),
                MobiusMap::dilation(c64(-0.4, 0.3)),
            ],
        );
        let upper = SurfaceRep::new(
            pres,
            vec![
                MobiusMap::new(
                    (c64(0.8, 0.0) / 2.0).exp(),
                    c64(1.0, 0.0),
                    c64(0.0, 0.0),
                    (-c64(0.8, 0.0) / 2.0).exp(),
                )
                .unwrap(),
                MobiusMap::dilation(c64(-0.4, 0.3)),
            ],
        );
        let words = vec![
            Word::generator(0),
            Word::generator(1),
            Word::generator(0).concat(&Word::generator(1)),
        ];
        assert!(equivalent(&diag, &upper, &words, 1e-9).unwrap());
        assert!(diag.images[0].dist(&upper.images[0]) > 0.1);
    }

    #[test]
    fn equivalence_relation_properties() {
        let reps = [moving_rep(1.0), moving_rep(2.0), moving_rep(4.0)];
        let words = default_word_list(&reps[0]);
        for r in &reps {
            assert!(equivalent(r, r, &words, 0.0).unwrap());
        }
        for a in &reps {
            for b in &reps {
                assert_eq!(
                    equivalent(a, b, &words, 1e-7).unwrap(),
                    equivalent(b, a, &words, 1e-7).unwrap()
                );
            }
        }
        // Transitivity with summed tolerances.
        let (a, b, c) = (&reps[0], &reps[1], &reps[2]);
        if equivalent(a, b, &words, 1e-3).unwrap() && equivalent(b, c, &words, 1e-3).unwrap() {
            assert!(equivalent(a, c, &words, 2e-3).unwrap());
        }
    }

    #[test]
    fn hatpsl_examples() {
        // (Identity, {p, p}) is allowed for any p.
        let e = HatPslElement {
            gamma: MobiusMap::IDENTITY,
            lambda: (CP1::new(2.0, 1.0), CP1::new(2.0, 1.0)),
        };
        assert!(hatpsl_validate(&e, 1e-9));

        // Zero-rotation hyperbolic pairs with its two fixed points.
        let hyp = MobiusMap::dilation(c64(2.0 * 2.0f64.ln(), 0.0));
        let e = HatPslElement {
            gamma: hyp,
            lambda: (CP1::new(0.0, 0.0), CP1::Infinity),
        };
        assert!(hatpsl_validate(&e, 1e-9));

        // An elliptic may not pair with two distinct points.
        let g = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let rot = MobiusMap::rotation_about(&g, 1.0).unwrap();
        let e = HatPslElement {
            gamma: rot,
            lambda: (CP1::new(0.0, 0.0), CP1::Infinity),
        };
        assert!(!hatpsl_validate(&e, 1e-9));
        let e = HatPslElement {
            gamma: rot,
            lambda: (CP1::new(0.0, 0.0), CP1::new(0.0, 0.0)),
        };
        assert!(hatpsl_validate(&e, 1e-9));

        // A rotating loxodromic also requires a doubled fixed point.
        let lox = MobiusMap::dilation(c64(1.0, 0.8));
        let e = HatPslElement {
            gamma: lox,
            lambda: (CP1::new(0.0, 0.0), CP1::Infinity),
        };
        assert!(!hatpsl_validate(&e, 1e-9));
    }

    #[test]
    fn generating_adjustment_examples() {
        // Already all hyperbolic: identity word list.
        let pres = SurfacePresentation::new(1, 0);
        let g = GeodesicH3::new(CP1::new(-2.0, 0.0), CP1::new(3.0, 0.4)).unwrap();
        let rep = SurfaceRep::new(
            pres.clone(),
            vec![
                MobiusMap::dilation(c64(1.0, 0.0)),
                MobiusMap::translation_along(&g, 0.7).unwrap(),
            ],
        );
        let words = hyperbolic_generating_adjustment(&rep, 1e-9).unwrap();
        assert_eq!(words, vec![Word::generator(0), Word::generator(1)]);

        // One axis-preserving elliptic and one hyperbolic: the elliptic gets
        // composed with the hyperbolic and becomes loxodromic.
        let axis = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let rep = SurfaceRep::new(
            pres.clone(),
            vec![
                MobiusMap::dilation(c64(1.0, 0.0)),
                MobiusMap::rotation_about(&axis, 0.9).unwrap(),
            ],
        );
        let words = hyperbolic_generating_adjustment(&rep, 1e-9).unwrap();
        assert_eq!(words[1], Word::generator(0).concat(&Word::generator(1)));
        assert!(matches!(
            rep.evaluate(&words[1]).unwrap().classify(1e-9),
            MobiusClass::Hyperbolic { .. }
        ));

        // Two axis-reversing elliptics: the second is merged with the first,
        // then hyperbolized; the first stays as the exceptional reverser.
        let perp1 = GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0, 0.0)).unwrap();
        let perp2 = GeodesicH3::new(CP1::new(-2.0, 0.0), CP1::new(2.0, 0.0)).unwrap();
        let pres3 = SurfacePresentation::new(0, 3);
        let rep = SurfaceRep::new(
            pres3,
            vec![
                MobiusMap::dilation(c64(1.2, 0.0)),
                pi_rotation(&perp1).unwrap(),
                pi_rotation(&perp2).unwrap(),
            ],
        );
        let words = hyperbolic_generating_adjustment(&rep, 1e-9).unwrap();
        let mut reversers = 0;
        let axis = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        for w in &words {
            let m = rep.evaluate(w).unwrap();
            match m.classify(1e-9) {
                MobiusClass::Hyperbolic { .. } => {}
                MobiusClass::Elliptic { .. } => {
                    assert!(m.apply(axis.p).chordal(&axis.q) < 0.05);
                    reversers += 1;
                }
                other => panic!("unexpected class {other:?} for {w:?}"),
            }
        }
        assert!(reversers <= 1);

        // All parabolic: no hyperbolic word within length 3.
        let l = lshape_rep(2.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(
            hyperbolic_generating_adjustment(&l, 1e-9),
            Err(CharVarError::NoHyperbolicGenerator)
        );
    }

    #[test]
    fn lift_constant_path() {
        let rep = moving_rep(50.0);
        let n = 12;
        let times: Vec<f64> = (0..n).map(|k| k as f64 + 1.0).collect();
        let reps = vec![rep.clone(); n];
        let path = SampledPath::new(times, reps);
        let words = default_word_list(&rep);
        let (conj, lifted, diag) = lift_path(&path, &words, &LiftOptions::default()).unwrap();
        assert!(diag.cauchy_ok);
        // Conjugators constant up to the pinning normalization; the lifted
        // path is exactly constant.
        for k in 1..n {
            assert!(conj[k].dist(&conj[0]) < 1e-9);
            for (a, b) in lifted.reps[k].images.iter().zip(lifted.reps[0].images.iter()) {
                assert!(a.dist(b) < 1e-9);
            }
        }
    }

    #[test]
    fn lift_scramble_round_trip_non_elementary() {
        let n = 24;
        let times = geometric_times(n, 1.0, 200.0);
        let reps: Vec<SurfaceRep> = times.iter().map(|&t| moving_rep(t)).collect();
        let path = SampledPath::new(times.clone(), reps.clone());
        let words = default_word_list(&reps[0]);
        let opts = LiftOptions::default();

        let (_, lifted_plain, diag) = lift_path(&path, &words, &opts).unwrap();
        assert_eq!(diag.case, LiftCase::NonElementary);
        assert!(diag.cauchy_ok);

        let mut rng = SplitMix64::new(77);
        for _ in 0..5 {
            let scrambled: Vec<SurfaceRep> = reps
                .iter()
                .map(|r| r.conjugated(&random_conjugator(&mut rng, 0.6)))
                .collect();
            let spath = SampledPath::new(times.clone(), scrambled);
            let (_, lifted_scr, sdiag) = lift_path(&spath, &words, &opts).unwrap();
            assert!(sdiag.cauchy_ok);
            // Pinning is covariant: the two lifted tails agree outright.
            let a = &lifted_plain.reps[n - 1];
            let b = &lifted_scr.reps[n - 1];
            for (x, y) in a.images.iter().zip(b.images.iter()) {
                assert!(x.dist(y) < 1e-6, "tail mismatch {:.3e}", x.dist(y));
            }
        }
    }

    #[test]
    fn lift_rejects_divergent_path() {
        let n = 12;
        let times: Vec<f64> = (0..n).map(|k| k as f64 + 1.0).collect();
        let reps: Vec<SurfaceRep> = times
            .iter()
            .map(|&t| {
                let pres = SurfacePresentation::new(1, 0);
                SurfaceRep::new(
                    pres,
                    vec![
                        MobiusMap::dilation(c64(t, 0.0)),
                        MobiusMap::translation(c64(1.0, 0.0)),
                    ],
                )
            })
            .collect();
        let path = SampledPath::new(times, reps);
        let words = vec![Word::generator(0), Word::generator(1)];
        match lift_path(&path, &words, &LiftOptions::default()) {
            Err(CharVarError::NotConvergentInChi(_)) => {}
            other => panic!("expected divergence rejection, got {other:?}"),
        }
    }

    #[test]
    fn lift_conjugator_refinement_halves_gap() {
        let build = |n: usize| -> (SampledPath, Vec<Word>) {
            let times = geometric_times(n, 1.0, 100.0);
            let reps: Vec<SurfaceRep> = times.iter().map(|&t| moving_rep(t)).collect();
            let words = default_word_list(&reps[0]);
            (SampledPath::new(times, reps), words)
        };
        let opts = LiftOptions::default();
        let (coarse, words) = build(16);
        let (conj_c, _, _) = lift_path(&coarse, &words, &opts).unwrap();
        let (fine, _) = build(31);
        let (conj_f, _, _) = lift_path(&fine, &words, &opts).unwrap();
        let max_gap = |conj: &[MobiusMap]| {
            conj.windows(2)
                .map(|w| w[0].dist(&w[1]))
                .fold(0.0f64, f64::max)
        };
        let ratio = max_gap(&conj_f) / max_gap(&conj_c);
        assert!(
            (0.3..=0.7).contains(&ratio),
            "halving the step should roughly halve the conjugator gap, ratio {ratio}"
        );
    }

    #[test]
    fn serde_sampled_path() {
        let rep = moving_rep(1.0);
        let path = SampledPath::new(vec![1.0, 2.0], vec![rep.clone(), rep]);
        let s = serde_json::to_string(&path).unwrap();
        let back: SampledPath = serde_json::from_str(&s).unwrap();
        assert_eq!(back.times, path.times);
        assert_eq!(back.reps.len(), 2);
    }
}
