//! Surface-group presentations, representations into PSL(2,ℂ), word
//! evaluation, relator checking, elementary-type detection, and the
//! rotation-axis constructions used by the degeneration scenarios.

use crate::cp1::{Complex, CP1};
use crate::h3::{geodesic_to_geodesic, point_to_geodesic, H3Point};
use crate::mobius::{pi_rotation, GeodesicH3, MobiusClass, MobiusError, MobiusMap};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceRepError {
    #[error("unknown generator index {0}")]
    UnknownGenerator(usize),
    #[error("L-shape dimensions invalid: notch {notch_w}x{notch_h} must fit strictly inside {outer_w}x{outer_h}")]
    BadDimensions {
        outer_w: f64,
        outer_h: f64,
        notch_w: f64,
        notch_h: f64,
    },
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error("R(r)R(q) differs from the target by {0:.3e}")]
    TargetMismatch(f64),
    #[error("boundary holonomies are not inverse within tolerance (defect {0:.3e})")]
    BoundaryMismatch(f64),
    #[error("twist does not commute with the boundary holonomy (defect {0:.3e})")]
    NonCommutingTwist(f64),
}

/// A word in the generators: a sequence of (generator index, exponent),
/// stored freely reduced with nonzero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(usize, i32)>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![(i, 1)])
    }

    pub fn letter(i: usize, e: i32) -> Self {
        Word::from_letters(vec![(i, e)])
    }

    /// Builds a word and freely reduces it.
    pub fn from_letters(letters: Vec<(usize, i32)>) -> Self {
        let mut out: Vec<(usize, i32)> = Vec::with_capacity(letters.len());
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        Word(out)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word::from_letters(letters)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }
}

/// A presentation of a surface group: genus g, n punctures, generators
/// a₁,b₁,…,a_g,b_g,c₁,…,c_n and the relator ∏[aᵢ,bᵢ]·∏cⱼ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePresentation {
    pub genus: usize,
    pub punctures: usize,
}

impl SurfacePresentation {
    pub fn new(genus: usize, punctures: usize) -> Self {
        SurfacePresentation { genus, punctures }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus + self.punctures
    }

    pub fn generator_name(&self, i: usize) -> String {
        if i < 2 * self.genus {
            let pair = i / 2 + 1;
            if i.is_multiple_of(2) {
                format!("a{pair}")
            } else {
                format!("b{pair}")
            }
        } else {
            format!("c{}", i - 2 * self.genus + 1)
        }
    }

    pub fn a(&self, pair: usize) -> usize {
        2 * (pair - 1)
    }

    pub fn b(&self, pair: usize) -> usize {
        2 * (pair - 1) + 1
    }

    pub fn peripheral(&self, j: usize) -> usize {
        2 * self.genus + j
    }

    /// The relator word ∏[aᵢ,bᵢ]·∏cⱼ (the empty word for the torus with no
    /// punctures and similar degenerate inputs).
    pub fn relator(&self) -> Word {
        let mut w = Word::identity();
        for i in 1..=self.genus {
            let com = Word::commutator(&Word::generator(self.a(i)), &Word::generator(self.b(i)));
            w = w.concat(&com);
        }
        for j in 0..self.punctures {
            w = w.concat(&Word::generator(self.peripheral(j)));
        }
        w
    }
}

/// A representation: a presentation plus one Möbius map per generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRep {
    pub presentation: SurfacePresentation,
    pub images: Vec<MobiusMap>,
}

impl SurfaceRep {
    pub fn new(presentation: SurfacePresentation, images: Vec<MobiusMap>) -> Self {
        assert_eq!(
            presentation.generator_count(),
            images.len(),
            "one image per generator"
        );
        SurfaceRep { presentation, images }
    }

    /// Left-to-right product of the assigned matrices with integer powers.
    pub fn evaluate(&self, w: &Word) -> Result<MobiusMap, SurfaceRepError> {
        let mut acc = MobiusMap::IDENTITY;
        for &(g, e) in &w.0 {
            let m = self
                .images
                .get(g)
                .ok_or(SurfaceRepError::UnknownGenerator(g))?;
            let factor = if e >= 0 { *m } else { m.inverse() };
            for _ in 0..e.unsigned_abs() {
                acc = acc * factor;
            }
        }
        Ok(acc.canonical_sign())
    }

    /// Sign-insensitive distance of the evaluated relator from the identity.
    pub fn relator_defect(&self) -> f64 {
        match self.evaluate(&self.presentation.relator()) {
            Ok(m) => m.dist_to_identity(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn conjugated(&self, by: &MobiusMap) -> SurfaceRep {
        SurfaceRep {
            presentation: self.presentation.clone(),
            images: self.images.iter().map(|m| m.conjugate(by)).collect(),
        }
    }

    /// All generator words.
    pub fn generator_words(&self) -> Vec<Word> {
        (0..self.presentation.generator_count())
            .map(Word::generator)
            .collect()
    }
}

/// The holonomy of the L-shaped translation surface minus its cone point:
/// an outer `width1` × `height1` rectangle with a `width2` × `height2`
/// corner rectangle removed. Genus-2, one-puncture presentation whose four
/// handle generators map to the side-pairing translations and whose
/// peripheral image is the identity.
pub fn lshape_rep(
    width1: f64,
    height1: f64,
    width2: f64,
    height2: f64,
) -> Result<SurfaceRep, SurfaceRepError> {
    let ok = width1 > 0.0
        && height1 > 0.0
        && width2 > 0.0
        && height2 > 0.0
        && width2 < width1
        && height2 < height1;
    if !ok {
        return Err(SurfaceRepError::BadDimensions {
            outer_w: width1,
            outer_h: height1,
            notch_w: width2,
            notch_h: height2,
        });
    }
    let pres = SurfacePresentation::new(2, 1);
    // Crossing translations of the L: a-generators horizontal, b-generators
    // vertical; the notch shortens the upper horizontal and the right
    // vertical crossings.
    let a1 = MobiusMap::translation(Complex::new(width1, 0.0));
    let b1 = MobiusMap::translation(Complex::new(0.0, height1 - height2));
    let a2 = MobiusMap::translation(Complex::new(width1 - width2, 0.0));
    let b2 = MobiusMap::translation(Complex::new(0.0, height1));
    let c1 = MobiusMap::IDENTITY;
    Ok(SurfaceRep::new(pres, vec![a1, b1, a2, b2, c1]))
}

/// Pair-of-pants representation with boundary holonomies R(g1)R(g2),
/// R(g2)R(g3), R(g3)R(g1); their product telescopes to the identity.
pub fn pants_from_rotations(
    g1: &GeodesicH3,
    g2: &GeodesicH3,
    g3: &GeodesicH3,
) -> Result<SurfaceRep, SurfaceRepError> {
    let r1 = pi_rotation(g1)?;
    let r2 = pi_rotation(g2)?;
    let r3 = pi_rotation(g3)?;
    let pres = SurfacePresentation::new(0, 3);
    Ok(SurfaceRep::new(pres, vec![r1 * r2, r2 * r3, r3 * r1]))
}

/// One-holed torus built from π-rotations: α = R(r)R(q) must match
/// `a_target` up to sign, β = R(q)R(s) for a third axis derived from the
/// endpoint data, and the peripheral generator carries [α, β]⁻¹ so that the
/// relator [α, β]·c evaluates to the identity exactly.
///
/// The completion by a third axis is one valid choice among many; the
/// derived axis takes the first endpoints of r and q when they are
/// separated, falling back along the remaining endpoint pairs.
pub fn one_holed_torus_from_rotations(
    r: &GeodesicH3,
    q: &GeodesicH3,
    a_target: &MobiusMap,
    tol: f64,
) -> Result<SurfaceRep, SurfaceRepError> {
    let alpha = pi_rotation(r)? * pi_rotation(q)?;
    let defect = alpha.dist(a_target);
    if defect > tol {
        return Err(SurfaceRepError::TargetMismatch(defect));
    }
    let third = [(r.p, q.p), (r.p, q.q), (r.q, q.p)]
        .into_iter()
        .find_map(|(x, y)| GeodesicH3::new(x, y).ok());
    let beta = match third {
        Some(s) => pi_rotation(q)? * pi_rotation(&s)?,
        // r and q share both endpoints; α is the identity and any β works.
        None => MobiusMap::IDENTITY,
    };
    let pres = SurfacePresentation::new(1, 1);
    let peripheral = (alpha * beta * alpha.inverse() * beta.inverse()).inverse();
    Ok(SurfaceRep::new(pres, vec![alpha, beta, peripheral]))
}

/// Glues two one-boundary representations into one closed-surface
/// representation of genus g₁ + g₂.
///
/// Requires the peripheral images to be inverse to each other and the twist
/// to commute with rep1's boundary holonomy. Side-1 generators pass through
/// unchanged; side-2 handle generators are conjugated by the twist. The
/// glued standard relator then telescopes: side 1 contributes b₁⁻¹, side 2
/// contributes b₂⁻¹ = b₁ conjugated by a commuting twist.
pub fn amalgamate(
    rep1: &SurfaceRep,
    rep2: &SurfaceRep,
    twist: &MobiusMap,
    tol: f64,
) -> Result<SurfaceRep, SurfaceRepError> {
    assert_eq!(rep1.presentation.punctures, 1, "rep1 must have one boundary");
    assert_eq!(rep2.presentation.punctures, 1, "rep2 must have one boundary");
    let g1 = rep1.presentation.genus;
    let g2 = rep2.presentation.genus;
    let b1 = rep1.images[rep1.presentation.peripheral(0)];
    let b2 = rep2.images[rep2.presentation.peripheral(0)];
    let mismatch = (b1 * b2).dist_to_identity();
    if mismatch > tol {
        return Err(SurfaceRepError::BoundaryMismatch(mismatch));
    }
    let comm = (*twist * b1 * twist.inverse()).dist(&b1);
    if comm > tol {
        return Err(SurfaceRepError::NonCommutingTwist(comm));
    }
    let pres = SurfacePresentation::new(g1 + g2, 0);
    let mut images = Vec::with_capacity(2 * (g1 + g2));
    for i in 1..=g1 {
        images.push(rep1.images[rep1.presentation.a(i)]);
        images.push(rep1.images[rep1.presentation.b(i)]);
    }
    for i in 1..=g2 {
        let a = rep2.images[rep2.presentation.a(i)];
        let b = rep2.images[rep2.presentation.b(i)];
        images.push(twist.conjugate_into(&a));
        images.push(twist.conjugate_into(&b));
    }
    Ok(SurfaceRep::new(pres, images))
}

impl MobiusMap {
    /// twist · m · twist⁻¹ (conjugation with `self` as the conjugator).
    pub fn conjugate_into(&self, m: &MobiusMap) -> MobiusMap {
        (*self * *m * self.inverse()).canonical_sign()
    }
}

/// Elementary type of the subgroup generated by a list of Möbius maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ElementaryType {
    NonElementary,
    /// A common fixed point on CP¹.
    FixesPoint(CP1),
    /// A preserved unordered pair of points on CP¹.
    PreservesPair(CP1, CP1),
    /// A common fixed point in H³ (all generators elliptic with concurrent
    /// axes): bounded image.
    Bounded,
}

/// Detects elementary behavior by candidate enumeration: common fixed points
/// on CP¹ drawn from the generators and pairwise products, preserved pairs,
/// then concurrent elliptic axes.
pub fn elementary_type(mats: &[MobiusMap], tol: f64) -> ElementaryType {
    assert!(!mats.is_empty(), "need at least one map");
    let nontrivial: Vec<&MobiusMap> = mats
        .iter()
        .filter(|m| m.dist_to_identity() >= tol)
        .collect();
    if nontrivial.is_empty() {
        // Everything is the identity: fixes every point.
        return ElementaryType::FixesPoint(CP1::Infinity);
    }

    // Candidate points: fixed points of generators and of pairwise products.
    let mut candidates: Vec<CP1> = Vec::new();
    let push_fixed = |m: &MobiusMap, out: &mut Vec<CP1>| {
        if let Ok(pts) = m.fixed_points() {
            out.extend(pts);
        }
    };
    for m in &nontrivial {
        push_fixed(m, &mut candidates);
    }
    for (i, m) in nontrivial.iter().enumerate() {
        for n in nontrivial.iter().skip(i + 1) {
            push_fixed(&(**m * **n), &mut candidates);
            push_fixed(&(**n * **m), &mut candidates);
        }
    }

    let fixes_all = |p: &CP1| nontrivial.iter().all(|m| m.apply(*p).chordal(p) < tol);
    for p in &candidates {
        if fixes_all(p) {
            return ElementaryType::FixesPoint(*p);
        }
    }

    let preserves_pair = |p: &CP1, q: &CP1| {
        nontrivial.iter().all(|m| {
            let ip = m.apply(*p);
            let iq = m.apply(*q);
            (ip.chordal(p) < tol && iq.chordal(q) < tol)
                || (ip.chordal(q) < tol && iq.chordal(p) < tol)
        })
    };
    for (i, p) in candidates.iter().enumerate() {
        for q in candidates.iter().skip(i + 1) {
            if p.chordal(q) >= tol && preserves_pair(p, q) {
                return ElementaryType::PreservesPair(*p, *q);
            }
        }
    }

    // Bounded case: every generator elliptic (or identity) and the elliptic
    // axes pass through one point of H³.
    let all_elliptic = nontrivial
        .iter()
        .all(|m| matches!(m.classify(tol), MobiusClass::Elliptic { .. }));
    if all_elliptic {
        let axes: Vec<GeodesicH3> = nontrivial
            .iter()
            .filter_map(|m| match m.axis() {
                crate::mobius::AxisResult::Geodesic(g) => Some(g),
                _ => None,
            })
            .collect();
        if let Some(first) = axes.first() {
            let mut common: Option<H3Point> = None;
            for other in axes.iter().skip(1) {
                if other.distance(first) >= tol {
                    let (at, d) = geodesic_to_geodesic(first, other);
                    if d < 1e-6 {
                        common = Some(at);
                    }
                    break;
                }
            }
            if let Some(x) = common {
                let concurrent = axes.iter().all(|ax| point_to_geodesic(&x, ax) < 1e-5);
                if concurrent {
                    return ElementaryType::Bounded;
                }
            }
        }
    }

    ElementaryType::NonElementary
}
