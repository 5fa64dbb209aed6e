//! PSL(2,ℂ) as normalized 2×2 complex matrices up to sign: classification,
//! fixed points, axes, complex length, π-rotations, real powers, and the
//! Jørgensen non-discreteness certificate.

use crate::cp1::{Complex, CP1};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use thiserror::Error;

const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error("matrix is singular (|det| = {0:.3e})")]
    Singular(f64),
    #[error("identity has every point fixed")]
    IdentityInput,
    #[error("geodesic endpoints coincide (chordal distance {0:.3e})")]
    DegenerateGeodesic(f64),
    #[error("parabolic or identity element has no axis")]
    NoAxis,
    #[error("zero period has no cylinder holonomy")]
    ZeroPeriod,
}

/// An element of PSL(2,ℂ): a 2×2 complex matrix with det = 1, considered up
/// to global sign. Serialized as `{"a":[re,im],"b":...,"c":...,"d":...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

/// Conjugacy class of a Möbius map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MobiusClass {
    Identity,
    Parabolic,
    /// Rotation angle in (0, π]; the angle of an elliptic element of
    /// PSL(2,ℂ) is defined up to θ ↔ 2π − θ, and the canonical
    /// representative takes the value in (0, π].
    Elliptic { angle: f64 },
    /// Complex translation length z with Re z > 0, Im z ∈ (−π, π], mod 2πi.
    Hyperbolic { length: Complex },
}

impl MobiusClass {
    pub fn tag(&self) -> &'static str {
        match self {
            MobiusClass::Identity => "identity",
            MobiusClass::Parabolic => "parabolic",
            MobiusClass::Elliptic { .. } => "elliptic",
            MobiusClass::Hyperbolic { .. } => "hyperbolic",
        }
    }
}

/// An oriented geodesic of H³, stored by its ordered ideal endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicH3 {
    pub p: CP1,
    pub q: CP1,
}

impl GeodesicH3 {
    pub fn new(p: CP1, q: CP1) -> Result<Self, MobiusError> {
        let sep = p.chordal(&q);
        if sep < 1e-14 {
            return Err(MobiusError::DegenerateGeodesic(sep));
        }
        Ok(GeodesicH3 { p, q })
    }

    pub fn reversed(&self) -> GeodesicH3 {
        GeodesicH3 { p: self.q, q: self.p }
    }

    /// Unordered-endpoint chordal metric: the smaller over the two endpoint
    /// pairings of the larger chordal distance.
    pub fn distance(&self, other: &GeodesicH3) -> f64 {
        let direct = self.p.chordal(&other.p).max(self.q.chordal(&other.q));
        let crossed = self.p.chordal(&other.q).max(self.q.chordal(&other.p));
        direct.min(crossed)
    }
}

/// Axis of a Möbius map: a geodesic (hyperbolic/elliptic), a single ideal
/// point (parabolic), or undefined (identity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisResult {
    Geodesic(GeodesicH3),
    Point(CP1),
    Undefined,
}

/// Default tolerance for classification decisions on tr².
pub const CLASSIFY_TOL: f64 = 1e-9;

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE };

    /// Builds from entries and normalizes to det = 1 with the canonical sign.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, MobiusError> {
        let det = a * d - b * c;
        if det.norm() < 1e-30 {
            return Err(MobiusError::Singular(det.norm()));
        }
        let s = det.sqrt();
        Ok(MobiusMap { a: a / s, b: b / s, c: c / s, d: d / s }.canonical_sign())
    }

    /// The translation ω ↦ ω + v.
    pub fn translation(v: Complex) -> Self {
        MobiusMap { a: ONE, b: v, c: ZERO, d: ONE }.canonical_sign()
    }

    /// The dilation-rotation ω ↦ e^z ω as diag(e^{z/2}, e^{−z/2}).
    pub fn dilation(z: Complex) -> Self {
        let h = (z / 2.0).exp();
        MobiusMap { a: h, b: ZERO, c: ZERO, d: 1.0 / h }.canonical_sign()
    }

    /// Chooses the sign making the first entry of largest modulus have
    /// argument in (−π/2, π/2]. Deterministic for hashing and serialization.
    pub fn canonical_sign(self) -> Self {
        let entries = [self.a, self.b, self.c, self.d];
        let mut lead = ZERO;
        for e in entries {
            if e.norm() > 1e-13 {
                lead = e;
                break;
            }
        }
        if lead == ZERO {
            return self;
        }
        let arg = lead.arg();
        let flip = !(arg > -PI / 2.0 + 1e-17 && arg <= PI / 2.0 + 1e-17);
        if flip {
            MobiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    /// Trace of a chosen SL(2,ℂ) lift; only tr² is well defined on PSL(2,ℂ).
    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    pub fn trace_sq(&self) -> Complex {
        let t = self.a + self.d;
        t * t
    }

    /// tr² − 4 computed as (a − d)² + 4bc, which has no catastrophic
    /// cancellation for maps near the identity.
    pub fn trace_sq_minus_four(&self) -> Complex {
        let diff = self.a - self.d;
        diff * diff + 4.0 * self.b * self.c
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical_sign()
    }

    /// Frobenius norm of the entry-wise difference, minimized over sign.
    pub fn dist(&self, other: &MobiusMap) -> f64 {
        let mut sub = 0.0;
        let mut add = 0.0;
        for (x, y) in [
            (self.a, other.a),
            (self.b, other.b),
            (self.c, other.c),
            (self.d, other.d),
        ] {
            sub += (x - y).norm_sqr();
            add += (x + y).norm_sqr();
        }
        sub.min(add).sqrt()
    }

    /// Sign-insensitive distance to the identity.
    pub fn dist_to_identity(&self) -> f64 {
        self.dist(&MobiusMap::IDENTITY)
    }

    pub fn approx_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        self.dist(other) < tol
    }

    /// Applies the map to a point of CP¹.
    pub fn apply(&self, z: CP1) -> CP1 {
        match z {
            CP1::Finite(w) => {
                let den = self.c * w + self.d;
                let num = self.a * w + self.b;
                if den.norm() <= 1e-300 * num.norm().max(1.0) {
                    CP1::Infinity
                } else {
                    let r = num / den;
                    if r.is_finite() {
                        CP1::Finite(r)
                    } else {
                        CP1::Infinity
                    }
                }
            }
            CP1::Infinity => {
                if self.c.norm() <= 1e-300 * self.a.norm().max(1.0) {
                    CP1::Infinity
                } else {
                    CP1::Finite(self.a / self.c)
                }
            }
        }
    }

    /// Applies the map to a geodesic (endpoint-wise).
    pub fn apply_geodesic(&self, g: &GeodesicH3) -> GeodesicH3 {
        GeodesicH3 { p: self.apply(g.p), q: self.apply(g.q) }
    }

    pub fn conjugate(&self, by: &MobiusMap) -> MobiusMap {
        (*by * *self * by.inverse()).canonical_sign()
    }

    /// Classifies by tr² with the given tolerance.
    pub fn classify(&self, tol: f64) -> MobiusClass {
        assert!(tol > 0.0, "classification tolerance must be positive");
        if self.dist_to_identity() < tol {
            return MobiusClass::Identity;
        }
        let disc = self.trace_sq_minus_four();
        if disc.norm() < tol {
            return MobiusClass::Parabolic;
        }
        let t2 = disc + 4.0;
        if t2.im.abs() < tol && t2.re >= -tol && t2.re < 4.0 {
            // tr² = 4 cos²(θ/2); canonical angle in (0, π].
            let cos_half = (t2.re.max(0.0) / 4.0).sqrt();
            let angle = 2.0 * cos_half.clamp(0.0, 1.0).acos();
            return MobiusClass::Elliptic { angle };
        }
        MobiusClass::Hyperbolic { length: self.complex_length_unchecked() }
    }

    pub fn classify_default(&self) -> MobiusClass {
        self.classify(CLASSIFY_TOL)
    }

    /// Fixed points on CP¹: the roots of c w² + (d − a) w − b = 0.
    ///
    /// For hyperbolic maps the repelling point comes first and the
    /// attracting point second; otherwise the ordering is the deterministic
    /// root order. Returns one point for parabolic maps.
    pub fn fixed_points(&self) -> Result<Vec<CP1>, MobiusError> {
        if self.dist_to_identity() < 1e-13 {
            return Err(MobiusError::IdentityInput);
        }
        let disc = self.trace_sq_minus_four();
        let scale = self.a.norm() + self.b.norm() + self.c.norm() + self.d.norm();
        let parabolic = disc.norm() < 1e-24 * scale * scale;
        let mut pts: Vec<CP1> = Vec::with_capacity(2);
        if self.c.norm() < 1e-14 * scale {
            // ∞ is fixed.
            pts.push(CP1::Infinity);
            if !parabolic {
                let dm = self.d - self.a;
                pts.push(CP1::Finite(self.b / dm));
            }
        } else {
            let root = disc.sqrt();
            let am = self.a - self.d;
            if parabolic {
                pts.push(CP1::Finite(am / (2.0 * self.c)));
            } else {
                // Vieta: take the root with the larger numerator directly and
                // recover the other from the product −b/c, avoiding the
                // cancellation in the smaller one.
                let big_num = if (am + root).norm() >= (am - root).norm() {
                    am + root
                } else {
                    am - root
                };
                let w_big = big_num / (2.0 * self.c);
                let w_small = -self.b / (self.c * w_big);
                pts.push(CP1::Finite(w_big));
                pts.push(CP1::Finite(w_small));
            }
        }
        if pts.len() == 2 {
            // Order dynamically: repelling first, attracting second.
            // The derivative at w is 1/(cw+d)²; at ∞ it is 1/a².
            let deriv_mag = |p: &CP1| -> f64 {
                match p {
                    CP1::Finite(w) => 1.0 / (self.c * w + self.d).norm_sqr(),
                    CP1::Infinity => 1.0 / self.a.norm_sqr(),
                }
            };
            let d0 = deriv_mag(&pts[0]);
            let d1 = deriv_mag(&pts[1]);
            if (d0 - d1).abs() > 1e-12 * (d0 + d1) {
                if d0 < d1 {
                    pts.swap(0, 1);
                }
            } else {
                // Elliptic: order by rotation handedness. The fixed point at
                // which the derivative has positive imaginary part (rotation
                // counterclockwise through (0, π)) comes first.
                let deriv_arg = |p: &CP1| -> f64 {
                    match p {
                        CP1::Finite(w) => {
                            let d = (self.c * w + self.d).powi(2);
                            (1.0 / d).arg()
                        }
                        CP1::Infinity => (1.0 / (self.a * self.a)).arg(),
                    }
                };
                if deriv_arg(&pts[0]) < deriv_arg(&pts[1]) {
                    pts.swap(0, 1);
                }
            }
        }
        Ok(pts)
    }

    /// Axis of the map per its classification.
    pub fn axis(&self) -> AxisResult {
        self.axis_with_tol(CLASSIFY_TOL)
    }

    /// Axis with an explicit classification tolerance.
    pub fn axis_with_tol(&self, tol: f64) -> AxisResult {
        match self.classify(tol) {
            MobiusClass::Identity => AxisResult::Undefined,
            MobiusClass::Parabolic => match self.fixed_points() {
                Ok(pts) => AxisResult::Point(pts[0]),
                Err(_) => AxisResult::Undefined,
            },
            _ => match self.fixed_points() {
                Ok(pts) if pts.len() == 2 => match GeodesicH3::new(pts[0], pts[1]) {
                    Ok(g) => AxisResult::Geodesic(g),
                    Err(_) => AxisResult::Undefined,
                },
                _ => AxisResult::Undefined,
            },
        }
    }

    /// Complex translation length z: Re z ≥ 0, Im z ∈ (−π, π] (mod 2πi),
    /// with Im z ∈ (0, π] for elliptic maps. Fails for parabolic/identity.
    pub fn complex_length(&self) -> Result<Complex, MobiusError> {
        match self.classify_default() {
            MobiusClass::Identity | MobiusClass::Parabolic => Err(MobiusError::NoAxis),
            _ => Ok(self.complex_length_unchecked()),
        }
    }

    /// The complex length computed without the classification guard;
    /// meaningful only for maps with distinct fixed points.
    pub(crate) fn complex_length_unchecked(&self) -> Complex {
        let t = self.trace();
        let disc = self.trace_sq_minus_four().sqrt();
        let mut lambda = (t + disc) / 2.0;
        if lambda.norm() < 1.0 {
            lambda = (t - disc) / 2.0;
        }
        let mut z = 2.0 * lambda.ln();
        // Fold Im into (−π, π]; a sign flip of the lift shifts Im by 2π.
        while z.im > PI + 1e-15 {
            z.im -= 2.0 * PI;
        }
        while z.im <= -PI - 1e-15 {
            z.im += 2.0 * PI;
        }
        if z.re.abs() < 1e-12 && z.im < 0.0 {
            z = -z; // elliptic canonical representative rotates by θ ∈ (0, π]
            if z.im > PI {
                z.im -= 2.0 * PI;
            }
        }
        if z.re < 0.0 {
            z.re = z.re.abs();
        }
        z
    }

    /// exp(s · log M) along the one-parameter subgroup through M.
    ///
    /// The principal branch takes the SL(2,ℂ) lift with Re tr > 0 (or
    /// Im tr ≥ 0 when Re tr vanishes); for elliptic maps with angle near π
    /// the two natural logarithms are equidistant and
    /// [`MobiusMap::real_power_checked`] flags the choice.
    pub fn real_power(&self, s: f64) -> MobiusMap {
        self.real_power_checked(s).0
    }

    /// Real power plus a flag set when the elliptic branch choice is
    /// ambiguous (rotation angle within ~1e−6 of π).
    pub fn real_power_checked(&self, s: f64) -> (MobiusMap, bool) {
        // Principal lift.
        let t = self.trace();
        let m = if t.re < -1e-18 || (t.re.abs() <= 1e-18 && t.im < 0.0) {
            MobiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            *self
        };
        let t = m.a + m.d;
        let ambiguous = t.norm() < 1e-6 && m.trace_sq_minus_four().norm() > 1e-12;

        // Identity or parabolic lift: M = I + N with N² = 0, M^s = I + sN.
        if m.trace_sq_minus_four().norm() < 1e-24 {
            let n = MobiusMap {
                a: m.a - 1.0,
                b: m.b,
                c: m.c,
                d: m.d - 1.0,
            };
            let out = MobiusMap {
                a: 1.0 + s * n.a,
                b: s * n.b,
                c: s * n.c,
                d: 1.0 + s * n.d,
            };
            return (out.canonical_sign(), false);
        }

        // M = cosh(μ) I + sinh(μ) X with X² = I; M^s = cosh(sμ) I + sinh(sμ) X.
        // μ comes from sinh μ = √(tr² − 4)/2 through the cancellation-free
        // discriminant: the acosh route loses half the digits for angles
        // and lengths near zero.
        let sh = m.trace_sq_minus_four().sqrt() / 2.0;
        let mu = sh.asinh();
        let half_diff = (m.a - m.d) / 2.0;
        let x = MobiusMap {
            a: half_diff / sh,
            b: m.b / sh,
            c: m.c / sh,
            d: -half_diff / sh,
        };
        let cs = (s * mu).cosh();
        let ss = (s * mu).sinh();
        let out = MobiusMap {
            a: cs + ss * x.a,
            b: ss * x.b,
            c: ss * x.c,
            d: cs + ss * x.d,
        };
        (out.canonical_sign(), ambiguous)
    }

    /// A Möbius map sending 0 ↦ p and ∞ ↦ q. The remaining degree of
    /// freedom is fixed arbitrarily; conjugating a diagonal map by the
    /// result is independent of that choice.
    pub fn taking_zero_inf_to(p: CP1, q: CP1) -> Result<MobiusMap, MobiusError> {
        let sep = p.chordal(&q);
        if sep < 1e-14 {
            return Err(MobiusError::DegenerateGeodesic(sep));
        }
        match (p, q) {
            (CP1::Finite(p), CP1::Finite(q)) => MobiusMap::new(q, p, ONE, ONE),
            (CP1::Finite(p), CP1::Infinity) => MobiusMap::new(ONE, p, ZERO, ONE),
            (CP1::Infinity, CP1::Finite(q)) => MobiusMap::new(q, ONE, ONE, ZERO),
            (CP1::Infinity, CP1::Infinity) => unreachable!("endpoints coincide"),
        }
    }

    /// A Möbius map sending (p₁, p₂, p₃) ↦ (0, 1, ∞).
    pub fn pinning_to_standard(p1: CP1, p2: CP1, p3: CP1) -> Result<MobiusMap, MobiusError> {
        for (x, y) in [(p1, p2), (p2, p3), (p1, p3)] {
            let sep = x.chordal(&y);
            if sep < 1e-14 {
                return Err(MobiusError::DegenerateGeodesic(sep));
            }
        }
        let m = match (p1, p2, p3) {
            (CP1::Finite(z1), CP1::Finite(z2), CP1::Finite(z3)) => {
                MobiusMap::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
            }
            (CP1::Infinity, CP1::Finite(z2), CP1::Finite(z3)) => {
                MobiusMap::new(ZERO, -(z2 - z3), -ONE, z3)
            }
            (CP1::Finite(z1), CP1::Infinity, CP1::Finite(z3)) => {
                MobiusMap::new(ONE, -z1, ONE, -z3)
            }
            (CP1::Finite(z1), CP1::Finite(z2), CP1::Infinity) => {
                MobiusMap::new(-ONE, z1, ZERO, -(z2 - z1))
            }
            _ => unreachable!("two coincident points rejected above"),
        }?;
        Ok(m)
    }

    /// Rotation by `angle` about the oriented geodesic `g`.
    pub fn rotation_about(g: &GeodesicH3, angle: f64) -> Result<MobiusMap, MobiusError> {
        let frame = MobiusMap::taking_zero_inf_to(g.p, g.q)?;
        let d = MobiusMap::dilation(Complex::new(0.0, angle));
        Ok(d.conjugate(&frame))
    }

    /// Pure translation by `length` along the oriented geodesic `g`
    /// (repelling endpoint g.p, attracting endpoint g.q).
    pub fn translation_along(g: &GeodesicH3, length: f64) -> Result<MobiusMap, MobiusError> {
        let frame = MobiusMap::taking_zero_inf_to(g.p, g.q)?;
        let d = MobiusMap::dilation(Complex::new(length, 0.0));
        Ok(d.conjugate(&frame))
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.4}{:+.4}i, {:.4}{:+.4}i], [{:.4}{:+.4}i, {:.4}{:+.4}i]]",
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im
        )
    }
}

/// The elliptic involution of rotation angle π about `g`.
pub fn pi_rotation(g: &GeodesicH3) -> Result<MobiusMap, MobiusError> {
    MobiusMap::rotation_about(g, PI)
}

/// Unordered-endpoint chordal distance between geodesics.
pub fn geodesic_distance(g1: &GeodesicH3, g2: &GeodesicH3) -> f64 {
    g1.distance(g2)
}

/// Jørgensen quantity J = |tr²(A) − 4| + |tr(ABA⁻¹B⁻¹) − 2|.
///
/// For a non-elementary pair, J < 1 certifies that ⟨A, B⟩ is not discrete.
/// Both summands are well defined on PSL(2,ℂ): tr² is sign-free and the
/// commutator trace is invariant under sign flips of either lift.
pub fn jorgensen_certificate(a: &MobiusMap, b: &MobiusMap) -> f64 {
    let comm = *a * *b * a.inverse() * b.inverse();
    (a.trace_sq() - 4.0).norm() + (comm.trace() - 2.0).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn diag(x: f64, y: f64) -> MobiusMap {
        MobiusMap::new(c(x, 0.0), ZERO, ZERO, c(y, 0.0)).unwrap()
    }

    fn random_mobius(rng: &mut SplitMix64) -> MobiusMap {
        loop {
            let entries: Vec<Complex> = (0..4)
                .map(|_| c(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)))
                .collect();
            if let Ok(m) = MobiusMap::new(entries[0], entries[1], entries[2], entries[3]) {
                return m;
            }
        }
    }

    #[test]
    fn classify_basic_cases() {
        assert_eq!(MobiusMap::IDENTITY.classify_default(), MobiusClass::Identity);
        let par = MobiusMap::translation(ONE);
        assert_eq!(par.classify_default(), MobiusClass::Parabolic);
        let hyp = diag(2.0, 0.5);
        match hyp.classify_default() {
            MobiusClass::Hyperbolic { length } => {
                // Oracle: tr = 2 cosh(z/2) with tr = 2.5 gives z = 2 ln 2.
                assert!((length.re - 2.0 * 2.0f64.ln()).abs() < 1e-12);
                assert!(length.im.abs() < 1e-12);
            }
            other => panic!("expected hyperbolic, got {other:?}"),
        }
    }

    #[test]
    fn classify_conjugation_invariant() {
        let mut rng = SplitMix64::new(7);
        let samples = [
            MobiusMap::translation(c(1.0, 0.5)),
            diag(2.0, 0.5),
            MobiusMap::rotation_about(
                &GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap(),
                1.0,
            )
            .unwrap(),
        ];
        for _ in 0..1000 {
            let n = random_mobius(&mut rng);
            for m in &samples {
                let conj = m.conjugate(&n);
                assert_eq!(conj.classify(1e-6).tag(), m.classify(1e-6).tag());
            }
        }
    }

    #[test]
    fn trace_sq_two_routes_agree() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let m = random_mobius(&mut rng);
            let t2 = m.trace_sq();
            let from_class = match m.classify(1e-9) {
                MobiusClass::Identity | MobiusClass::Parabolic => c(4.0, 0.0),
                MobiusClass::Elliptic { angle } => c(4.0 * (angle / 2.0).cos().powi(2), 0.0),
                MobiusClass::Hyperbolic { length } => {
                    let ch = (length / 2.0).cosh();
                    4.0 * ch * ch
                }
            };
            assert!(
                (t2 - from_class).norm() < 1e-9 * (1.0 + t2.norm()),
                "{t2} vs {from_class}"
            );
        }
    }

    #[test]
    fn fixed_points_examples() {
        let par = MobiusMap::translation(ONE);
        let pts = par.fixed_points().unwrap();
        assert_eq!(pts, vec![CP1::Infinity]);

        let hyp = diag(2.0, 0.5);
        let pts = hyp.fixed_points().unwrap();
        // Repelling 0 first, attracting ∞ second.
        assert_eq!(pts, vec![CP1::new(0.0, 0.0), CP1::Infinity]);

        // Oracle: w² + 1 = 0 has roots ±i.
        let rot = MobiusMap::new(ZERO, -ONE, ONE, ZERO).unwrap();
        let pts = rot.fixed_points().unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            let z = p.finite().unwrap();
            assert!((z * z + 1.0).norm() < 1e-12);
        }
        assert!((pts[0].finite().unwrap() - pts[1].finite().unwrap()).norm() > 1.0);
    }

    #[test]
    fn fixed_points_are_fixed() {
        let mut rng = SplitMix64::new(13);
        for _ in 0..300 {
            let m = random_mobius(&mut rng);
            if m.dist_to_identity() < 1e-6 {
                continue;
            }
            for p in m.fixed_points().unwrap() {
                assert!(m.apply(p).chordal(&p) < 1e-9);
            }
        }
    }

    #[test]
    fn axis_examples() {
        match diag(2.0, 0.5).axis() {
            AxisResult::Geodesic(g) => {
                // Oriented repelling → attracting: (0, ∞).
                assert_eq!(g.p, CP1::new(0.0, 0.0));
                assert_eq!(g.q, CP1::Infinity);
            }
            other => panic!("expected geodesic, got {other:?}"),
        }
        match MobiusMap::translation(ONE).axis() {
            AxisResult::Point(p) => assert_eq!(p, CP1::Infinity),
            other => panic!("expected point, got {other:?}"),
        }
        assert_eq!(MobiusMap::IDENTITY.axis(), AxisResult::Undefined);

        // Rotation by π about (−1, 1): endpoint set {−1, 1}. Oracle:
        // conjugate diag(i, −i) by the map sending (0, ∞) → (−1, 1).
        let g = GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0, 0.0)).unwrap();
        let r = pi_rotation(&g).unwrap();
        match r.axis() {
            AxisResult::Geodesic(ax) => assert!(ax.distance(&g) < 1e-9),
            other => panic!("expected geodesic, got {other:?}"),
        }
    }

    #[test]
    fn pi_rotation_involution_and_endpoints() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..100 {
            let p = CP1::new(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
            let q = CP1::new(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
            let Ok(g) = GeodesicH3::new(p, q) else { continue };
            let r = pi_rotation(&g).unwrap();
            assert!((r * r).dist_to_identity() < 1e-10);
            assert!(r.apply(g.p).chordal(&g.p) < 1e-10);
            assert!(r.apply(g.q).chordal(&g.q) < 1e-10);
        }
        // Standard axis gives the class of diag(i, −i).
        let g = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let r = pi_rotation(&g).unwrap();
        let expect = MobiusMap::new(c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0)).unwrap();
        assert!(r.dist(&expect) < 1e-12);
    }

    #[test]
    fn pi_rotation_product_rotates_by_twice_angle() {
        // Geodesics through j at planar angle θ: g1 = (−1, 1), g2 = e^{iθ}·g1.
        for &theta in &[0.3, 0.7, 1.2] {
            let g1 = GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0, 0.0)).unwrap();
            let rot = Complex::from_polar(1.0, theta);
            let g2 = GeodesicH3::new(CP1::Finite(-rot), CP1::Finite(rot)).unwrap();
            let prod = pi_rotation(&g1).unwrap() * pi_rotation(&g2).unwrap();
            match prod.classify(1e-9) {
                MobiusClass::Elliptic { angle } => {
                    let expect = (2.0 * theta).min(2.0 * PI - 2.0 * theta);
                    assert!((angle - expect).abs() < 1e-9, "θ={theta}: {angle} vs {expect}");
                }
                other => panic!("expected elliptic, got {other:?}"),
            }
        }
    }

    #[test]
    fn real_power_examples() {
        let hyp = diag(2.0, 0.5);
        assert!(hyp.real_power(0.0).dist_to_identity() < 1e-12);
        assert!(hyp.real_power(2.0).dist(&diag(4.0, 0.25)) < 1e-10);

        let g = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let r3 = MobiusMap::rotation_about(&g, PI / 3.0).unwrap();
        let r2 = MobiusMap::rotation_about(&g, PI / 2.0).unwrap();
        assert!(r3.real_power(1.5).dist(&r2) < 1e-10);
    }

    #[test]
    fn real_power_integer_powers() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..50 {
            let m = random_mobius(&mut rng);
            let mut acc = MobiusMap::IDENTITY;
            for n in 0..=8 {
                assert!(
                    m.real_power(n as f64).dist(&acc) < 1e-8 * (1.0 + acc.dist_to_identity()),
                    "power {n}"
                );
                acc = acc * m;
            }
        }
    }

    #[test]
    fn real_power_homomorphism_in_exponent() {
        let mut rng = SplitMix64::new(29);
        let g = GeodesicH3::new(CP1::new(-1.0, 0.5), CP1::new(2.0, -1.0)).unwrap();
        let samples = [
            MobiusMap::translation_along(&g, 0.8).unwrap(),
            MobiusMap::rotation_about(&g, 1.1).unwrap(),
            MobiusMap::translation(c(0.3, 1.0)),
        ];
        for m in samples {
            for _ in 0..50 {
                let s = rng.uniform(-4.0, 4.0);
                let t = rng.uniform(-4.0, 4.0);
                let lhs = m.real_power(s + t);
                let rhs = m.real_power(s) * m.real_power(t);
                assert!(lhs.dist(&rhs) < 1e-8, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn real_power_branch_flag_near_pi() {
        let g = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        let near_pi = MobiusMap::rotation_about(&g, PI - 1e-9).unwrap();
        assert!(near_pi.real_power_checked(0.5).1);
        let far = MobiusMap::rotation_about(&g, 1.0).unwrap();
        assert!(!far.real_power_checked(0.5).1);
    }

    #[test]
    fn complex_length_examples() {
        let z = diag(2.0, 0.5).complex_length().unwrap();
        assert!((z - c(2.0 * 2.0f64.ln(), 0.0)).norm() < 1e-12);

        let g = GeodesicH3::new(CP1::new(-2.0, 1.0), CP1::new(0.5, 0.5)).unwrap();
        for &theta in &[0.4, 1.5, 3.0] {
            let r = MobiusMap::rotation_about(&g, theta).unwrap();
            let z = r.complex_length().unwrap();
            let folded = theta.min(2.0 * PI - theta);
            assert!(z.re.abs() < 1e-10);
            assert!((z.im - folded).abs() < 1e-9, "θ={theta}");
        }

        // tr = 2.1: solve 4 cosh²(z/2) = 4.41, cross-checked by conjugating
        // to diagonal form: z = 2 arccosh(1.05).
        let m = MobiusMap::new(c(2.1, 0.0), -ONE, ONE, ZERO).unwrap();
        let z = m.complex_length().unwrap();
        let expect = 2.0 * (1.05f64 + (1.05f64 * 1.05 - 1.0).sqrt()).ln();
        assert!((z - c(expect, 0.0)).norm() < 1e-10);
        assert!(m.dist(&MobiusMap::dilation(z).conjugate(
            &MobiusMap::taking_zero_inf_to(
                m.fixed_points().unwrap()[0],
                m.fixed_points().unwrap()[1]
            )
            .unwrap()
        )) < 1e-9);

        assert_eq!(
            MobiusMap::translation(ONE).complex_length(),
            Err(MobiusError::NoAxis)
        );
    }

    #[test]
    fn geodesic_distance_examples() {
        let g = GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap();
        assert_eq!(geodesic_distance(&g, &g), 0.0);
        assert_eq!(geodesic_distance(&g, &g.reversed()), 0.0);
        let h = GeodesicH3::new(CP1::new(1.0, 0.0), CP1::Infinity).unwrap();
        assert!((geodesic_distance(&g, &h) - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn geodesic_distance_symmetry_triangle() {
        let mut rng = SplitMix64::new(31);
        let random_geodesic = |rng: &mut SplitMix64| loop {
            let p = CP1::new(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
            let q = if rng.uniform(0.0, 1.0) < 0.1 {
                CP1::Infinity
            } else {
                CP1::new(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
            };
            if let Ok(g) = GeodesicH3::new(p, q) {
                return g;
            }
        };
        for _ in 0..500 {
            let a = random_geodesic(&mut rng);
            let b = random_geodesic(&mut rng);
            let c = random_geodesic(&mut rng);
            let dab = geodesic_distance(&a, &b);
            let dba = geodesic_distance(&b, &a);
            assert!((dab - dba).abs() < 1e-15);
            let dac = geodesic_distance(&a, &c);
            let dcb = geodesic_distance(&c, &b);
            assert!(dab <= dac + dcb + 1e-12);
        }
    }

    #[test]
    fn jorgensen_examples() {
        // Equal arguments: J = |tr²(A) − 4|.
        let a = diag(2.0, 0.5);
        let j = jorgensen_certificate(&a, &a);
        assert!((j - (a.trace_sq() - 4.0).norm()).abs() < 1e-12);

        // Distant discrete-looking configuration is not flagged.
        let far = GeodesicH3::new(CP1::new(1e6, 0.0), CP1::new(1e6 + 1.0, 0.0)).unwrap();
        let b = pi_rotation(&far).unwrap();
        assert!(jorgensen_certificate(&a, &b) >= 1.0);

        // Tiny elliptic crossing a unit-length hyperbolic: certificate fires.
        let axis = GeodesicH3::new(CP1::new(-1.0, 0.0), CP1::new(1.0, 0.0)).unwrap();
        let tiny = MobiusMap::rotation_about(&axis, 1e-3).unwrap();
        let hyp = MobiusMap::translation_along(
            &GeodesicH3::new(CP1::new(0.0, 0.0), CP1::Infinity).unwrap(),
            1.0,
        )
        .unwrap();
        assert!(jorgensen_certificate(&tiny, &hyp) < 1.0);
    }

    #[test]
    fn canonical_sign_deterministic() {
        let m = MobiusMap::new(c(-1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)).unwrap();
        assert!((m.a - ONE).norm() < 1e-15);
        let mut rng = SplitMix64::new(37);
        for _ in 0..100 {
            let m = random_mobius(&mut rng);
            let flipped = MobiusMap { a: -m.a, b: -m.b, c: -m.c, d: -m.d }.canonical_sign();
            assert!(m.dist(&flipped) < 1e-15);
            assert_eq!(m.a, flipped.a);
        }
    }

    #[test]
    fn serde_round_trip() {
        let m = MobiusMap::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(2.0, 0.0)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"a\":["));
        let back: MobiusMap = serde_json::from_str(&s).unwrap();
        assert!(m.dist(&back) < 1e-15);
    }
}
