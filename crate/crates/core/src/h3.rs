//! Upper half-space model of H³: points, the PSL(2,ℂ) action via quaternion
//! arithmetic, and the distance helpers used by normalization and
//! elementary-type detection.

use crate::cp1::{Complex, CP1};
use crate::mobius::{GeodesicH3, MobiusMap};

/// A point z + t·j of the upper half-space, t > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H3Point {
    pub z: Complex,
    pub t: f64,
}

impl H3Point {
    pub const ORIGIN: H3Point = H3Point { z: Complex::new(0.0, 0.0), t: 1.0 };

    pub fn new(z: Complex, t: f64) -> Self {
        assert!(t > 0.0, "height must be positive");
        H3Point { z, t }
    }

    /// Hyperbolic distance: cosh d = 1 + (|z₁−z₂|² + (t₁−t₂)²)/(2 t₁ t₂).
    pub fn dist(&self, other: &H3Point) -> f64 {
        let num = (self.z - other.z).norm_sqr() + (self.t - other.t).powi(2);
        let ch = 1.0 + num / (2.0 * self.t * other.t);
        ch.acosh()
    }
}

// Quaternions written as u + v·j with u, v complex; j·w = w̄·j.
fn quat_mul(u1: Complex, v1: Complex, u2: Complex, v2: Complex) -> (Complex, Complex) {
    (u1 * u2 - v1 * v2.conj(), u1 * v2 + v1 * u2.conj())
}

fn quat_inv(u: Complex, v: Complex) -> (Complex, Complex) {
    let n = u.norm_sqr() + v.norm_sqr();
    (u.conj() / n, -v / n)
}

/// Action of a Möbius map on H³: w ↦ (aw + b)(cw + d)⁻¹ in quaternions.
pub fn apply_h3(m: &MobiusMap, x: &H3Point) -> H3Point {
    let tv = Complex::new(x.t, 0.0);
    let (nu, nv) = (m.a * x.z + m.b, m.a * tv);
    let (du, dv) = (m.c * x.z + m.d, m.c * tv);
    let (iu, iv) = quat_inv(du, dv);
    let (ru, rv) = quat_mul(nu, nv, iu, iv);
    // The j-component of the result is real-positive up to roundoff.
    H3Point { z: ru, t: rv.re.max(1e-300) }
}

/// Displacement of a point under a Möbius map.
pub fn displacement(m: &MobiusMap, x: &H3Point) -> f64 {
    x.dist(&apply_h3(m, x))
}

/// A point of the geodesic, parametrized by signed arclength from its
/// "summit" (the point of greatest height for a finite-endpoint geodesic).
pub fn geodesic_point(g: &GeodesicH3, s: f64) -> H3Point {
    match (g.p, g.q) {
        (CP1::Finite(p), CP1::Finite(q)) => {
            let center = (p + q) / 2.0;
            let radius = (q - p).norm() / 2.0;
            let dir = (q - p) / (q - p).norm();
            // Half circle: center + radius (tanh s, sech s) in the (dir, j) plane.
            let th = s.tanh();
            let sech = 1.0 / s.cosh();
            H3Point { z: center + dir * (radius * th), t: radius * sech }
        }
        (CP1::Finite(p), CP1::Infinity) => H3Point { z: p, t: s.exp() },
        (CP1::Infinity, CP1::Finite(q)) => H3Point { z: q, t: (-s).exp() },
        (CP1::Infinity, CP1::Infinity) => unreachable!("degenerate geodesic"),
    }
}

/// Distance from a point to a geodesic, by golden-section search over the
/// arclength parameter. The cosh-based metric resolves distances down to
/// about 1e−8 (the acosh(1+x) floor); smaller values read as ~1e−8.
pub fn point_to_geodesic(x: &H3Point, g: &GeodesicH3) -> f64 {
    let f = |s: f64| x.dist(&geodesic_point(g, s));
    let (mut lo, mut hi) = (-40.0, 40.0);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.5 * (lo + hi))
}

/// The point of `g1` nearest to `g2` along with the distance between the
/// geodesics (zero when they cross).
pub fn geodesic_to_geodesic(g1: &GeodesicH3, g2: &GeodesicH3) -> (H3Point, f64) {
    let f = |s: f64| point_to_geodesic(&geodesic_point(g1, s), g2);
    let (mut lo, mut hi) = (-40.0, 40.0);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let s = 0.5 * (lo + hi);
    (geodesic_point(g1, s), f(s))
}
