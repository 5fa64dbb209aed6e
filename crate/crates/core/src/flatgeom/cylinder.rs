//! Flat and expanding cylinders, moduli and superadditivity bounds, order-two
//! pole models and residues, end descriptors with cusp classification, and
//! grafting as period insertion.

use super::polygon::FlatError;
use crate::cp1::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// A flat cylinder: period c = ∮√q along the core and height h > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatCylinder {
    pub period: Complex,
    pub height: f64,
}

impl FlatCylinder {
    pub fn new(period: Complex, height: f64) -> Self {
        assert!(period.norm() > 0.0, "period must be nonzero");
        assert!(height > 0.0, "height must be positive");
        FlatCylinder { period, height }
    }

    pub fn modulus(&self) -> f64 {
        self.height / self.period.norm()
    }
}

/// A round-annulus expanding cylinder r₁ < |z| < r₂ with the flat |dz| metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpandingCylinder {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Whether the cylinder shrinks toward the core it encircles.
    pub shrinking_toward_core: bool,
}

impl ExpandingCylinder {
    pub fn new(r_inner: f64, r_outer: f64, shrinking_toward_core: bool) -> Self {
        assert!(0.0 < r_inner && r_inner < r_outer, "need 0 < r_inner < r_outer");
        ExpandingCylinder { r_inner, r_outer, shrinking_toward_core }
    }

    pub fn modulus(&self) -> f64 {
        (self.r_outer / self.r_inner).ln() / (2.0 * PI)
    }
}

/// Either cylinder model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cylinder {
    Flat(FlatCylinder),
    Expanding(ExpandingCylinder),
}

impl Cylinder {
    pub fn modulus(&self) -> f64 {
        match self {
            Cylinder::Flat(c) => c.modulus(),
            Cylinder::Expanding(c) => c.modulus(),
        }
    }
}

/// Superadditivity sandwich: the sum of the part moduli never exceeds the
/// modulus of an enclosing annulus. Returns the lower bound Σ mod(parts) and
/// whether it respects `total_estimate` up to 1e−9.
pub fn composite_modulus_bounds(parts: &[Cylinder], total_estimate: f64) -> (f64, bool) {
    let lower: f64 = parts.iter().map(|c| c.modulus()).sum();
    (lower, lower <= total_estimate + 1e-9)
}

/// Local model q = r²·z⁻²·dz² of a quadratic differential near a puncture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleModel {
    pub coefficient: Complex,
    pub order: u8,
}

impl PoleModel {
    pub fn order_two(r: Complex) -> Self {
        PoleModel { coefficient: r, order: 2 }
    }

    /// Contour integral ∮ ±√q = 2πi·r around the pole, canonicalized to
    /// Re ≥ 0 (and Im ≥ 0 when Re = 0); the raw value is sign-ambiguous.
    pub fn residue(&self) -> Result<Complex, FlatError> {
        if self.order != 2 || self.coefficient.norm() == 0.0 {
            return Err(FlatError::NotOrderTwo);
        }
        Ok(canonical_sign(Complex::new(0.0, 2.0 * PI) * self.coefficient))
    }

    /// The raw contour value 2πi·r with the sign inherited from the stored
    /// coefficient (no canonicalization).
    pub fn raw_contour(&self) -> Result<Complex, FlatError> {
        if self.order != 2 || self.coefficient.norm() == 0.0 {
            return Err(FlatError::NotOrderTwo);
        }
        Ok(Complex::new(0.0, 2.0 * PI) * self.coefficient)
    }
}

/// The representative of {z, −z} with Re ≥ 0, breaking ties toward Im ≥ 0.
pub fn canonical_sign(z: Complex) -> Complex {
    if z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0) {
        z
    } else {
        -z
    }
}

/// Description of a cylindrical end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EndDescriptor {
    /// An expanding cylinder of infinite modulus shrinking toward the cusp.
    ShrinkingExpanding,
    /// A half-infinite flat cylinder with the given core period; `angle` is
    /// the angle in [0, π/2] between the core circumferences and the
    /// vertical foliation (π/2 = orthogonal).
    HalfInfiniteFlat { period: Complex, angle: f64 },
}

impl EndDescriptor {
    /// Derives the end data of a flat cylinder from its period, with the
    /// operative convention that the real part of the period carries
    /// translation: Re = 0 means the circumferences are orthogonal to the
    /// vertical foliation.
    pub fn from_flat_period(period: Complex) -> Self {
        let angle = period.im.abs().atan2(period.re.abs());
        EndDescriptor::HalfInfiniteFlat { period, angle }
    }
}

/// Classification of the holonomy around a cusp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EndClass {
    /// Parabolic with a horoball quotient neighborhood.
    ParabolicHoroball,
    /// Hyperbolic with the given complex translation length √2·c.
    Hyperbolic(Complex),
    /// Elliptic of the given angle in (0, 2π), with the wrap count of the
    /// transverse measure.
    Elliptic { angle: f64, wraps: u32 },
    /// √2 times the transverse measure is a 2π-multiple: identity or
    /// parabolic, with the multiple recorded.
    IdentityOrParabolic { wraps: u32 },
}

impl EndClass {
    pub fn tag(&self) -> &'static str {
        match self {
            EndClass::ParabolicHoroball => "parabolic-horoball",
            EndClass::Hyperbolic(_) => "hyperbolic",
            EndClass::Elliptic { .. } => "elliptic",
            EndClass::IdentityOrParabolic { .. } => "identity-or-parabolic",
        }
    }
}

/// Classifies a cusp from its end descriptor.
///
/// Shrinking expanding ends are parabolic with horoball neighborhoods. Flat
/// ends carry the holonomy ω ↦ e^{√2 c} ω: non-orthogonal circumferences give
/// a hyperbolic element of complex length √2·c; orthogonal ones rotate by
/// √2·|c|, which is elliptic unless it is a 2π-multiple within tol.
pub fn classify_cusp(end: &EndDescriptor, tol: f64) -> EndClass {
    match end {
        EndDescriptor::ShrinkingExpanding => EndClass::ParabolicHoroball,
        EndDescriptor::HalfInfiniteFlat { period, angle } => {
            if *angle < PI / 2.0 - tol {
                return EndClass::Hyperbolic(SQRT_2 * period);
            }
            let total = SQRT_2 * period.norm();
            let wraps = (total / (2.0 * PI)).round();
            let offset = total - 2.0 * PI * wraps;
            if offset.abs() < tol {
                EndClass::IdentityOrParabolic { wraps: wraps as u32 }
            } else {
                let angle = total.rem_euclid(2.0 * PI);
                EndClass::Elliptic { angle, wraps: (total / (2.0 * PI)).floor() as u32 }
            }
        }
    }
}

/// CSV report line for a flat cylinder: period, height, modulus, and the
/// cusp classification tag of its end.
pub fn cylinder_csv_header() -> &'static str {
    "period_re,period_im,height,modulus,classification"
}

pub fn cylinder_csv_row(c: &FlatCylinder, tol: f64) -> String {
    let class = classify_cusp(&EndDescriptor::from_flat_period(c.period), tol);
    format!(
        "{:.9e},{:.9e},{:.9e},{:.9e},{}",
        c.period.re,
        c.period.im,
        c.height,
        c.modulus(),
        class.tag()
    )
}

/// Grafting as period insertion: adds the holonomy-neutral transverse amount
/// 2πn/√2 to the period, so the model holonomy changes by exp(2πn·i) — that
/// is, not at all up to sign.
///
/// The returned cylinder models the graft as the original cylinder rescaled
/// to the augmented circumference plus the inserted ring of height √2πn;
/// its modulus is mod(c) + √2πn/|c'|, strictly increasing in n.
pub fn graft_period(c: &FlatCylinder, n: u32) -> FlatCylinder {
    assert!(n > 0, "graft count must be positive");
    let delta = SQRT_2 * PI * n as f64;
    let period = c.period + Complex::new(0.0, delta);
    let height = c.height * period.norm() / c.period.norm() + delta;
    FlatCylinder { period, height }
}
