//! Points of the Riemann sphere CP¹ and the chordal metric.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub type Complex = num_complex::Complex64;

/// A point of CP¹: a finite complex number or the point at infinity.
///
/// Serialized as `[re, im]` for finite points and the string `"inf"` for
/// the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CP1 {
    Finite(Complex),
    Infinity,
}

impl CP1 {
    pub fn new(re: f64, im: f64) -> Self {
        CP1::Finite(Complex::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CP1::Infinity)
    }

    pub fn finite(&self) -> Option<Complex> {
        match self {
            CP1::Finite(z) => Some(*z),
            CP1::Infinity => None,
        }
    }

    /// Chordal distance on the unit sphere:
    /// d(z, w) = 2|z − w| / √((1+|z|²)(1+|w|²)), d(z, ∞) = 2 / √(1+|z|²).
    pub fn chordal(&self, other: &CP1) -> f64 {
        match (self, other) {
            (CP1::Finite(z), CP1::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
            (CP1::Finite(z), CP1::Infinity) | (CP1::Infinity, CP1::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (CP1::Infinity, CP1::Infinity) => 0.0,
        }
    }

    /// Homogeneous coordinates (numerator, denominator), normalized to unit norm.
    pub fn homogeneous(&self) -> (Complex, Complex) {
        match self {
            CP1::Finite(z) => {
                let n = (1.0 + z.norm_sqr()).sqrt();
                (z / n, Complex::new(1.0 / n, 0.0))
            }
            CP1::Infinity => (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
        }
    }
}

impl From<Complex> for CP1 {
    fn from(z: Complex) -> Self {
        CP1::Finite(z)
    }
}

impl fmt::Display for CP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CP1::Finite(z) => write!(f, "{:.6}{:+.6}i", z.re, z.im),
            CP1::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for CP1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CP1::Finite(z) => [z.re, z.im].serialize(s),
            CP1::Infinity => "inf".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for CP1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([f64; 2]),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pair([re, im]) => Ok(CP1::new(re, im)),
            Raw::Tag(t) if t == "inf" => Ok(CP1::Infinity),
            Raw::Tag(t) => Err(D::Error::custom(format!("unknown CP1 tag {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_formula_values() {
        let zero = CP1::new(0.0, 0.0);
        let one = CP1::new(1.0, 0.0);
        // d(0, 1) = 2·1/√(1·2) = √2 by the documented formula.
        assert!((zero.chordal(&one) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((zero.chordal(&CP1::Infinity) - 2.0).abs() < 1e-15);
        assert_eq!(CP1::Infinity.chordal(&CP1::Infinity), 0.0);
    }

    #[test]
    fn serde_round_trip() {
        let pts = [CP1::new(1.5, -2.0), CP1::Infinity];
        for p in pts {
            let s = serde_json::to_string(&p).unwrap();
            let q: CP1 = serde_json::from_str(&s).unwrap();
            assert!(p.chordal(&q) < 1e-15);
        }
    }
}
