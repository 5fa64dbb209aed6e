//! Shared building blocks for the scenario constructions: π-rotations about
//! vertical rays and one-holed-torus pieces with exactly prescribed boundary.

use super::config::DegenerationError;
use crate::cp1::Complex;
use crate::linalg::intertwiner_nearest;
use crate::mobius::MobiusMap;

/// π-rotation about the vertical ray over w: the map ω ↦ 2w − ω.
pub fn ray_rotation(w: Complex) -> MobiusMap {
    MobiusMap::new(
        Complex::new(-1.0, 0.0),
        2.0 * w,
        Complex::new(0.0, 0.0),
        Complex::new(1.0, 0.0),
    )
    .expect("unimodular")
}

/// Which matrix corner carries the trace-matching freedom. It must couple to
/// the boundary's limiting parabolic direction: a boundary degenerating to
/// an ∞-fixing parabolic pairs with `Lower`, a 0-fixing one with `Upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShearCorner {
    Lower,
    Upper,
}

fn shear(corner: ShearCorner, s: Complex) -> MobiusMap {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    match corner {
        ShearCorner::Lower => MobiusMap { a: one, b: zero, c: s, d: one },
        ShearCorner::Upper => MobiusMap { a: one, b: s, c: zero, d: one },
    }
}

/// A one-holed-torus generator pair with [a, b] equal to the boundary
/// exactly (up to linear-algebra roundoff).
#[derive(Debug, Clone, Copy)]
pub struct TorusPiece {
    pub a: MobiusMap,
    pub b: MobiusMap,
    /// The shear solving the trace-match equation.
    pub shift: Complex,
}

fn negated(m: &MobiusMap) -> MobiusMap {
    MobiusMap { a: -m.a, b: -m.b, c: -m.c, d: -m.d }
}

/// Builds the pair: a = base · shear(σ), with σ solving the conjugacy
/// condition tr(a⁻¹) = ±tr(a⁻¹·boundary) — affine in σ for either lift
/// sign — and b the intertwiner carrying a⁻¹ to a⁻¹·boundary nearest to
/// `beta_seed`. Among the two sign branches the root nearest `s_seed` wins,
/// and the chosen lift sign propagates into the intertwiner equation.
pub fn torus_with_boundary(
    boundary: &MobiusMap,
    base: &MobiusMap,
    corner: ShearCorner,
    s_seed: Complex,
    beta_seed: &MobiusMap,
    sample: usize,
) -> Result<TorusPiece, DegenerationError> {
    let a_of = |s: Complex| *base * shear(corner, s);
    // tr(A(σ)⁻¹) and tr(A(σ)⁻¹·boundary) are affine in σ because the
    // adjugate of a det-1 matrix is linear in its entries.
    let solve_branch = |sign: f64| -> Option<Complex> {
        let g = |s: Complex| {
            let ai = a_of(s).inverse();
            ai.trace() - sign * (ai * *boundary).trace()
        };
        let mut s0 = s_seed;
        let mut g0 = g(s0);
        let mut s1 = s_seed + Complex::new(1.0, 0.0);
        let mut g1 = g(s1);
        for _ in 0..12 {
            let denom = g1 - g0;
            if denom.norm() < 1e-300 {
                return None;
            }
            let s2 = s1 - g1 * (s1 - s0) / denom;
            let g2 = g(s2);
            s0 = s1;
            g0 = g1;
            s1 = s2;
            g1 = g2;
            if g1.norm() < 1e-13 {
                break;
            }
        }
        (g1.norm() < 1e-9).then_some(s1)
    };

    let mut best: Option<(f64, Complex)> = None;
    for sign in [1.0, -1.0] {
        if let Some(s) = solve_branch(sign) {
            let closer = best
                .map(|(_, prev)| (s - s_seed).norm() < (prev - s_seed).norm())
                .unwrap_or(true);
            if closer {
                best = Some((sign, s));
            }
        }
    }
    let Some((sign, s)) = best else {
        return Err(DegenerationError::SolverFailure {
            sample,
            reason: "trace-match equation has no usable root".into(),
        });
    };

    let a = a_of(s);
    let m = a.inverse();
    let n_raw = a.inverse() * *boundary;
    let n = if sign > 0.0 { n_raw } else { negated(&n_raw) };
    let b = intertwiner_nearest(&m, &n, beta_seed).ok_or_else(|| {
        DegenerationError::SolverFailure {
            sample,
            reason: "no intertwiner for the boundary equation".into(),
        }
    })?;
    let comm = a * b * a.inverse() * b.inverse();
    let residual = comm.dist(boundary);
    if residual > 1e-8 {
        return Err(DegenerationError::SolverFailure {
            sample,
            reason: format!("commutator residual {residual:.3e}"),
        });
    }
    Ok(TorusPiece { a, b, shift: s })
}
