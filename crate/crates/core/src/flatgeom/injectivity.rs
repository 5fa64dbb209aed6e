//! Upper injectivity radius of a polygon surface.
//!
//! The injectivity radius at a point is taken as half the length of the
//! shortest essential straight geodesic loop through it. Candidate loops come
//! from the unfolding tree: each reachable placement isometry g contributes
//! the chord from x to g(x), accepted when tracing the chord through the
//! glued copies actually arrives on the g-sheet. Straight closed loops carry
//! nonzero developing translation, so g ≠ id chords are never contractible.

use super::polygon::{PolygonSurface, UnfoldIso};
use crate::cp1::Complex;

/// Placement isometries whose copies can contribute chords of length at most
/// `reach` to points of the base polygon. BFS over edge crossings with
/// deduplication.
pub fn unfold_isometries(surface: &PolygonSurface, reach: f64) -> Vec<UnfoldIso> {
    let centroid: Complex =
        surface.vertices.iter().sum::<Complex>() / surface.vertices.len() as f64;
    let diam = surface.diameter_bound();
    let keep_radius = reach + 1.5 * diam;

    let quantum = 1e-9 * diam.max(1.0);
    let key = |iso: &UnfoldIso| -> (bool, i64, i64) {
        (
            iso.flip,
            (iso.t.re / quantum).round() as i64,
            (iso.t.im / quantum).round() as i64,
        )
    };

    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut frontier = vec![UnfoldIso::IDENTITY];
    seen.insert(key(&UnfoldIso::IDENTITY));
    let gluings: Vec<UnfoldIso> = (0..surface.edge_count())
        .map(|e| surface.gluing_map(e).expect("validated surface"))
        .collect();
    while let Some(iso) = frontier.pop() {
        out.push(iso);
        for g in &gluings {
            let next = iso.compose(&g.inverse());
            if (next.apply(centroid) - centroid).norm() > keep_radius {
                continue;
            }
            if seen.insert(key(&next)) {
                frontier.push(next);
            }
        }
    }
    out
}

/// Traces the straight segment from `x` to `target.apply(x)` through the
/// glued copies. Returns true when the walk ends on the `target` sheet (the
/// chord closes up to a geodesic loop on the surface). Vertex hits and walk
/// overruns return false.
pub fn chord_closes(surface: &PolygonSurface, x: Complex, target: &UnfoldIso) -> bool {
    let goal = target.apply(x);
    let dir = goal - x;
    let len = dir.norm();
    if len < 1e-12 {
        return false;
    }
    let diam = surface.diameter_bound();
    let quantum = 1e-9 * diam.max(1.0);
    let same_iso = |a: &UnfoldIso, b: &UnfoldIso| {
        a.flip == b.flip && (a.t - b.t).norm() < 16.0 * quantum
    };

    let mut h = UnfoldIso::IDENTITY;
    let mut t_cur = 0.0f64;
    let max_steps = 64 + (16.0 * len / diam.max(1e-9)) as usize * surface.edge_count();
    for _ in 0..max_steps {
        // Exit parameter through the current placed copy h(P).
        let mut t_exit = f64::INFINITY;
        let mut exit_edge = usize::MAX;
        let mut vertex_hit = false;
        let n = surface.edge_count();
        for e in 0..n {
            let a = h.apply(surface.vertices[e]);
            let b = h.apply(surface.vertices[(e + 1) % n]);
            // Solve x + t·dir on segment a + s·(b−a).
            let ev = b - a;
            let denom = cross(dir, ev);
            if denom.abs() < 1e-14 * dir.norm() * ev.norm() {
                continue; // parallel
            }
            let rel = a - x;
            let t = cross(rel, ev) / denom;
            let s = cross(rel, dir) / denom;
            if t > t_cur + 1e-11 && t < t_exit && (-1e-11..=1.0 + 1e-11).contains(&s) {
                if !(1e-9..=1.0 - 1e-9).contains(&s) {
                    vertex_hit = true;
                }
                t_exit = t;
                exit_edge = e;
            }
        }
        if t_exit >= 1.0 - 1e-11 {
            // Endpoint reached inside the current copy.
            return same_iso(&h, target);
        }
        if vertex_hit || exit_edge == usize::MAX {
            return false;
        }
        let g = surface.gluing_map(exit_edge).expect("validated surface");
        h = h.compose(&g.inverse());
        t_cur = t_exit;
    }
    false
}

/// Injectivity radius at one point: half the shortest realized chord.
pub fn injectivity_radius_at(
    surface: &PolygonSurface,
    isometries: &[UnfoldIso],
    x: Complex,
) -> f64 {
    let mut candidates: Vec<(f64, &UnfoldIso)> = isometries
        .iter()
        .filter(|g| !g.is_identity(1e-12))
        .map(|g| ((g.apply(x) - x).norm(), g))
        .filter(|(l, _)| *l > 1e-12)
        .collect();
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (len, g) in candidates {
        if chord_closes(surface, x, g) {
            return len / 2.0;
        }
    }
    f64::INFINITY
}

/// Maximum sampled injectivity radius over an offset grid of the given
/// density. Offset grids at densities n and 3n nest, so refining the grid by
/// factors of three is monotone nondecreasing, approaching the upper
/// injectivity radius from below.
pub fn upper_injectivity_radius(surface: &PolygonSurface, grid: usize) -> f64 {
    assert!(grid >= 2, "need at least a 2x2 grid");
    let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &surface.vertices {
        lo_x = lo_x.min(v.re);
        hi_x = hi_x.max(v.re);
        lo_y = lo_y.min(v.im);
        hi_y = hi_y.max(v.im);
    }
    // Reach: a loop through any interior point exists with length at most
    // twice the largest gluing translation plus the diameter.
    let max_shift = (0..surface.edge_count())
        .map(|e| surface.gluing_map(e).expect("validated").t.norm())
        .fold(0.0f64, f64::max);
    let reach = 2.0 * max_shift + 2.0 * surface.diameter_bound();
    let isometries = unfold_isometries(surface, reach);

    let mut best = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
            let x = Complex::new(
                lo_x + (hi_x - lo_x) * (i as f64 + 0.5) / grid as f64,
                lo_y + (hi_y - lo_y) * (j as f64 + 0.5) / grid as f64,
            );
            if !surface.contains(x) {
                continue;
            }
            let r = injectivity_radius_at(surface, &isometries, x);
            if r.is_finite() && r > best {
                best = r;
            }
        }
    }
    best
}

fn cross(a: Complex, b: Complex) -> f64 {
    a.re * b.im - a.im * b.re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_torus_sampled_radius() {
        let t = PolygonSurface::rect_torus(1.0, 1.0);
        // Every point has a shortest loop of length 1: radius 1/2.
        let r = upper_injectivity_radius(&t, 8);
        assert!((r - 0.5).abs() < 1e-9, "got {r}");
    }

    #[test]
    fn rect_torus_matches_lattice_brute_force() {
        let (w, h) = (2.0, 0.7);
        let t = PolygonSurface::rect_torus(w, h);
        let mut best = f64::INFINITY;
        for p in -4i32..=4 {
            for q in -4i32..=4 {
                if p == 0 && q == 0 {
                    continue;
                }
                let v = Complex::new(p as f64 * w, q as f64 * h);
                best = best.min(v.norm());
            }
        }
        let r = upper_injectivity_radius(&t, 16);
        assert!((r - best / 2.0).abs() < 0.02 * best, "{r} vs {}", best / 2.0);
    }

    #[test]
    fn scaling_homogeneity_exact() {
        let l = PolygonSurface::l_shape(2.0, 2.0, 1.0, 1.0).unwrap();
        let r1 = upper_injectivity_radius(&l, 12);
        let r2 = upper_injectivity_radius(&l.scaled(2.0), 12);
        assert!((r2 - 2.0 * r1).abs() < 1e-12, "{r2} vs {}", 2.0 * r1);
    }

    #[test]
    fn tripled_grid_is_monotone() {
        let l = PolygonSurface::l_shape(2.0, 2.0, 1.0, 1.0).unwrap();
        let r8 = upper_injectivity_radius(&l, 8);
        let r24 = upper_injectivity_radius(&l, 24);
        assert!(r24 >= r8 - 1e-12, "{r24} < {r8}");
    }

    #[test]
    fn chords_close_on_torus() {
        let t = PolygonSurface::rect_torus(1.0, 1.0);
        let isos = unfold_isometries(&t, 4.0);
        let x = Complex::new(0.3, 0.4);
        // The horizontal unit translation is realized.
        let g = isos
            .iter()
            .find(|g| !g.flip && (g.t - Complex::new(1.0, 0.0)).norm() < 1e-9)
            .expect("unit translation in unfolding");
        assert!(chord_closes(&t, x, g));
        // A diagonal (1,1) chord is realized too.
        let g = isos
            .iter()
            .find(|g| !g.flip && (g.t - Complex::new(1.0, 1.0)).norm() < 1e-9)
            .unwrap();
        assert!(chord_closes(&t, x, g));
    }

    #[test]
    fn l_shape_chord_visibility() {
        // On the L, the short horizontal translation by 1 closes only in the
        // upper leg, not in the wide lower region.
        let l = PolygonSurface::l_shape(2.0, 2.0, 1.0, 1.0).unwrap();
        let isos = unfold_isometries(&l, 6.0);
        let g = isos
            .iter()
            .find(|g| !g.flip && (g.t - Complex::new(-1.0, 0.0)).norm() < 1e-9)
            .expect("translation by -1 in unfolding");
        let upper = Complex::new(0.5, 1.5);
        let lower = Complex::new(0.5, 0.5);
        assert!(chord_closes(&l, upper, g) || chord_closes(&l, upper, &g.inverse()));
        assert!(!chord_closes(&l, lower, g) && !chord_closes(&l, lower, &g.inverse()));
    }
}
