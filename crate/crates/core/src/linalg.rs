//! Small dense complex linear algebra: a cyclic Jacobi eigensolver for 4×4
//! Hermitian matrices and the intertwiner solve used by the scenario
//! constructions.

#![allow(clippy::needless_range_loop)]

use crate::cp1::Complex;
use crate::mobius::MobiusMap;

const ZERO: Complex = Complex::new(0.0, 0.0);

/// Eigen-decomposition of a 4×4 Hermitian matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eigen_4(h: &[[Complex; 4]; 4]) -> ([f64; 4], [[Complex; 4]; 4]) {
    let mut a = *h;
    // v columns accumulate the eigenvectors: v[i][j] is component i of vector j.
    let mut v = [[ZERO; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = Complex::new(1.0, 0.0);
    }

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += a[p][q].norm_sqr();
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let hpq = a[p][q];
                if hpq.norm() < 1e-18 {
                    continue;
                }
                let phi = hpq.arg();
                let theta = 0.5 * (2.0 * hpq.norm()).atan2(a[p][p].re - a[q][q].re);
                let c = theta.cos();
                let s = theta.sin();
                let e_pos = Complex::from_polar(1.0, phi);
                // Column rotation: col_p ← c·col_p + s·e^{−iφ}·col_q,
                //                  col_q ← −s·e^{iφ}·col_p + c·col_q.
                for i in 0..4 {
                    let ap = a[i][p];
                    let aq = a[i][q];
                    a[i][p] = c * ap + s * e_pos.conj() * aq;
                    a[i][q] = -s * e_pos * ap + c * aq;
                }
                for j in 0..4 {
                    let ap = a[p][j];
                    let aq = a[q][j];
                    a[p][j] = c * ap + s * e_pos * aq;
                    a[q][j] = -s * e_pos.conj() * ap + c * aq;
                }
                for i in 0..4 {
                    let vp = v[i][p];
                    let vq = v[i][q];
                    v[i][p] = c * vp + s * e_pos.conj() * vq;
                    v[i][q] = -s * e_pos * vp + c * vq;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[i][i].re.partial_cmp(&a[j][j].re).unwrap());
    let mut vals = [0.0; 4];
    let mut vecs = [[ZERO; 4]; 4];
    for (slot, &idx) in order.iter().enumerate() {
        vals[slot] = a[idx][idx].re;
        for i in 0..4 {
            vecs[i][slot] = v[i][idx];
        }
    }
    (vals, vecs)
}

fn vec_of(m: &MobiusMap) -> [Complex; 4] {
    [m.a, m.b, m.c, m.d]
}

/// Two-dimensional null space of a 4×4 complex matrix expected to have rank
/// two: Gaussian elimination with full pivoting, the two weakest pivot
/// columns taken as free variables.
fn null_space_rank2(k: &[[Complex; 4]; 4]) -> Option<([Complex; 4], [Complex; 4])> {
    let mut a = *k;
    let mut col_perm = [0usize, 1, 2, 3];
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, permuted col slot)
    let scale = a
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for step in 0..2 {
        // Full pivot over the remaining block.
        let mut best = (step, step, 0.0f64);
        for r in step..4 {
            for c in step..4 {
                let v = a[r][col_perm[c]].norm();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 < 1e-10 * scale {
            return None; // rank below two: degenerate input
        }
        a.swap(step, best.0);
        col_perm.swap(step, best.1);
        let p = a[step][col_perm[step]];
        for r in (step + 1)..4 {
            let f = a[r][col_perm[step]] / p;
            for c in 0..4 {
                let sub = f * a[step][col_perm[c]];
                a[r][col_perm[c]] -= sub;
            }
        }
        pivots.push((step, step));
    }
    // Rows 2..4 should now be ~0 on the pivot columns and small everywhere
    // if the rank really is two; free columns are slots 2 and 3.
    let mut basis = [[ZERO; 4]; 2];
    for (which, free_slot) in [2usize, 3].iter().enumerate() {
        let mut x = [ZERO; 4];
        x[col_perm[*free_slot]] = Complex::new(1.0, 0.0);
        // Back-substitute the two pivot rows.
        for step in (0..2).rev() {
            let mut acc = ZERO;
            for c in (step + 1)..4 {
                acc += a[step][col_perm[c]] * x[col_perm[c]];
            }
            x[col_perm[step]] = -acc / a[step][col_perm[step]];
        }
        basis[which] = x;
    }
    Some((basis[0], basis[1]))
}

fn mat_of(v: &[Complex; 4]) -> [[Complex; 2]; 2] {
    [[v[0], v[1]], [v[2], v[3]]]
}

/// Solves β·M = N·β with det β = 1, choosing the null-space element whose
/// projection is nearest `seed`. Returns None when the equation has no
/// usable solution (traces unmatched or a degenerate null space).
pub fn intertwiner_nearest(
    m: &MobiusMap,
    n: &MobiusMap,
    seed: &MobiusMap,
) -> Option<MobiusMap> {
    // K acts on vec(β) = (β11, β12, β21, β22):
    // (βM − Nβ)_{ij} = Σ_l β_{il} M_{lj} − Σ_k N_{ik} β_{kj}.
    let mm = [[m.a, m.b], [m.c, m.d]];
    let nn = [[n.a, n.b], [n.c, n.d]];
    let mut k = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            let row = 2 * i + j;
            for l in 0..2 {
                k[row][2 * i + l] += mm[l][j];
            }
            for kk in 0..2 {
                k[row][2 * kk + j] -= nn[i][kk];
            }
        }
    }
    // The intertwiner space has rank-2 structure when the traces match;
    // extract a basis by Gaussian elimination with full pivoting, keeping
    // the two weakest pivot columns free.
    let (b1, b2) = null_space_rank2(&k)?;
    let s = vec_of(seed);
    let dot = |x: &[Complex; 4], y: &[Complex; 4]| -> Complex {
        x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
    };
    let det = |v: &[Complex; 4]| v[0] * v[3] - v[1] * v[2];
    let dist = |v: &[Complex; 4]| -> f64 {
        v.iter()
            .zip(s.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
    };
    let combine = |c1: Complex, c2: Complex| -> [Complex; 4] {
        let mut out = [ZERO; 4];
        for i in 0..4 {
            out[i] = c1 * b1[i] + c2 * b2[i];
        }
        out
    };
    // The det-normalized projection of the seed onto the solution plane.
    let mut fallback: Vec<[Complex; 4]> = Vec::new();
    let c1 = dot(&b1, &s);
    let c2 = dot(&b2, &s);
    let raw = combine(c1, c2);
    let d_raw = det(&raw);
    if d_raw.norm() > 1e-14 {
        let root = d_raw.sqrt();
        for sgn in [1.0, -1.0] {
            let mut out = raw;
            for e in &mut out {
                *e = *e * sgn / root;
            }
            fallback.push(out);
        }
    }

    let valid = |v: &[Complex; 4]| -> Option<MobiusMap> {
        if !(det(v).norm() > 1e-14 && v.iter().all(|e| e.is_finite())) {
            return None;
        }
        let mat = mat_of(v);
        let beta = MobiusMap::new(mat[0][0], mat[0][1], mat[1][0], mat[1][1]).ok()?;
        let lhs = beta * *m;
        let rhs = *n * beta;
        (lhs.dist(&rhs) < 1e-8).then_some(beta)
    };
    fallback.sort_by(|x, y| dist(x).partial_cmp(&dist(y)).unwrap());
    fallback.iter().find_map(valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn c64(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let mut rng = SplitMix64::new(19);
        for _ in 0..50 {
            let mut h = [[ZERO; 4]; 4];
            for i in 0..4 {
                h[i][i] = c64(rng.uniform(-2.0, 2.0), 0.0);
                for j in (i + 1)..4 {
                    let z = c64(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                    h[i][j] = z;
                    h[j][i] = z.conj();
                }
            }
            let (vals, vecs) = hermitian_eigen_4(&h);
            assert!(vals.windows(2).all(|w| w[0] <= w[1] + 1e-12));
            // H·v_j = λ_j·v_j.
            for j in 0..4 {
                for i in 0..4 {
                    let mut hv = ZERO;
                    for l in 0..4 {
                        hv += h[i][l] * vecs[l][j];
                    }
                    assert!(
                        (hv - vals[j] * vecs[i][j]).norm() < 1e-9,
                        "residual too large"
                    );
                }
            }
        }
    }

    #[test]
    fn intertwiner_solves_commutator_equation() {
        // Prescribe [A, β] = h: β·A⁻¹ = (A⁻¹h)·β with matched traces.
        let a = MobiusMap::new(c64(1.1, 0.2), c64(0.4, 0.0), c64(0.05, 0.0), c64(1.0, -0.1))
            .unwrap();
        // Build a target h known to be a commutator: pick any β0 and read
        // h = [A, β0].
        let beta0 =
            MobiusMap::new(c64(1.0, 0.0), c64(0.7, 0.3), c64(0.2, 0.0), c64(1.2, 0.0)).unwrap();
        let h = a * beta0 * a.inverse() * beta0.inverse();
        let m = a.inverse();
        let n = a.inverse() * h;
        let seed =
            MobiusMap::new(c64(1.0, 0.0), c64(0.6, 0.2), c64(0.15, 0.0), c64(1.25, 0.0)).unwrap();
        let beta = intertwiner_nearest(&m, &n, &seed).expect("solvable");
        let comm = a * beta * a.inverse() * beta.inverse();
        assert!(comm.dist(&h) < 1e-9, "commutator residual {}", comm.dist(&h));
    }
}
