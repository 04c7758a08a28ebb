//! One-sided Jacobi SVD for complex matrices.
//!
//! nalgebra's Golub-Kahan SVD can silently misconverge on complex inputs
//! (singular values off by ~1e−2 on benign rank-one matrices), so every
//! complex decomposition in this crate goes through this routine instead.
//! One-sided Jacobi orthogonalizes the columns of A by 2×2 unitary rotations;
//! it is deterministic, free of convergence surprises at these sizes, and
//! computes small singular values to high relative accuracy.

use super::{basis_vector, inner, CMatrix, CVector, C64};

/// Thin SVD: A = U · diag(σ) · Vᴴ with orthonormal columns in U (m×k) and
/// V (n×k), k = min(m, n), σ descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

const SWEEP_LIMIT: usize = 60;
const ORTHO_EPS: f64 = 1e-14;

pub fn svd(a: &CMatrix) -> Svd {
    let m = a.nrows();
    let n = a.ncols();
    let k = m.min(n);

    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);

    for _sweep in 0..SWEEP_LIMIT {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let wi = w.column(i);
                let wj = w.column(j);
                let aa = wi.norm_squared();
                let bb = wj.norm_squared();
                let g = wi.dotc(&wj); // Σ conj(w_i) w_j
                let gn = g.norm();
                if gn <= ORTHO_EPS * (aa * bb).sqrt() || gn < 1e-300 {
                    continue;
                }
                rotated = true;
                // phase-align so the 2x2 Gram block is real symmetric, then
                // apply the classical symmetric Jacobi rotation
                let phase = g.unscale(gn);
                let tau = (bb - aa) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let (cc, ss) = (C64::from(c), C64::from(s));
                let ph_conj = phase.conj();
                for r in 0..m {
                    let x = w[(r, i)];
                    let y = w[(r, j)] * ph_conj;
                    w[(r, i)] = x * cc - y * ss;
                    w[(r, j)] = x * ss + y * cc;
                }
                for r in 0..n {
                    let x = v[(r, i)];
                    let y = v[(r, j)] * ph_conj;
                    v[(r, i)] = x * cc - y * ss;
                    v[(r, j)] = x * ss + y * cc;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // column norms are the singular values; sort descending
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut u_cols: Vec<CVector> = Vec::with_capacity(k);
    let mut v_cols: Vec<CVector> = Vec::with_capacity(k);
    let mut sigma = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let s = norms[idx];
        sigma.push(s);
        v_cols.push(v.column(idx).into_owned());
        if s > 1e-300 {
            u_cols.push(w.column(idx).into_owned().unscale(s));
        } else {
            // null direction: complete deterministically against accepted columns
            u_cols.push(complete_column(m, &u_cols));
        }
    }

    Svd {
        u: CMatrix::from_columns(&u_cols),
        singular_values: sigma,
        v: CMatrix::from_columns(&v_cols),
    }
}

fn complete_column(m: usize, existing: &[CVector]) -> CVector {
    let mut best: Option<(f64, CVector)> = None;
    for c in 0..m {
        let mut r = basis_vector(m, c);
        for _ in 0..2 {
            for col in existing {
                let coeff = inner(&r, col);
                r -= col * coeff;
            }
        }
        let nr = r.norm();
        if best.as_ref().map_or(true, |(bn, _)| nr > *bn) {
            best = Some((nr, r));
        }
    }
    let (nr, r) = best.expect("m > 0");
    r.unscale(nr.max(1e-300))
}

/// Least-squares solve min ‖A c − b‖₂ through the Jacobi SVD, truncating
/// singular values below `rel_eps · σ_max`.
pub fn lstsq(a: &CMatrix, b: &CVector, rel_eps: f64) -> CVector {
    let dec = svd(a);
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    let cut = rel_eps * smax;
    let mut coeffs = CVector::zeros(a.ncols());
    for (idx, &s) in dec.singular_values.iter().enumerate() {
        if s <= cut || s <= 1e-300 {
            continue;
        }
        let proj = inner(b, &dec.u.column(idx).into_owned()).unscale(s);
        coeffs += dec.v.column(idx).into_owned() * proj;
    }
    coeffs
}
