//! The saturated unitary orbit of C_q = q·E₁₁ + p·E₁₂: construction,
//! membership testing, canonicalization and two-element decompositions.
//!
//! Membership characterization: A lies in the orbit iff A has rank one,
//! |tr(A)| = q and ‖A‖₂ = 1. Every member factors as θ·(x ⊗ y*) with unit
//! vectors satisfying ⟨x, y⟩ = q and |θ| = 1.

use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::json::{c64_to_pair, MatrixJson};
use crate::linalg::{
    extend_to_unitary, hs_norm, inner, numerical_rank, outer, sample, trace,
    unit_phase, CMatrix, CVector, C64, QParameter,
};

/// The generator q·E₁₁ + √(1−q²)·E₁₂ at size n ≥ 2.
pub fn build_cq(q: QParameter, n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::Dimension(format!(
            "C_q needs at least two columns, got n = {n}"
        )));
    }
    let mut m = CMatrix::zeros(n, n);
    m[(0, 0)] = C64::from(q.q());
    m[(0, 1)] = C64::from(q.p());
    Ok(m)
}

/// Orbit member together with its certificates.
#[derive(Debug, Clone)]
pub struct OrbitElement {
    /// The member itself: phase·(x ⊗ y*).
    pub matrix: CMatrix,
    pub x: CVector,
    pub y: CVector,
    pub phase: C64,
    /// Unitary U with matrix ≈ canonical_phase · U* C_q U.
    pub canonical_unitary: CMatrix,
    pub canonical_phase: C64,
}

impl OrbitElement {
    /// Factor an orbit member; fails with diagnostics when the membership
    /// conditions do not hold at tolerance 1e−6.
    pub fn from_matrix(m: &CMatrix, q: QParameter) -> Result<OrbitElement> {
        let (x, y, phase) = dyad_factor(m, q)?;
        let canon = canonicalize(m, q)?;
        Ok(OrbitElement {
            matrix: m.clone(),
            x,
            y,
            phase,
            canonical_unitary: canon.unitary,
            canonical_phase: canon.theta,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "matrix": MatrixJson::from_matrix(&self.matrix),
            "x": MatrixJson::from_vector(&self.x),
            "y": MatrixJson::from_vector(&self.y),
            "phase": c64_to_pair(self.phase),
            "theta": c64_to_pair(self.canonical_phase),
            "u": MatrixJson::from_matrix(&self.canonical_unitary),
        })
    }
}

/// Build the member θ·(x ⊗ y*) with y = q·x + p·w from an orthonormal pair.
pub fn make_orbit_element(
    q: QParameter,
    x: &CVector,
    w: &CVector,
    theta: C64,
) -> Result<OrbitElement> {
    if x.len() != w.len() {
        return Err(Error::Dimension("x and w must have equal length".into()));
    }
    let tol = 1e-8;
    if (x.norm() - 1.0).abs() > tol || (w.norm() - 1.0).abs() > tol {
        return Err(Error::Validation(format!(
            "x and w must be unit vectors (norms {:.3e}, {:.3e})",
            x.norm(),
            w.norm()
        )));
    }
    if inner(x, w).norm() > tol {
        return Err(Error::Validation(format!(
            "x and w must be orthogonal (|<x,w>| = {:.3e})",
            inner(x, w).norm()
        )));
    }
    if (theta.norm() - 1.0).abs() > tol {
        return Err(Error::Validation(format!(
            "theta must have unit modulus, got |theta| = {}",
            theta.norm()
        )));
    }
    let theta = unit_phase(theta);
    let y = x * C64::from(q.q()) + w * C64::from(q.p());
    let m = outer(x, &y) * theta;
    let canon = canonicalize(&m, q)?;
    Ok(OrbitElement {
        matrix: m,
        x: x.clone(),
        y,
        phase: theta,
        canonical_unitary: canon.unitary,
        canonical_phase: canon.theta,
    })
}

/// Membership diagnostics for the three defining conditions.
#[derive(Debug, Clone, Copy)]
pub struct OrbitCheck {
    pub in_orbit: bool,
    pub rank: usize,
    pub abs_trace: f64,
    pub hs_norm: f64,
}

/// A ∈ SU(C_q) iff rank(A) = 1, |tr A| = q and ‖A‖₂ = 1, each at tolerance `tol`.
pub fn is_in_orbit(a: &CMatrix, q: QParameter, tol: f64) -> Result<OrbitCheck> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "orbit membership needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    let rank = numerical_rank(a, tol);
    let abs_trace = trace(a)?.norm();
    let hs = hs_norm(a);
    let in_orbit = rank == 1 && (abs_trace - q.q()).abs() <= tol && (hs - 1.0).abs() <= tol;
    Ok(OrbitCheck {
        in_orbit,
        rank,
        abs_trace,
        hs_norm: hs,
    })
}

/// Canonical data (θ, U) with A ≈ θ·U*·C_q·U.
#[derive(Debug, Clone)]
pub struct Canonicalization {
    pub theta: C64,
    pub unitary: CMatrix,
    /// ‖A − θ·U* C_q U‖₂; ~1e−15 for exact members.
    pub residual: f64,
}

/// Factor A = phase·(x ⊗ y*) with ‖x‖ = ‖y‖ = 1 (to the input's accuracy)
/// and ⟨x, y⟩ = |tr A| real nonnegative.
fn dyad_factor(a: &CMatrix, q: QParameter) -> Result<(CVector, CVector, C64)> {
    let check = is_in_orbit(a, q, 1e-6)?;
    if !check.in_orbit {
        return Err(Error::Domain(format!(
            "matrix is not in the saturated orbit: rank {}, |trace| {:.6e} (want {:.6e}), hs norm {:.6e} (want 1)",
            check.rank, check.abs_trace, q.q(), check.hs_norm
        )));
    }
    let dec = crate::linalg::svd::svd(a);
    let sigma = dec.singular_values[0];
    let x = dec.u.column(0).into_owned();
    // A ≈ σ·x·v*, so A = x ⊗ (σ v)*.
    let y_raw = dec.v.column(0).into_owned() * C64::from(sigma);
    // absorb the trace phase so that <x, y> = |tr A| >= 0
    let tau = trace(a)?;
    let theta = unit_phase(tau);
    let y = y_raw * theta;
    Ok((x, y, theta))
}

/// Canonicalize an orbit member: find (θ, U) with ‖A − θ·U* C_q U‖₂ small.
/// The global phase of U is fixed by making its first nonzero entry (scanned
/// column-major) real positive.
pub fn canonicalize(a: &CMatrix, q: QParameter) -> Result<Canonicalization> {
    let n = a.nrows();
    let (x, y, theta) = dyad_factor(a, q)?;

    let v = if q.is_classical() {
        // q = 1: y is a phase multiple of x; U only needs to move x to e1
        extend_to_unitary(&[x.clone()])?
    } else {
        // split y = <y,x>·x + z and send (x, z/|z|) to (e1, e2)
        let z = &y - &x * inner(&y, &x);
        let zn = z.norm();
        if zn < 1e-9 {
            return Err(Error::Domain(
                "orbit member has degenerate orthogonal component; cannot canonicalize".into(),
            ));
        }
        let zhat = z.unscale(zn);
        extend_to_unitary(&[x.clone(), zhat])?
    };
    let mut u = v.adjoint();

    // fixed phase convention for reproducible output
    let mut phase_fix = C64::new(1.0, 0.0);
    'outer: for j in 0..n {
        for i in 0..n {
            let e = u[(i, j)];
            if e.norm() > 1e-8 {
                phase_fix = unit_phase(e).conj();
                break 'outer;
            }
        }
    }
    u *= phase_fix;

    let cq = build_cq(q, n)?;
    let recon = u.adjoint() * &cq * &u * theta;
    let residual = (a - recon).norm();
    Ok(Canonicalization {
        theta,
        unitary: u,
        residual,
    })
}

/// Two complex numbers of equal modulus m with z₊ + z₋ = s; needs m ≥ |s|/2.
/// z₊ takes the upper-half-plane offset first (ties broken toward positive
/// real offset).
fn split_equal_modulus(s: C64, m: f64) -> Result<(C64, C64)> {
    let half = s.unscale(2.0);
    let rad2 = m * m - half.norm_sqr();
    if rad2 < -1e-12 {
        return Err(Error::Domain(format!(
            "cannot split {s} into two parts of modulus {m}"
        )));
    }
    let rad = rad2.max(0.0).sqrt();
    let dir = if s.norm() < 1e-300 {
        C64::i()
    } else {
        C64::i() * unit_phase(s)
    };
    let mut delta = dir * C64::from(rad);
    if delta.im < 0.0 || (delta.im == 0.0 && delta.re < 0.0) {
        delta = -delta;
    }
    Ok((half + delta, half - delta))
}

/// Split a rank-one R with ‖R‖ < min{2q, 2p} into A_t + B_t, both in SU(C_q).
///
/// R is first rotated to the frame where it reads ξ·E₁₁ + η·E₁₂; the summands
/// are ξ/2 ± δ on the modulus-q circle for the E₁₁ slot, η/2 ± δ' on a
/// modulus-p' circle (p' the midpoint of [η/2, p)) for the E₁₂ slot, and a
/// cancelling pair ±r·e^{it} in column k closing the Hilbert-Schmidt budget,
/// r = √(p² − p'²). `k` is a 1-based column index, 3 ≤ k ≤ n.
pub fn decompose_rank_one(
    r: &CMatrix,
    q: QParameter,
    t: f64,
    k: usize,
) -> Result<(OrbitElement, OrbitElement)> {
    if !r.is_square() {
        return Err(Error::Dimension(format!(
            "R must be square, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let n = r.nrows();
    if q.is_classical() {
        return Err(Error::Domain(
            "q = 1 makes min{2q, 2p} = 0; no rank-one matrix satisfies the norm precondition".into(),
        ));
    }
    if k < 3 || k > n {
        return Err(Error::Validation(format!(
            "column index k must satisfy 3 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if numerical_rank(r, 1e-9) != 1 {
        return Err(Error::Domain(format!(
            "R must have rank one, got numerical rank {}",
            numerical_rank(r, 1e-9)
        )));
    }
    let limit = (2.0 * q.q()).min(2.0 * q.p());
    let opnorm = crate::linalg::operator_norm(r);
    if opnorm >= limit {
        return Err(Error::Domain(format!(
            "operator norm {opnorm:.6} must be below min{{2q, 2p}} = {limit:.6}"
        )));
    }

    // rotate R to xi·E11 + eta·E12: R = u ⊗ w*, V maps (u, w_perp) to (e1, e2)
    let dec = crate::linalg::svd::svd(r);
    let u = dec.u.column(0).into_owned();
    let sigma = dec.singular_values[0];
    let w = dec.v.column(0).into_owned() * C64::from(sigma);

    let xi = trace(r)?;
    let w_par = &u * inner(&w, &u);
    let w_perp = &w - w_par;
    let eta = w_perp.norm();

    let frame = if eta > 1e-12 {
        let wp = w_perp.unscale(eta);
        extend_to_unitary(&[u.clone(), wp])?
    } else {
        extend_to_unitary(&[u.clone()])?
    };

    if xi.norm() >= 2.0 * q.q() || eta >= 2.0 * q.p() {
        // unreachable given the operator norm guard, kept as a hard stop
        return Err(Error::Domain(format!(
            "reduced coefficients out of range: |xi| = {:.6}, eta = {:.6}",
            xi.norm(),
            eta
        )));
    }

    let (z1, z3) = split_equal_modulus(xi, q.q())?;
    let p_prime = (eta / 2.0 + q.p()) / 2.0;
    let (z2, z4) = split_equal_modulus(C64::from(eta), p_prime)?;
    let rr = (q.p() * q.p() - p_prime * p_prime).max(0.0).sqrt();
    let spin = C64::from_polar(rr, t);

    let mut a_red = CMatrix::zeros(n, n);
    a_red[(0, 0)] = z1;
    a_red[(0, 1)] = z2;
    a_red[(0, k - 1)] += spin;
    let mut b_red = CMatrix::zeros(n, n);
    b_red[(0, 0)] = z3;
    b_red[(0, 1)] = z4;
    b_red[(0, k - 1)] -= spin;

    let a_full = &frame * a_red * frame.adjoint();
    let b_full = &frame * b_red * frame.adjoint();
    debug_assert!((&a_full + &b_full - r).norm() < 1e-10);

    Ok((
        OrbitElement::from_matrix(&a_full, q)?,
        OrbitElement::from_matrix(&b_full, q)?,
    ))
}

/// Sample one splitting R = A + B of a rank-two matrix into two rank-one
/// parts. Both parts act between the range and co-range of R; within that
/// 2×2 frame A = a·b* with b*·S⁻¹·a = 1, which forces det(S − a b*) = 0.
pub fn sample_rank_one_pair(r: &CMatrix, seed: u64) -> Result<(CMatrix, CMatrix)> {
    if !r.is_square() {
        return Err(Error::Dimension("R must be square".into()));
    }
    if numerical_rank(r, 1e-9) != 2 {
        return Err(Error::Domain(format!(
            "R must have rank two, got numerical rank {}",
            numerical_rank(r, 1e-9)
        )));
    }
    let n = r.nrows();
    let dec = crate::linalg::svd::svd(r);
    let u2 = dec.u.columns(0, 2).into_owned();
    let v2 = dec.v.columns(0, 2).into_owned();
    let s1 = dec.singular_values[0];
    let s2 = dec.singular_values[1];

    let mut rng = sample::rng_for(seed);
    let (a_core, b_core) = loop {
        let a = sample::unit_vector_with(&mut rng, 2);
        let b0 = sample::unit_vector_with(&mut rng, 2);
        // c = b0* S^{-1} a
        let sinv_a = CVector::from_vec(vec![a[0].unscale(s1), a[1].unscale(s2)]);
        let c = inner(&sinv_a, &b0);
        if c.norm() < 1e-6 {
            continue;
        }
        let b = &b0 / c.conj();
        let a_core = outer(&a, &b);
        let s_core = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                C64::from(if i == 0 { s1 } else { s2 })
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let b_core = s_core - &a_core;
        if numerical_rank(&a_core, 1e-9) == 1 && numerical_rank(&b_core, 1e-9) == 1 {
            break (a_core, b_core);
        }
    };

    let a_full = &u2 * a_core * v2.adjoint();
    let b_full = &u2 * b_core * v2.adjoint();
    debug_assert!((&a_full + &b_full - r).norm() < 1e-9 * r.norm().max(1.0));
    debug_assert_eq!(a_full.nrows(), n);
    Ok((a_full, b_full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, matrix_unit};
    use approx::assert_relative_eq;

    fn q(v: f64) -> QParameter {
        QParameter::new(v).unwrap()
    }

    #[test]
    fn cq_entries_trace_and_norm() {
        let m = build_cq(q(0.6), 2).unwrap();
        assert_relative_eq!(m[(0, 0)].re, 0.6);
        assert_relative_eq!(m[(0, 1)].re, 0.8);
        assert_relative_eq!(trace(&m).unwrap().re, 0.6);
        for qv in [0.1, 0.35, 0.77, 1.0] {
            let m = build_cq(q(qv), 4).unwrap();
            assert_relative_eq!(trace(&m).unwrap().re, qv, epsilon = 1e-14);
            assert_relative_eq!(hs_norm(&m), 1.0, epsilon = 1e-12);
        }
        assert!(matches!(build_cq(q(0.5), 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn cq_at_q_one_is_e11() {
        let m = build_cq(q(1.0), 2).unwrap();
        assert!((m - matrix_unit(2, 0, 0)).norm() < 1e-15);
    }

    #[test]
    fn make_element_of_basis_pair_is_cq() {
        let e1 = basis_vector(3, 0);
        let e2 = basis_vector(3, 1);
        let el = make_orbit_element(q(0.6), &e1, &e2, C64::from(1.0)).unwrap();
        assert!((el.matrix.clone() - build_cq(q(0.6), 3).unwrap()).norm() < 1e-12);
        let el = make_orbit_element(q(1.0), &e1, &e2, C64::from(1.0)).unwrap();
        assert!((el.matrix.clone() - matrix_unit(3, 0, 0)).norm() < 1e-12);
    }

    #[test]
    fn make_element_rejects_bad_frames() {
        let e1 = basis_vector(3, 0);
        assert!(make_orbit_element(q(0.6), &e1, &e1, C64::from(1.0)).is_err());
        let long = &e1 * C64::from(2.0);
        assert!(make_orbit_element(q(0.6), &long, &basis_vector(3, 1), C64::from(1.0)).is_err());
    }

    #[test]
    fn random_members_pass_membership() {
        for seed in 0..50u64 {
            let qq = q(0.3 + 0.5 * (seed as f64 / 50.0));
            let n = 3 + (seed % 3) as usize;
            let u = sample::unitary(n, seed);
            let lam = sample::phase(seed + 999);
            let cq = build_cq(qq, n).unwrap();
            let member = u.adjoint() * cq * &u * lam;
            let check = is_in_orbit(&member, qq, 1e-8).unwrap();
            assert!(check.in_orbit, "seed {seed}: {check:?}");
        }
    }

    #[test]
    fn violators_fail_membership() {
        let qq = q(0.6);
        // rank two
        let two = matrix_unit(3, 0, 0) + matrix_unit(3, 1, 1);
        assert!(!is_in_orbit(&two, qq, 1e-8).unwrap().in_orbit);
        // wrong scale
        let half = build_cq(qq, 3).unwrap() * C64::from(0.5);
        assert!(!is_in_orbit(&half, qq, 1e-8).unwrap().in_orbit);
        // wrong trace, right rank and norm
        let other = build_cq(q(0.4), 3).unwrap();
        assert!(!is_in_orbit(&other, qq, 1e-8).unwrap().in_orbit);
    }

    #[test]
    fn canonicalize_cq_is_identity_like() {
        let qq = q(0.6);
        let cq = build_cq(qq, 3).unwrap();
        let canon = canonicalize(&cq, qq).unwrap();
        assert!((canon.theta - C64::from(1.0)).norm() < 1e-10);
        assert!(canon.residual < 1e-12);
    }

    #[test]
    fn canonicalize_round_trips_random_members() {
        for seed in 0..40u64 {
            let qq = q(0.25 + 0.7 * ((seed % 7) as f64 / 7.0));
            let n = 2 + (seed % 4) as usize;
            let u = sample::unitary(n, seed + 5);
            let lam = sample::phase(seed + 17);
            let member = u.adjoint() * build_cq(qq, n).unwrap() * &u * lam;
            let canon = canonicalize(&member, qq).unwrap();
            assert!(
                canon.residual <= 1e-8,
                "seed {seed}: residual {:.3e}",
                canon.residual
            );
        }
    }

    #[test]
    fn canonicalize_classical_projection() {
        let qq = q(1.0);
        let e11 = matrix_unit(3, 0, 0);
        let canon = canonicalize(&e11, qq).unwrap();
        assert!((canon.theta - C64::from(1.0)).norm() < 1e-12);
        assert!(canon.residual < 1e-10);
    }

    #[test]
    fn canonicalize_rejects_non_members() {
        let qq = q(0.6);
        let bad = matrix_unit(3, 0, 0) + matrix_unit(3, 1, 1);
        assert!(matches!(canonicalize(&bad, qq), Err(Error::Domain(_))));
    }

    #[test]
    fn decompose_example_and_membership() {
        let qq = q(0.6);
        // R = 0.5 E11 + 0.5 E12 at n = 3; operator norm 0.7071 < min{1.2, 1.6}
        let r = matrix_unit(3, 0, 0) * C64::from(0.5) + matrix_unit(3, 0, 1) * C64::from(0.5);
        let (a, b) = decompose_rank_one(&r, qq, 0.0, 3).unwrap();
        assert!((a.matrix.clone() + b.matrix.clone() - &r).norm() < 1e-10);
        for el in [&a, &b] {
            let check = is_in_orbit(&el.matrix, qq, 1e-8).unwrap();
            assert!(check.in_orbit, "{check:?}");
        }
    }

    #[test]
    fn decompose_rejects_out_of_domain_inputs() {
        let qq = q(0.6);
        let r = matrix_unit(3, 0, 0) * C64::from(1.3); // opnorm 1.3 >= 1.2
        assert!(matches!(
            decompose_rank_one(&r, qq, 0.0, 3),
            Err(Error::Domain(_))
        ));
        let ok = matrix_unit(3, 0, 0) * C64::from(0.5);
        assert!(matches!(
            decompose_rank_one(&ok, q(1.0), 0.0, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            decompose_rank_one(&ok, qq, 0.0, 2),
            Err(Error::Validation(_))
        ));
        let rank2 = matrix_unit(3, 0, 0) + matrix_unit(3, 1, 1) * C64::from(0.3);
        assert!(decompose_rank_one(&rank2, qq, 0.0, 3).is_err());
    }

    #[test]
    fn decompose_varies_with_t() {
        let qq = q(0.6);
        let r = matrix_unit(4, 0, 0) * C64::from(0.4) + matrix_unit(4, 0, 1) * C64::from(0.3);
        let mut firsts = Vec::new();
        for t in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let (a, b) = decompose_rank_one(&r, qq, t, 3).unwrap();
            assert!((a.matrix.clone() + b.matrix.clone() - &r).norm() < 1e-10);
            firsts.push(a.matrix.clone());
        }
        assert!((firsts[0].clone() - firsts[1].clone()).norm() > 1e-3);
        assert!((firsts[1].clone() - firsts[2].clone()).norm() > 1e-3);
    }

    #[test]
    fn rank_two_splits_sum_and_have_rank_one() {
        let r = sample::rank_k(4, 2, 7);
        for seed in 0..10u64 {
            let (a, b) = sample_rank_one_pair(&r, seed).unwrap();
            assert!((a.clone() + b.clone() - &r).norm() < 1e-9);
            assert_eq!(numerical_rank(&a, 1e-9), 1);
            assert_eq!(numerical_rank(&b, 1e-9), 1);
        }
    }

    #[test]
    fn orbit_element_json_has_expected_keys() {
        let qq = q(0.6);
        let el = OrbitElement::from_matrix(&build_cq(qq, 3).unwrap(), qq).unwrap();
        let v = el.to_json();
        for key in ["matrix", "x", "y", "phase", "theta", "u"] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
    }
}
