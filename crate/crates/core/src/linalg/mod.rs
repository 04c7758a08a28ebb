//! Complex dense linear algebra substrate: norms, traces, rank, dagger maps,
//! orthonormal completion and seeded random generators.
//!
//! Conventions used across the crate:
//! - inner products are linear in the first argument: `inner(u, v) = vᴴ u`;
//! - `outer(x, y) = x ⊗ y* = x yᴴ`, so `trace(outer(x, y)) = inner(x, y)`;
//! - matrices are stored as [`nalgebra::DMatrix<Complex<f64>>`], wire format is row-major.

pub mod json;
pub mod sample;
pub mod svd;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Complex scalar, double precision per part.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;

/// Validated q ∈ (0, 1] together with the derived p = √(1 − q²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
    p: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q > 1.0 {
            return Err(Error::Validation(format!("q must lie in (0, 1], got {q}")));
        }
        let p = (1.0 - q * q).max(0.0).sqrt();
        Ok(Self { q, p })
    }

    pub fn q(self) -> f64 {
        self.q
    }

    pub fn p(self) -> f64 {
        self.p
    }

    /// q = 1 exactly; the q-radius then collapses to the classical numerical radius.
    pub fn is_classical(self) -> bool {
        self.p == 0.0
    }
}

/// The four symmetries appearing in the radius-isometry classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DaggerMode {
    Identity,
    Transpose,
    Adjoint,
    Conjugate,
}

impl DaggerMode {
    pub const ALL: [DaggerMode; 4] = [
        DaggerMode::Identity,
        DaggerMode::Transpose,
        DaggerMode::Adjoint,
        DaggerMode::Conjugate,
    ];

    /// Conjugate-linear modes (A ↦ A† flips i to −i).
    pub fn is_antilinear(self) -> bool {
        matches!(self, DaggerMode::Adjoint | DaggerMode::Conjugate)
    }

    /// Product-reversing modes ((AB)† = B†A†).
    pub fn is_antimultiplicative(self) -> bool {
        matches!(self, DaggerMode::Adjoint | DaggerMode::Transpose)
    }

    fn from_flags(antilinear: bool, antimultiplicative: bool) -> DaggerMode {
        match (antilinear, antimultiplicative) {
            (false, false) => DaggerMode::Identity,
            (false, true) => DaggerMode::Transpose,
            (true, false) => DaggerMode::Conjugate,
            (true, true) => DaggerMode::Adjoint,
        }
    }

    /// Mode of the composite map A ↦ (A^inner)^self. The four modes form a
    /// Klein four-group; both flags combine by xor.
    pub fn compose(self, inner: DaggerMode) -> DaggerMode {
        DaggerMode::from_flags(
            self.is_antilinear() ^ inner.is_antilinear(),
            self.is_antimultiplicative() ^ inner.is_antimultiplicative(),
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            DaggerMode::Identity => "identity",
            DaggerMode::Transpose => "transpose",
            DaggerMode::Adjoint => "adjoint",
            DaggerMode::Conjugate => "conjugate",
        }
    }

    pub fn parse(s: &str) -> Result<DaggerMode> {
        match s {
            "identity" => Ok(DaggerMode::Identity),
            "transpose" => Ok(DaggerMode::Transpose),
            "adjoint" => Ok(DaggerMode::Adjoint),
            "conjugate" => Ok(DaggerMode::Conjugate),
            other => Err(Error::Validation(format!(
                "unknown dagger mode {other:?}; expected identity|transpose|adjoint|conjugate"
            ))),
        }
    }
}

impl std::fmt::Display for DaggerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Schatten norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenOrder {
    /// Sum of singular values (trace / nuclear norm).
    Trace,
    /// ℓ₂ of singular values (Frobenius norm).
    HilbertSchmidt,
    /// Largest singular value (spectral norm).
    Operator,
}

impl SchattenOrder {
    pub fn parse(s: &str) -> Result<SchattenOrder> {
        match s {
            "trace" => Ok(SchattenOrder::Trace),
            "hilbert_schmidt" => Ok(SchattenOrder::HilbertSchmidt),
            "operator" => Ok(SchattenOrder::Operator),
            other => Err(Error::Validation(format!(
                "unknown Schatten order {other:?}; expected trace|hilbert_schmidt|operator"
            ))),
        }
    }
}

/// ⟨u, v⟩ = vᴴ u.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    v.dotc(u)
}

/// x ⊗ y* = x yᴴ.
pub fn outer(x: &CVector, y: &CVector) -> CMatrix {
    x * y.adjoint()
}

/// Standard basis vector e_i (0-based).
pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut e = CVector::zeros(n);
    e[i] = C64::new(1.0, 0.0);
    e
}

/// Matrix unit E_{ij} (0-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Sum of diagonal entries. Errors on non-square input.
pub fn trace(a: &CMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "trace requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.trace())
}

/// Singular values in non-increasing order (one-sided Jacobi).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd::svd(a).singular_values
}

/// Schatten norm computed from the singular values.
pub fn schatten_norm(a: &CMatrix, order: SchattenOrder) -> f64 {
    let sv = singular_values(a);
    match order {
        SchattenOrder::Trace => sv.iter().sum(),
        SchattenOrder::HilbertSchmidt => sv.iter().map(|s| s * s).sum::<f64>().sqrt(),
        SchattenOrder::Operator => sv.first().copied().unwrap_or(0.0),
    }
}

pub fn trace_norm(a: &CMatrix) -> f64 {
    schatten_norm(a, SchattenOrder::Trace)
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    schatten_norm(a, SchattenOrder::HilbertSchmidt)
}

pub fn operator_norm(a: &CMatrix) -> f64 {
    schatten_norm(a, SchattenOrder::Operator)
}

/// Count of singular values above `tol · σ_max`; the zero matrix has rank 0.
///
/// `tol` must be positive.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Apply one of the four dagger symmetries entrywise.
pub fn dagger(a: &CMatrix, mode: DaggerMode) -> CMatrix {
    match mode {
        DaggerMode::Identity => a.clone(),
        DaggerMode::Transpose => a.transpose(),
        DaggerMode::Adjoint => a.adjoint(),
        DaggerMode::Conjugate => a.map(|z| z.conj()),
    }
}

/// Orthonormality defect of a frame: max |⟨v_i, v_j⟩ − δ_ij|.
pub fn gram_defect(vectors: &[CVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let g = inner(vi, vj);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

const GRAM_TOL: f64 = 1e-8;

/// Complete k orthonormal n-vectors to a unitary U with U e_i = v_i for i < k.
///
/// Remaining columns are chosen deterministically: at each step the standard
/// basis vector with the largest residual after orthogonalization (two
/// Gram-Schmidt passes) is appended. The unitarity defect of the output is
/// bounded by the Gram defect of the input frame.
pub fn extend_to_unitary(vectors: &[CVector]) -> Result<CMatrix> {
    if vectors.is_empty() {
        return Err(Error::Validation(
            "extend_to_unitary needs at least one vector".into(),
        ));
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension(
            "extend_to_unitary: input vectors have mixed lengths".into(),
        ));
    }
    if vectors.len() > n {
        return Err(Error::Dimension(format!(
            "extend_to_unitary: {} vectors exceed dimension {n}",
            vectors.len()
        )));
    }
    let defect = gram_defect(vectors);
    if defect > GRAM_TOL {
        return Err(Error::Validation(format!(
            "extend_to_unitary: input frame is not orthonormal (worst Gram defect {defect:.3e})"
        )));
    }

    let mut cols: Vec<CVector> = vectors.to_vec();
    while cols.len() < n {
        let mut best: Option<(f64, CVector)> = None;
        for c in 0..n {
            let mut r = basis_vector(n, c);
            for _pass in 0..2 {
                for col in &cols {
                    let coeff = inner(&r, col);
                    r -= col * coeff;
                }
            }
            let nr = r.norm();
            if best.as_ref().map_or(true, |(bn, _)| nr > *bn) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.expect("n > 0");
        debug_assert!(nr > 1e-6, "orthonormal completion lost rank");
        cols.push(r.unscale(nr));
    }
    Ok(CMatrix::from_columns(&cols))
}

/// A deterministic unit vector orthogonal to x (requires n ≥ 2).
pub fn orthogonal_unit(x: &CVector) -> CVector {
    let n = x.len();
    assert!(n >= 2, "no orthogonal direction in dimension < 2");
    let mut best: Option<(f64, CVector)> = None;
    for c in 0..n {
        let mut r = basis_vector(n, c);
        let coeff = inner(&r, x);
        r -= x * coeff;
        let nr = r.norm();
        if best.as_ref().map_or(true, |(bn, _)| nr > *bn) {
            best = Some((nr, r));
        }
    }
    let (nr, r) = best.expect("n >= 2");
    r.unscale(nr)
}

/// z/|z|, or 1 for z ≈ 0.
pub fn unit_phase(z: C64) -> C64 {
    let m = z.norm();
    if m < 1e-300 {
        C64::new(1.0, 0.0)
    } else {
        z.unscale(m)
    }
}

/// Frobenius distance ‖a − b‖₂.
pub fn hs_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample;
    use approx::assert_relative_eq;

    #[test]
    fn trace_of_identity_and_matrix_unit() {
        let i3 = CMatrix::identity(3, 3);
        assert_relative_eq!(trace(&i3).unwrap().re, 3.0, epsilon = 1e-14);
        let e12 = matrix_unit(2, 0, 1);
        assert_eq!(trace(&e12).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn trace_rejects_rectangular() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(trace(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn schatten_norms_of_diag_pm_one() {
        // diag(1, -1): trace norm 2, HS norm sqrt(2), operator norm 1
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(-1.0, 0.0);
        assert_relative_eq!(schatten_norm(&m, SchattenOrder::Trace), 2.0, epsilon = 1e-12);
        assert_relative_eq!(
            schatten_norm(&m, SchattenOrder::HilbertSchmidt),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(schatten_norm(&m, SchattenOrder::Operator), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schatten_norm_of_zero() {
        let z = CMatrix::zeros(4, 4);
        for order in [
            SchattenOrder::Trace,
            SchattenOrder::HilbertSchmidt,
            SchattenOrder::Operator,
        ] {
            assert_eq!(schatten_norm(&z, order), 0.0);
        }
    }

    #[test]
    fn rank_of_dyad_identity_and_perturbed() {
        let x = sample::unit_vector(4, 11);
        let y = sample::unit_vector(4, 12);
        assert_eq!(numerical_rank(&outer(&x, &y), 1e-9), 1);
        assert_eq!(numerical_rank(&CMatrix::identity(4, 4), 1e-9), 4);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 3), 1e-9), 0);

        // rank-one plus an HS-norm 1e-13 perturbation stays numerically rank one
        let cq = crate::orbit::build_cq(QParameter::new(0.6).unwrap(), 3).unwrap();
        let noise = sample::dense(3, 5);
        let noise = &noise * C64::from(1e-13 / noise.norm());
        assert_eq!(numerical_rank(&(&cq + &noise), 1e-9), 1);
    }

    #[test]
    fn dagger_modes_match_direct_formulas() {
        let e12 = matrix_unit(2, 0, 1);
        assert_eq!(dagger(&e12, DaggerMode::Transpose), matrix_unit(2, 1, 0));
        let ie11 = matrix_unit(2, 0, 0) * C64::i();
        assert_eq!(
            dagger(&ie11, DaggerMode::Conjugate),
            matrix_unit(2, 0, 0) * (-C64::i())
        );
        let a = sample::dense(4, 3);
        let adj = dagger(&dagger(&a, DaggerMode::Transpose), DaggerMode::Conjugate);
        assert!(hs_distance(&adj, &dagger(&a, DaggerMode::Adjoint)) < 1e-15);
    }

    #[test]
    fn dagger_is_involution_and_norm_preserving() {
        let a = sample::dense(5, 77);
        for mode in DaggerMode::ALL {
            let twice = dagger(&dagger(&a, mode), mode);
            assert!(hs_distance(&twice, &a) < 1e-14);
            for order in [
                SchattenOrder::Trace,
                SchattenOrder::HilbertSchmidt,
                SchattenOrder::Operator,
            ] {
                assert_relative_eq!(
                    schatten_norm(&dagger(&a, mode), order),
                    schatten_norm(&a, order),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn dagger_mode_composition_table() {
        use DaggerMode::*;
        assert_eq!(Transpose.compose(Transpose), Identity);
        assert_eq!(Transpose.compose(Adjoint), Conjugate);
        assert_eq!(Adjoint.compose(Conjugate), Transpose);
        assert_eq!(Identity.compose(Adjoint), Adjoint);
        // exhaustive involution check
        for m in DaggerMode::ALL {
            assert_eq!(m.compose(m), Identity);
        }
    }

    #[test]
    fn extend_to_unitary_from_basis_vector() {
        let u = extend_to_unitary(&[basis_vector(4, 0)]).unwrap();
        let defect = hs_distance(&(u.adjoint() * &u), &CMatrix::identity(4, 4));
        assert!(defect < 1e-12);
        assert!((u.column(0).into_owned() - basis_vector(4, 0)).norm() < 1e-12);
    }

    #[test]
    fn extend_to_unitary_from_random_unit() {
        let x = sample::unit_vector(5, 9);
        let u = extend_to_unitary(&[x.clone()]).unwrap();
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-12);
        // U e1 = x by direct multiplication
        assert!((&u * basis_vector(5, 0) - &x).norm() < 1e-12);
    }

    #[test]
    fn extend_to_unitary_rejects_repeated_vector() {
        let e1 = basis_vector(3, 0);
        let err = extend_to_unitary(&[e1.clone(), e1]).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("Gram defect")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pairing_bound_trace_vs_norms() {
        // |tr(C T)| <= ||C||_1 ||T||_op
        for seed in 0..20u64 {
            let c = sample::dense(4, seed);
            let t = sample::dense(4, seed + 1000);
            let lhs = trace(&(&c * &t)).unwrap().norm();
            let rhs = trace_norm(&c) * operator_norm(&t);
            assert!(lhs <= rhs * (1.0 + 1e-10), "seed {seed}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn qparameter_validation() {
        assert!(QParameter::new(0.0).is_err());
        assert!(QParameter::new(1.0000001).is_err());
        assert!(QParameter::new(f64::NAN).is_err());
        let q = QParameter::new(0.6).unwrap();
        assert_relative_eq!(q.p(), 0.8, epsilon = 1e-12);
        assert!((q.q() * q.q() + q.p() * q.p() - 1.0).abs() < 1e-12);
        assert!(QParameter::new(1.0).unwrap().is_classical());
    }
}
