//! Seeded random generators. Every function is deterministic in its seed and
//! safe to call concurrently (no shared state).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// What to sample; mirrors the CLI `sample --kind` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    UnitVector,
    Unitary,
    RankK,
    Dense,
}

impl SampleKind {
    pub fn parse(s: &str) -> Result<SampleKind> {
        match s {
            "unit_vector" => Ok(SampleKind::UnitVector),
            "unitary" => Ok(SampleKind::Unitary),
            "rank_k" => Ok(SampleKind::RankK),
            "dense" => Ok(SampleKind::Dense),
            other => Err(Error::Validation(format!(
                "unknown sample kind {other:?}; expected unit_vector|unitary|rank_k|dense"
            ))),
        }
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn dense_with(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Square matrix of iid complex Gaussian entries.
pub fn dense(n: usize, seed: u64) -> CMatrix {
    assert!(n >= 1);
    dense_with(&mut rng_for(seed), n, n)
}

pub(crate) fn unit_vector_with(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Haar-like random unit vector.
pub fn unit_vector(n: usize, seed: u64) -> CVector {
    assert!(n >= 1);
    unit_vector_with(&mut rng_for(seed), n)
}

pub(crate) fn unitary_with(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = dense_with(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix column phases so the triangular factor has positive diagonal; this
    // makes the distribution Haar and the output unique.
    for j in 0..n {
        let d = r[(j, j)];
        let s = if d.norm() > 1e-300 {
            d.unscale(d.norm())
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= s;
        }
    }
    q
}

/// Haar-distributed unitary.
pub fn unitary(n: usize, seed: u64) -> CMatrix {
    assert!(n >= 1);
    unitary_with(&mut rng_for(seed), n)
}

/// Random phase e^{iθ}.
pub fn phase(seed: u64) -> C64 {
    let mut rng = rng_for(seed);
    phase_with(&mut rng)
}

pub(crate) fn phase_with(rng: &mut ChaCha8Rng) -> C64 {
    let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    C64::from_polar(1.0, theta)
}

/// n×n matrix of numerical rank exactly k: Q₁ Σ Q₂ᴴ with orthonormal factors
/// and singular values in [1, 2).
pub fn rank_k(n: usize, k: usize, seed: u64) -> CMatrix {
    assert!(n >= 1 && k >= 1 && k <= n, "need 1 <= k <= n");
    let mut rng = rng_for(seed);
    let q1 = thin_orthonormal(&mut rng, n, k);
    let q2 = thin_orthonormal(&mut rng, n, k);
    let sigma = CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            C64::new(1.0 + rng.gen::<f64>(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q1 * sigma * q2.adjoint()
}

fn thin_orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> CMatrix {
    let g = dense_with(rng, n, k);
    g.qr().q()
}

/// Enum-dispatched sampler; vectors come back as n×1 matrices.
pub fn sample_matrix(kind: SampleKind, n: usize, seed: u64, k: Option<usize>) -> Result<CMatrix> {
    if n < 1 {
        return Err(Error::Validation("sample size must be at least 1".into()));
    }
    match kind {
        SampleKind::UnitVector => {
            let v = unit_vector(n, seed);
            Ok(CMatrix::from_column_slice(n, 1, v.as_slice()))
        }
        SampleKind::Unitary => Ok(unitary(n, seed)),
        SampleKind::Dense => Ok(dense(n, seed)),
        SampleKind::RankK => {
            let k = k.ok_or_else(|| Error::Validation("rank_k needs k".into()))?;
            if k < 1 || k > n {
                return Err(Error::Validation(format!("need 1 <= k <= n, got k={k}, n={n}")));
            }
            Ok(rank_k(n, k, seed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_distance, numerical_rank};

    #[test]
    fn unit_vector_is_normalized() {
        let v = unit_vector(5, 42);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(unitary(3, 7), unitary(3, 7));
        assert_eq!(dense(4, 9), dense(4, 9));
        assert_eq!(rank_k(5, 2, 3), rank_k(5, 2, 3));
        assert_ne!(dense(4, 9), dense(4, 10));
    }

    #[test]
    fn unitary_defect_is_tiny() {
        for seed in 0..8u64 {
            let u = unitary(4, seed);
            let defect = hs_distance(&(u.adjoint() * &u), &CMatrix::identity(4, 4));
            assert!(defect < 1e-10, "seed {seed}: defect {defect:.3e}");
        }
    }

    #[test]
    fn rank_k_has_requested_rank() {
        let m = rank_k(4, 2, 1);
        assert_eq!(numerical_rank(&m, 1e-9), 2);
        let m = rank_k(6, 6, 2);
        assert_eq!(numerical_rank(&m, 1e-9), 6);
    }
}
