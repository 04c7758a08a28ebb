//! General C-numerical radius r_C(A) = sup_U |tr(C U*AU)| by Riemannian
//! ascent over the unitary group, range sampling, and the non-scalar /
//! nonzero-trace norm certificate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hs_norm, sample, trace, unit_phase, CMatrix, C64};
use crate::radius::{OptimizerConfig, RadiusEstimate};

fn require_same_square(a: &CMatrix, c: &CMatrix) -> Result<usize> {
    if !a.is_square() || !c.is_square() || a.nrows() != c.nrows() {
        return Err(Error::Dimension(format!(
            "A and C must be square of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    Ok(a.nrows())
}

fn objective(a: &CMatrix, c: &CMatrix, u: &CMatrix) -> f64 {
    let m = u.adjoint() * a * u;
    (c * m).trace().norm()
}

struct UnitaryRun {
    u: CMatrix,
    value: f64,
    grad_norm: f64,
    converged: bool,
}

/// Ascend Re(e^{−iφ} tr(C U*AU)) with φ the current phase of the trace.
/// Steps stay on the manifold: U ← U·exp(ηΩ) with Ω the skew-Hermitian
/// Riemannian gradient, the exponential computed by scaling-and-squaring.
fn ascend_unitary(a: &CMatrix, c: &CMatrix, u0: CMatrix, cfg: &OptimizerConfig) -> UnitaryRun {
    let mut u = u0;
    let mut fu = objective(a, c, &u);
    let mut step = 0.5;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let m = u.adjoint() * a * &u;
        let tau = (c * &m).trace();
        let phase = unit_phase(tau);
        // K = e^{-iφ}[C, M]; the Riemannian gradient is the skew part of K*.
        let k = (c * &m - &m * c) * phase.conj();
        let omega = (k.adjoint() - &k) * C64::from(0.5);
        grad_norm = omega.norm();
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        let mut eta = step;
        for _ in 0..40 {
            let cand = &u * (&omega * C64::from(eta)).exp();
            let fc = objective(a, c, &cand);
            if fc >= fu + 1e-4 * eta * grad_norm * grad_norm {
                u = cand;
                fu = fc;
                step = if eta >= step { eta * 1.8 } else { eta };
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < cfg.step_tol {
                break;
            }
        }
        if !accepted {
            converged = grad_norm <= cfg.grad_tol * 100.0;
            break;
        }
        step = step.max(cfg.step_tol * 10.0);
    }

    UnitaryRun {
        u,
        value: fu,
        grad_norm,
        converged,
    }
}

/// Best found |tr(C U*AU)| over unitaries, restart-parallel. Restart 0 starts
/// from the identity; the rest from seeded Haar unitaries.
pub fn c_radius(a: &CMatrix, c: &CMatrix, cfg: &OptimizerConfig) -> Result<RadiusEstimate> {
    let n = require_same_square(a, c)?;
    cfg.validate()?;

    let runs: Vec<UnitaryRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let u0 = if i == 0 {
                CMatrix::identity(n, n)
            } else {
                sample::unitary(n, cfg.seed ^ i as u64)
            };
            ascend_unitary(a, c, u0, cfg)
        })
        .collect();

    let any_converged = runs.iter().any(|r| r.converged);
    let best = runs
        .into_iter()
        .enumerate()
        .max_by(|(ia, x), (ib, y)| {
            x.value
                .partial_cmp(&y.value)
                .expect("finite")
                .then(ib.cmp(ia))
        })
        .map(|(_, r)| r)
        .expect("at least one restart");

    let witness_x = best.u.column(0).into_owned();
    Ok(RadiusEstimate {
        value: best.value,
        witness_x,
        witness_y: None,
        witness_unitary: Some(best.u),
        restarts_used: cfg.restarts,
        converged: any_converged,
        best_gradient_norm: best.grad_norm,
    })
}

/// Sampled points tr(C U_i* A U_i) of the C-numerical range W_C(A).
pub fn c_range_sample(
    a: &CMatrix,
    c: &CMatrix,
    count: usize,
    seed: u64,
) -> Result<Vec<C64>> {
    let n = require_same_square(a, c)?;
    if count < 1 {
        return Err(Error::Validation("count must be >= 1".into()));
    }
    let mut rng = sample::rng_for(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u = sample::unitary_with(&mut rng, n);
        let m = u.adjoint() * a * &u;
        out.push((c * m).trace());
    }
    Ok(out)
}

/// Whether r_C is a norm: true iff C is non-scalar and tr(C) ≠ 0.
#[derive(Debug, Clone, Copy)]
pub struct NormCertificate {
    pub is_norm: bool,
    pub is_scalar_c: bool,
    pub trace_c: C64,
}

/// Scalarity is decided relative to ‖C‖₂: C is scalar-like when
/// ‖C − (tr C/n)I‖₂ ≤ tol·max(1, ‖C‖₂).
pub fn norm_certificate(c: &CMatrix, tol: f64) -> Result<NormCertificate> {
    if !c.is_square() {
        return Err(Error::Dimension(format!(
            "C must be square, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    let n = c.nrows();
    let tr = trace(c)?;
    let mean = tr.unscale(n as f64);
    let centered = c - CMatrix::identity(n, n) * mean;
    let is_scalar_c = hs_norm(&centered) <= tol * hs_norm(c).max(1.0);
    let is_norm = !is_scalar_c && tr.norm() > tol;
    Ok(NormCertificate {
        is_norm,
        is_scalar_c,
        trace_c: tr,
    })
}
