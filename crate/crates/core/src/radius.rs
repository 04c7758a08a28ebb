//! Classical and q-numerical radius computation.
//!
//! Two independent methods are provided:
//! - [`q_radius_reduced`] ascends the single-sphere objective
//!   q·|⟨Ax,x⟩| + p·‖Ax − ⟨Ax,x⟩x‖, obtained from the defining supremum by
//!   maximizing analytically over the second vector;
//! - [`q_radius_direct`] optimizes the raw parametrization (x, z, θ) with
//!   y = q·x + p·e^{iθ}·z jointly and numerically, with no analytic phase
//!   elimination.
//!
//! All reported radii are lower bounds of the true suprema; convergence
//! diagnostics say how trustworthy they are.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    inner, orthogonal_unit, sample, unit_phase, CMatrix, CVector, C64, QParameter,
};

/// Restart/iteration budget and tolerances for the ascent methods.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 500,
            step_tol: 1e-12,
            grad_tol: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..OptimizerConfig::default()
        }
    }

    /// Default budget for ascent over the unitary group, whose landscape is
    /// less benign than the sphere problem.
    pub fn unitary_default() -> Self {
        OptimizerConfig {
            restarts: 64,
            ..OptimizerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::Validation("restarts must be >= 1".into()));
        }
        if !(self.step_tol > 0.0) || !(self.grad_tol > 0.0) {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Optimization result: best value found plus the witnesses attaining it.
#[derive(Debug, Clone)]
pub struct RadiusEstimate {
    pub value: f64,
    pub witness_x: CVector,
    pub witness_y: Option<CVector>,
    pub witness_unitary: Option<CMatrix>,
    pub restarts_used: usize,
    pub converged: bool,
    pub best_gradient_norm: f64,
}

fn require_square(a: &CMatrix, name: &str) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "{name} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

// ---------------------------------------------------------------------------
// Reduced single-sphere method
// ---------------------------------------------------------------------------

/// Degeneracy floor below which |⟨Ax,x⟩| or ‖Ax − ⟨Ax,x⟩x‖ contributes a zero
/// subgradient instead of a division by ~0.
const DEGENERATE_EPS: f64 = 1e-14;

/// Objective q·|h| + p·‖w‖ with h = x*Ax, w = Ax − h·x, defined on all of ℂⁿ.
pub(crate) fn reduced_value(a: &CMatrix, q: QParameter, x: &CVector) -> f64 {
    let ax = a * x;
    let h = inner(&ax, x);
    let w = &ax - x * h;
    q.q() * h.norm() + q.p() * w.norm()
}

/// Euclidean gradient (2 ∂f/∂x̄) of [`reduced_value`], valid off the sphere so
/// it can be checked against finite differences.
pub(crate) fn reduced_gradient(a: &CMatrix, q: QParameter, x: &CVector) -> CVector {
    let ax = a * x;
    let ah_x = a.adjoint() * x;
    let h = inner(&ax, x);
    let w = &ax - x * h;

    let mut g = CVector::zeros(x.len());
    let habs = h.norm();
    if habs > DEGENERATE_EPS {
        g += (&ax * h.conj() + &ah_x * h) * C64::from(q.q() / habs);
    }
    let wnorm = w.norm();
    if wnorm > DEGENERATE_EPS {
        let xw = inner(&w, x); // x* w
        let wx = inner(x, &w); // w* x
        let ds = a.adjoint() * &w - &ah_x * xw - &w * h.conj() - &ax * wx;
        g += ds * C64::from(q.p() / wnorm);
    }
    g
}

struct SphereRun {
    x: CVector,
    value: f64,
    grad_norm: f64,
    converged: bool,
}

/// Projected gradient ascent on the unit sphere with normalization retraction
/// and backtracking line search.
fn ascend_sphere<F, G>(value: &F, gradient: &G, x0: CVector, cfg: &OptimizerConfig) -> SphereRun
where
    F: Fn(&CVector) -> f64,
    G: Fn(&CVector) -> CVector,
{
    let mut x = {
        let n = x0.norm();
        x0.unscale(n)
    };
    let mut fx = value(&x);
    let mut step = 1.0;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let g = gradient(&x);
        // tangent projection: d = g - Re(x* g)·x
        let radial = inner(&g, &x).re;
        let d = &g - &x * C64::from(radial);
        grad_norm = d.norm();
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        let mut eta = step;
        for _ in 0..40 {
            let cand = &x + &d * C64::from(eta);
            let cand = cand.unscale(cand.norm());
            let fc = value(&cand);
            if fc >= fx + 1e-4 * eta * grad_norm * grad_norm {
                x = cand;
                fx = fc;
                // widen the trust step after a first-try acceptance
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
            // no ascent direction at this resolution; treat as stationary
            converged = grad_norm <= cfg.grad_tol * 100.0;
            break;
        }
        step = step.max(cfg.step_tol * 10.0);
    }

    SphereRun {
        x,
        value: fx,
        grad_norm,
        converged,
    }
}

fn best_run(runs: Vec<SphereRun>) -> SphereRun {
    let any_converged = runs.iter().any(|r| r.converged);
    let mut best = runs
        .into_iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.value
                .partial_cmp(&b.value)
                .expect("objective values are finite")
                .then(ib.cmp(ia)) // ties go to the lower restart index
        })
        .map(|(_, r)| r)
        .expect("at least one restart");
    best.converged = any_converged;
    best
}

/// Witness pair for the reduced objective at x: y = q·x + p·e^{iθ}·z with z
/// the normalized orthogonal component of Ax and θ aligning both terms.
fn reduced_witness(a: &CMatrix, q: QParameter, x: &CVector) -> Option<CVector> {
    let n = x.len();
    let ax = a * x;
    let h = inner(&ax, x);
    let w = &ax - x * h;
    if q.is_classical() {
        return Some(x.clone());
    }
    if n < 2 {
        // no unit vector orthogonal to x exists; the pair constraint set is empty
        return None;
    }
    let z = if w.norm() > DEGENERATE_EPS {
        let nw = w.norm();
        w.unscale(nw)
    } else {
        orthogonal_unit(x)
    };
    let rot = unit_phase(h).conj();
    Some(x * C64::from(q.q()) + z * (C64::from(q.p()) * rot))
}

/// Best found value of the reduced objective
/// sup_{‖x‖=1} q·|⟨Ax,x⟩| + p·‖Ax − ⟨Ax,x⟩x‖ over seeded restarts.
pub fn q_radius_reduced(
    a: &CMatrix,
    q: QParameter,
    cfg: &OptimizerConfig,
) -> Result<RadiusEstimate> {
    let n = require_square(a, "A")?;
    cfg.validate()?;

    let runs: Vec<SphereRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let x0 = sample::unit_vector(n, cfg.seed ^ i as u64);
            ascend_sphere(
                &|x| reduced_value(a, q, x),
                &|x| reduced_gradient(a, q, x),
                x0,
                cfg,
            )
        })
        .collect();

    let best = best_run(runs);
    let witness_y = reduced_witness(a, q, &best.x);
    Ok(RadiusEstimate {
        value: best.value,
        witness_x: best.x,
        witness_y,
        witness_unitary: None,
        restarts_used: cfg.restarts,
        converged: best.converged,
        best_gradient_norm: best.grad_norm,
    })
}

/// Classical numerical radius sup_{‖x‖=1} |⟨Ax,x⟩|; the q = 1 case of the
/// reduced method.
pub fn numerical_radius(a: &CMatrix, cfg: &OptimizerConfig) -> Result<RadiusEstimate> {
    q_radius_reduced(a, QParameter::new(1.0).expect("1 is valid"), cfg)
}

// ---------------------------------------------------------------------------
// Direct joint method
// ---------------------------------------------------------------------------

/// Raw state (x_raw, v_raw, θ) ∈ ℂⁿ × ℂⁿ × ℝ flattened to 4n+1 reals.
/// x = x_raw/‖x_raw‖ and z is the normalized projection of v_raw orthogonal
/// to x, so both blocks are scale-invariant.
struct DirectState {
    data: Vec<f64>,
    n: usize,
}

impl DirectState {
    fn x(&self) -> CVector {
        CVector::from_fn(self.n, |i, _| C64::new(self.data[2 * i], self.data[2 * i + 1]))
    }

    fn v(&self) -> CVector {
        let off = 2 * self.n;
        CVector::from_fn(self.n, |i, _| {
            C64::new(self.data[off + 2 * i], self.data[off + 2 * i + 1])
        })
    }

    fn theta(&self) -> f64 {
        self.data[4 * self.n]
    }

    fn write_x(&mut self, x: &CVector) {
        for i in 0..self.n {
            self.data[2 * i] = x[i].re;
            self.data[2 * i + 1] = x[i].im;
        }
    }

    fn write_v(&mut self, v: &CVector) {
        let off = 2 * self.n;
        for i in 0..self.n {
            self.data[off + 2 * i] = v[i].re;
            self.data[off + 2 * i + 1] = v[i].im;
        }
    }
}

fn direct_pair(q: QParameter, s: &DirectState) -> Option<(CVector, CVector)> {
    let xr = s.x();
    let nx = xr.norm();
    if nx < 1e-12 {
        return None;
    }
    let x = xr.unscale(nx);
    let y = if q.is_classical() || s.n < 2 {
        x.clone() * C64::from(q.q())
    } else {
        let vr = s.v();
        let pv = &vr - &x * inner(&vr, &x);
        let z = if pv.norm() > 1e-12 {
            let npv = pv.norm();
            pv.unscale(npv)
        } else {
            orthogonal_unit(&x)
        };
        &x * C64::from(q.q()) + z * (C64::from(q.p()) * C64::from_polar(1.0, s.theta()))
    };
    Some((x, y))
}

fn direct_value(a: &CMatrix, q: QParameter, s: &DirectState) -> f64 {
    match direct_pair(q, s) {
        Some((x, y)) => inner(&(a * &x), &y).norm(),
        None => 0.0,
    }
}

/// Gradient noise floor of the central-difference scheme; requesting a
/// tighter grad_tol than this would spin without converging.
const FD_GRAD_FLOOR: f64 = 5e-7;
const FD_STEP: f64 = 1e-6;

fn direct_fd_gradient(a: &CMatrix, q: QParameter, s: &mut DirectState) -> Vec<f64> {
    let dim = s.data.len();
    let mut g = vec![0.0; dim];
    for i in 0..dim {
        let orig = s.data[i];
        s.data[i] = orig + FD_STEP;
        let fp = direct_value(a, q, s);
        s.data[i] = orig - FD_STEP;
        let fm = direct_value(a, q, s);
        s.data[i] = orig;
        g[i] = (fp - fm) / (2.0 * FD_STEP);
    }
    g
}

struct DirectRun {
    x: CVector,
    y: CVector,
    value: f64,
    grad_norm: f64,
    converged: bool,
}

fn direct_run(a: &CMatrix, q: QParameter, seed: u64, cfg: &OptimizerConfig) -> DirectRun {
    let n = a.nrows();
    let mut rng = sample::rng_for(seed);
    let x0 = sample::unit_vector_with(&mut rng, n);
    let v0 = sample::unit_vector_with(&mut rng, n);
    let theta0 = sample::phase_with(&mut rng).arg();

    let mut state = DirectState {
        data: vec![0.0; 4 * n + 1],
        n,
    };
    state.write_x(&x0);
    state.write_v(&v0);
    state.data[4 * n] = theta0;

    let grad_tol = cfg.grad_tol.max(FD_GRAD_FLOOR);
    let mut fx = direct_value(a, q, &state);
    let mut step = 0.5;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let g = direct_fd_gradient(a, q, &mut state);
        grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if grad_norm <= grad_tol {
            converged = true;
            break;
        }
        let mut accepted = false;
        let mut eta = step;
        for _ in 0..40 {
            let mut cand = DirectState {
                data: state
                    .data
                    .iter()
                    .zip(&g)
                    .map(|(s, gi)| s + eta * gi)
                    .collect(),
                n,
            };
            // renormalize the scale-invariant blocks to stop drift
            let cx = cand.x();
            if cx.norm() > 1e-12 {
                let nc = cx.norm();
                cand.write_x(&cx.unscale(nc));
            }
            let cv = cand.v();
            if cv.norm() > 1e-12 {
                let nv = cv.norm();
                cand.write_v(&cv.unscale(nv));
            }
            let fc = direct_value(a, q, &cand);
            if fc >= fx + 1e-4 * eta * grad_norm * grad_norm {
                state = cand;
                fx = fc;
                step = if eta >= step { eta * 1.5 } else { eta };
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < cfg.step_tol {
                break;
            }
        }
        if !accepted {
            converged = grad_norm <= grad_tol * 100.0;
            break;
        }
        step = step.max(1e-8);
    }

    let (x, y) = direct_pair(q, &state).expect("state was kept normalized");
    DirectRun {
        x,
        y,
        value: fx,
        grad_norm,
        converged,
    }
}

/// Best found |⟨Ax,y⟩| over the joint parametrization (x, z, θ) with
/// y = q·x + p·e^{iθ}·z, ascended with central-difference gradients.
/// Deliberately shares no calculus with [`q_radius_reduced`].
pub fn q_radius_direct(
    a: &CMatrix,
    q: QParameter,
    cfg: &OptimizerConfig,
) -> Result<RadiusEstimate> {
    let n = require_square(a, "A")?;
    cfg.validate()?;

    let runs: Vec<DirectRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| direct_run(a, q, cfg.seed ^ i as u64, cfg))
        .collect();

    let any_converged = runs.iter().any(|r| r.converged);
    let best = runs
        .into_iter()
        .enumerate()
        .max_by(|(ia, a1), (ib, b1)| {
            a1.value
                .partial_cmp(&b1.value)
                .expect("finite")
                .then(ib.cmp(ia))
        })
        .map(|(_, r)| r)
        .expect("at least one restart");

    let witness_y = if n >= 2 || q.is_classical() {
        Some(best.y)
    } else {
        None
    };
    Ok(RadiusEstimate {
        value: best.value,
        witness_x: best.x,
        witness_y,
        witness_unitary: None,
        restarts_used: cfg.restarts,
        converged: any_converged,
        best_gradient_norm: best.grad_norm,
    })
}

// ---------------------------------------------------------------------------
// Range sampling and equivalence constants
// ---------------------------------------------------------------------------

/// Sampled image points ⟨Ax, y⟩ of admissible pairs (unit x, y = qx + pe^{iθ}z).
pub fn q_range_sample(
    a: &CMatrix,
    q: QParameter,
    count: usize,
    seed: u64,
) -> Result<Vec<C64>> {
    let n = require_square(a, "A")?;
    if count < 1 {
        return Err(Error::Validation("count must be >= 1".into()));
    }
    let mut rng = sample::rng_for(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = sample::unit_vector_with(&mut rng, n);
        let y = if q.is_classical() || n < 2 {
            x.clone() * C64::from(q.q())
        } else {
            let v = sample::unit_vector_with(&mut rng, n);
            let pv = &v - &x * inner(&v, &x);
            let z = if pv.norm() > 1e-12 {
                let npv = pv.norm();
                pv.unscale(npv)
            } else {
                orthogonal_unit(&x)
            };
            &x * C64::from(q.q()) + z * (C64::from(q.p()) * sample::phase_with(&mut rng))
        };
        out.push(inner(&(a * &x), &y));
    }
    Ok(out)
}

/// Equivalence constant β(q) for r_q(A) ≤ ‖A‖ ≤ β·r_q(A):
/// max{1/p, 1/q} when p ≥ 1/2, √(5−4p)/q when 1/4 ≤ p < 1/2, else 2/q.
pub fn beta_constant(q: QParameter) -> f64 {
    let (qv, p) = (q.q(), q.p());
    if p >= 0.5 {
        (1.0 / p).max(1.0 / qv)
    } else if p >= 0.25 {
        (5.0 - 4.0 * p).sqrt() / qv
    } else {
        2.0 / qv
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn of(lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// The inequality chain relating r, r_q and the operator norm, with computed
/// radii treated as lower bounds (slack sits on the side that keeps the
/// checks sound).
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub r_classical: f64,
    pub r_q: f64,
    pub op_norm: f64,
    pub beta: f64,
    /// q·r(A) ≤ r_q(A) (+ float cushion; equality is attained, e.g. at A = I)
    pub q_lower: InequalityCheck,
    /// r_q(A) ≤ ‖A‖·(1 + 1e−6)
    pub rq_le_norm: InequalityCheck,
    /// ‖A‖ ≤ β(q)·r_q(A)·(1 + 1e−3)
    pub norm_le_beta_rq: InequalityCheck,
    /// r(A) ≤ ‖A‖·(1 + 1e−12)
    pub r_le_norm: InequalityCheck,
    /// ‖A‖ ≤ 2·r(A)·(1 + 1e−3)
    pub norm_le_two_r: InequalityCheck,
    pub all_hold: bool,
}

pub fn check_equivalence(
    a: &CMatrix,
    q: QParameter,
    cfg: &OptimizerConfig,
) -> Result<EquivalenceReport> {
    require_square(a, "A")?;
    let r = numerical_radius(a, cfg)?.value;
    let rq = q_radius_reduced(a, q, cfg)?.value;
    let op = crate::linalg::operator_norm(a);
    let beta = beta_constant(q);

    let q_lower = InequalityCheck::of(q.q() * r, rq + 1e-9 * rq.max(1.0));
    let rq_le_norm = InequalityCheck::of(rq, op * (1.0 + 1e-6));
    let norm_le_beta_rq = InequalityCheck::of(op, beta * rq * (1.0 + 1e-3));
    let r_le_norm = InequalityCheck::of(r, op * (1.0 + 1e-12));
    let norm_le_two_r = InequalityCheck::of(op, 2.0 * r * (1.0 + 1e-3));
    let all_hold = q_lower.holds
        && rq_le_norm.holds
        && norm_le_beta_rq.holds
        && r_le_norm.holds
        && norm_le_two_r.holds;

    Ok(EquivalenceReport {
        r_classical: r,
        r_q: rq,
        op_norm: op,
        beta,
        q_lower,
        rq_le_norm,
        norm_le_beta_rq,
        r_le_norm,
        norm_le_two_r,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_unit, CMatrix};
    use approx::assert_relative_eq;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    fn q(v: f64) -> QParameter {
        QParameter::new(v).unwrap()
    }

    #[test]
    fn classical_radius_of_identity() {
        let est = numerical_radius(&CMatrix::identity(3, 3), &cfg()).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-10);
        assert!(est.converged);
    }

    #[test]
    fn classical_radius_of_jordan_cell_is_half() {
        // 1-D brute force over |x1|: max |x1|·sqrt(1-|x1|^2) = 1/2
        let est = numerical_radius(&matrix_unit(2, 0, 1), &cfg()).unwrap();
        assert_relative_eq!(est.value, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn classical_radius_of_normal_matrix_is_spectral_radius() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = C64::new(2.0, 0.0);
        a[(1, 1)] = C64::new(-1.0, 0.0);
        let est = numerical_radius(&a, &cfg()).unwrap();
        assert_relative_eq!(est.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn q_radius_of_identity_is_q() {
        for qv in [0.1, 0.5, 0.9, 1.0] {
            let est = q_radius_reduced(&CMatrix::identity(4, 4), q(qv), &cfg()).unwrap();
            assert_relative_eq!(est.value, qv, epsilon = 1e-10);
        }
    }

    #[test]
    fn q_radius_of_scaled_identity_is_scaled_q() {
        let lam = C64::new(-1.3, 0.7);
        let a = CMatrix::identity(3, 3) * lam;
        let est = q_radius_reduced(&a, q(0.45), &cfg()).unwrap();
        assert_relative_eq!(est.value, 0.45 * lam.norm(), max_relative = 1e-9);
    }

    #[test]
    fn q_radius_of_jordan_cell_closed_form() {
        // sup of q·c·s + p·s² over c²+s²=1 equals (1+p)/2
        let est = q_radius_reduced(&matrix_unit(2, 0, 1), q(0.6), &cfg()).unwrap();
        assert_relative_eq!(est.value, 0.9, epsilon = 1e-9);
        let y = est.witness_y.as_ref().unwrap();
        assert!((inner(&est.witness_x, y) - C64::from(0.6)).norm() < 1e-10);
    }

    #[test]
    fn witness_reproduces_value() {
        let a = sample::dense(4, 21);
        let est = q_radius_reduced(&a, q(0.7), &cfg()).unwrap();
        let y = est.witness_y.as_ref().unwrap();
        let pairing = inner(&(&a * &est.witness_x), y).norm();
        assert_relative_eq!(pairing, est.value, epsilon = 1e-6);
        assert!((est.witness_x.norm() - 1.0).abs() < 1e-10);
        assert!((y.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn direct_method_on_identity() {
        let est = q_radius_direct(&CMatrix::identity(3, 3), q(0.35), &cfg()).unwrap();
        assert_relative_eq!(est.value, 0.35, epsilon = 1e-7);
    }

    #[test]
    fn direct_method_collapses_to_classical_at_q_one() {
        let a = sample::dense(3, 13);
        let direct = q_radius_direct(&a, q(1.0), &cfg()).unwrap();
        let classical = numerical_radius(&a, &cfg()).unwrap();
        assert!(
            (direct.value - classical.value).abs() <= 1e-6 * classical.value.max(1.0),
            "direct {} vs classical {}",
            direct.value,
            classical.value
        );
    }

    #[test]
    fn methods_agree_on_random_3x3() {
        let a = sample::dense(3, 99);
        let r1 = q_radius_reduced(&a, q(0.7), &cfg()).unwrap();
        let r2 = q_radius_direct(&a, q(0.7), &cfg()).unwrap();
        assert!(
            (r1.value - r2.value).abs() <= 1e-4 * r1.value.max(1.0),
            "reduced {} vs direct {}",
            r1.value,
            r2.value
        );
    }

    #[test]
    fn gradient_matches_central_differences() {
        let a = sample::dense(4, 5);
        let qq = q(0.6);
        for seed in 0..6u64 {
            let x = sample::unit_vector(4, 100 + seed);
            let g = reduced_gradient(&a, qq, &x);
            let h = 1e-6;
            for i in 0..4 {
                for (dir, expect) in [(C64::new(1.0, 0.0), g[i].re), (C64::i(), g[i].im)] {
                    let mut xp = x.clone();
                    xp[i] += dir * C64::from(h);
                    let mut xm = x.clone();
                    xm[i] -= dir * C64::from(h);
                    let fd =
                        (reduced_value(&a, qq, &xp) - reduced_value(&a, qq, &xm)) / (2.0 * h);
                    assert!(
                        (fd - expect).abs() <= 1e-5 * expect.abs().max(1.0),
                        "seed {seed} coord {i}: fd {fd} vs grad {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn range_samples_stay_inside_radius_disk() {
        let qq = q(0.6);
        let e12 = matrix_unit(2, 0, 1);
        let pts = q_range_sample(&e12, qq, 10_000, 3).unwrap();
        let max_mod = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_mod <= 0.9 + 1e-6, "max modulus {max_mod}");

        let pts = q_range_sample(&CMatrix::identity(3, 3), qq, 100, 4).unwrap();
        for z in pts {
            assert!((z - C64::from(0.6)).norm() < 1e-10);
        }
        let pts = q_range_sample(&CMatrix::zeros(3, 3), qq, 10, 5).unwrap();
        assert!(pts.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn beta_constant_cases() {
        // p = 0.8 >= 1/2
        assert_relative_eq!(beta_constant(q(0.6)), 1.0f64 / 0.6, max_relative = 1e-12);
        // q = 1 -> p = 0 -> otherwise branch
        assert_relative_eq!(beta_constant(q(1.0)), 2.0, epsilon = 1e-12);
        // p = 0.4 in [1/4, 1/2)
        let qv = (1.0f64 - 0.4 * 0.4).sqrt();
        assert_relative_eq!(
            beta_constant(q(qv)),
            (5.0f64 - 1.6).sqrt() / qv,
            max_relative = 1e-12
        );
        assert_relative_eq!(beta_constant(q(qv)), 2.011_87, max_relative = 1e-5);
    }

    #[test]
    fn equivalence_report_on_identity() {
        let rep = check_equivalence(&CMatrix::identity(4, 4), q(0.6), &cfg()).unwrap();
        assert!(rep.all_hold);
        assert_relative_eq!(rep.r_q, 0.6, epsilon = 1e-9);
        assert_relative_eq!(rep.q_lower.lhs, 0.6, epsilon = 1e-9);
    }

    #[test]
    fn equivalence_report_on_jordan_cell() {
        let rep = check_equivalence(&matrix_unit(2, 0, 1), q(0.6), &cfg()).unwrap();
        assert!(rep.all_hold);
        assert_relative_eq!(rep.r_q, 0.9, epsilon = 1e-8);
        assert_relative_eq!(rep.op_norm, 1.0, epsilon = 1e-12);
        assert!(rep.norm_le_beta_rq.rhs >= 1.5 - 1e-6);
    }

    #[test]
    fn homogeneity_and_subadditivity() {
        let qq = q(0.55);
        let a = sample::dense(3, 41);
        let b = sample::dense(3, 42);
        let alpha = C64::new(0.3, -1.1);
        let ra = q_radius_reduced(&a, qq, &cfg()).unwrap().value;
        let rsc = q_radius_reduced(&(&a * alpha), qq, &cfg()).unwrap().value;
        assert!((rsc - alpha.norm() * ra).abs() <= 1e-6 * rsc.max(1.0));

        let rb = q_radius_reduced(&b, qq, &cfg()).unwrap().value;
        let rab = q_radius_reduced(&(&a + &b), qq, &cfg()).unwrap().value;
        assert!(rab <= ra + rb + 1e-4, "{rab} > {ra} + {rb}");
    }

    #[test]
    fn restart_monotonicity() {
        let a = sample::dense(4, 77);
        let qq = q(0.4);
        let mut last = 0.0;
        for restarts in [1usize, 4, 16, 32] {
            let mut c = cfg();
            c.restarts = restarts;
            let v = q_radius_reduced(&a, qq, &c).unwrap().value;
            assert!(v + 1e-12 >= last, "restarts {restarts} decreased the value");
            last = v;
        }
    }
}
