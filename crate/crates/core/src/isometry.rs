//! Maps of the form φ(A) = S₀ + μ·U*·A†·U: construction, numerical
//! verification of the q-radius isometry property, and recovery of
//! (S₀, μ, U, †) from a black-box map.
//!
//! U is identifiable only up to a global phase (U*A†U is phase-invariant);
//! recovered unitaries are canonicalized by making the largest-modulus entry
//! real positive.

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::json::{c64_to_pair, pair_to_c64, MatrixJson};
use crate::linalg::{
    dagger, hs_norm, matrix_unit, sample, unit_phase, CMatrix, CVector, C64, DaggerMode,
    QParameter,
};
use crate::radius::{q_radius_reduced, OptimizerConfig, RadiusEstimate};

const UNITARITY_TOL: f64 = 1e-10;

/// The data (S₀, μ, U, †) realizing φ(A) = S₀ + μ·U*·A†·U.
#[derive(Debug, Clone)]
pub struct IsometryDescriptor {
    s0: CMatrix,
    mu: C64,
    u: CMatrix,
    mode: DaggerMode,
}

impl IsometryDescriptor {
    pub fn new(s0: CMatrix, mu: C64, u: CMatrix, mode: DaggerMode) -> Result<Self> {
        if !u.is_square() || !s0.is_square() || s0.nrows() != u.nrows() {
            return Err(Error::Dimension(
                "S0 and U must be square of equal size".into(),
            ));
        }
        let n = u.nrows();
        let defect = (u.adjoint() * &u - CMatrix::identity(n, n)).norm();
        if defect > UNITARITY_TOL {
            return Err(Error::Validation(format!(
                "U is not unitary (defect {defect:.3e})"
            )));
        }
        if (mu.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "mu must have unit modulus, got |mu| = {}",
                mu.norm()
            )));
        }
        Ok(IsometryDescriptor { s0, mu, u, mode })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn s0(&self) -> &CMatrix {
        &self.s0
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }

    pub fn mode(&self) -> DaggerMode {
        self.mode
    }

    /// S₀ + μ·U*·A†·U.
    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.dim(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(&self.s0 + self.u.adjoint() * dagger(a, self.mode) * &self.u * self.mu)
    }

    /// Seeded random descriptor; `with_translation` adds a dense S₀.
    pub fn random(n: usize, seed: u64, mode: DaggerMode, with_translation: bool) -> Self {
        let mut rng = sample::rng_for(seed);
        let u = sample::unitary_with(&mut rng, n);
        let mu = sample::phase_with(&mut rng);
        let s0 = if with_translation {
            sample::dense_with(&mut rng, n, n)
        } else {
            CMatrix::zeros(n, n)
        };
        IsometryDescriptor { s0, mu, u, mode }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "s0": MatrixJson::from_matrix(&self.s0),
            "mu": c64_to_pair(self.mu),
            "u": MatrixJson::from_matrix(&self.u),
            "mode": self.mode.label(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let parse_mat = |key: &str| -> Result<CMatrix> {
            let mj: MatrixJson = serde_json::from_value(
                v.get(key)
                    .ok_or_else(|| Error::Json(format!("missing key {key:?}")))?
                    .clone(),
            )
            .map_err(|e| Error::Json(e.to_string()))?;
            mj.to_matrix()
        };
        let s0 = parse_mat("s0")?;
        let u = parse_mat("u")?;
        let mu_pair: [f64; 2] = serde_json::from_value(
            v.get("mu")
                .ok_or_else(|| Error::Json("missing key \"mu\"".into()))?
                .clone(),
        )
        .map_err(|e| Error::Json(e.to_string()))?;
        let mu = pair_to_c64(mu_pair)?;
        let mode = DaggerMode::parse(
            v.get("mode")
                .and_then(|m| m.as_str())
                .ok_or_else(|| Error::Json("missing key \"mode\"".into()))?,
        )?;
        IsometryDescriptor::new(s0, mu, u, mode)
    }
}

/// One verification trial.
#[derive(Debug, Clone, Copy)]
pub struct IsometryTrial {
    pub r_in: f64,
    pub r_out: f64,
    pub defect: f64,
}

/// Result of sampling r_q(f(A)−f(B)) against r_q(A−B).
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub max_defect: f64,
    pub pass: bool,
    pub trials: Vec<IsometryTrial>,
    /// The offending pair at the worst defect.
    pub worst_pair: Option<(CMatrix, CMatrix)>,
}

const ISOMETRY_DEFECT_TOL: f64 = 1e-3;

/// Sample pairs (A, B) and compare r_q of images of differences against
/// r_q of differences. Passes when the max relative defect stays within 1e−3
/// (optimizer slack acts on both sides).
pub fn verify_isometry<F>(
    f: F,
    n: usize,
    q: QParameter,
    trials: usize,
    seed: u64,
    cfg: &OptimizerConfig,
) -> Result<IsometryReport>
where
    F: Fn(&CMatrix) -> CMatrix + Sync,
{
    if trials < 1 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    cfg.validate()?;

    let results: Vec<(IsometryTrial, CMatrix, CMatrix)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::rng_for(seed ^ (i as u64).wrapping_mul(0x9E37_79B9));
            let a = sample::dense_with(&mut rng, n, n);
            let b = sample::dense_with(&mut rng, n, n);
            let r_in = q_radius_reduced(&(&a - &b), q, cfg)?.value;
            let r_out = q_radius_reduced(&(f(&a) - f(&b)), q, cfg)?.value;
            let defect = (r_out - r_in).abs() / r_in.max(1e-12);
            Ok((IsometryTrial { r_in, r_out, defect }, a, b))
        })
        .collect::<Result<_>>()?;

    let mut max_defect = 0.0;
    let mut worst_pair = None;
    let mut trials_out = Vec::with_capacity(results.len());
    for (t, a, b) in results {
        if t.defect >= max_defect {
            max_defect = t.defect;
            worst_pair = Some((a, b));
        }
        trials_out.push(t);
    }
    Ok(IsometryReport {
        max_defect,
        pass: max_defect <= ISOMETRY_DEFECT_TOL,
        trials: trials_out,
        worst_pair,
    })
}

fn leading_unit_vector(m: &CMatrix) -> (CVector, f64) {
    let dec = crate::linalg::svd::svd(m);
    (dec.u.column(0).into_owned(), dec.singular_values[0])
}

/// Recover (S₀, μ, U, †) from a black-box map assumed to be of isometry form.
///
/// Probe budget: f(0), f(I), the n² matrix units, f(i·E₁₁), plus 20 seeded
/// validation inputs. Structure failures come back as
/// [`Error::NotIsometryForm`] with diagnostics.
pub fn recover_parameters<F>(f: F, q: QParameter, n: usize) -> Result<IsometryDescriptor>
where
    F: Fn(&CMatrix) -> CMatrix,
{
    let _ = q; // the recovered form does not depend on q; kept for the call contract
    if n < 2 {
        return Err(Error::Validation(
            "recovery needs dimension >= 2 to probe products".into(),
        ));
    }

    let s0 = f(&CMatrix::zeros(n, n));
    if s0.nrows() != n || s0.ncols() != n {
        return Err(Error::NotIsometryForm(format!(
            "map is not size-preserving: {}x{} from {n}x{n}",
            s0.nrows(),
            s0.ncols()
        )));
    }
    let psi = |a: &CMatrix| f(a) - &s0;

    // mu from ψ(I) = μ·I (every dagger mode fixes the identity)
    let psi_i = psi(&CMatrix::identity(n, n));
    let mu_raw = psi_i.trace().unscale(n as f64);
    if (&psi_i - CMatrix::identity(n, n) * mu_raw).norm() > 1e-6 {
        return Err(Error::NotIsometryForm(format!(
            "psi(I) is not scalar-like (defect {:.3e})",
            (&psi_i - CMatrix::identity(n, n) * mu_raw).norm()
        )));
    }
    if (mu_raw.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::NotIsometryForm(format!(
            "|mu| = {} is not 1; not a radius isometry",
            mu_raw.norm()
        )));
    }
    let mu = unit_phase(mu_raw);

    // linearity type from ψ(iE₁₁) vs ±i·ψ(E₁₁)
    let units: Vec<Vec<CMatrix>> = (0..n)
        .map(|i| (0..n).map(|j| psi(&matrix_unit(n, i, j))).collect())
        .collect();
    let psi_ie11 = psi(&(matrix_unit(n, 0, 0) * C64::i()));
    let lin_defect = (&psi_ie11 - &units[0][0] * C64::i()).norm();
    let antilin_defect = (&psi_ie11 + &units[0][0] * C64::i()).norm();
    let scale = hs_norm(&units[0][0]).max(1.0);
    let antilinear = match (
        lin_defect <= 1e-6 * scale,
        antilin_defect <= 1e-6 * scale,
    ) {
        (true, false) => false,
        (false, true) => true,
        _ => {
            return Err(Error::NotIsometryForm(format!(
                "ambiguous linearity: defects {lin_defect:.3e} (linear) vs {antilin_defect:.3e} (conjugate-linear)"
            )))
        }
    };

    // multiplicativity type from χ(E₁₂·E₂₂) = χ(E₁₂) vs the two product orders,
    // where χ = conj(mu)·ψ strips the phase
    let chi = |m: &CMatrix| m * mu.conj();
    let chi_e12 = chi(&units[0][1]);
    let chi_e22 = chi(&units[1][1]);
    let mult_defect = (&chi_e12 - &chi_e12 * &chi_e22).norm();
    let anti_defect = (&chi_e12 - &chi_e22 * &chi_e12).norm();
    let scale = hs_norm(&chi_e12).max(1.0);
    let antimultiplicative = match (mult_defect <= 1e-6 * scale, anti_defect <= 1e-6 * scale) {
        (true, false) => false,
        (false, true) => true,
        _ => {
            return Err(Error::NotIsometryForm(format!(
                "ambiguous multiplicativity: defects {mult_defect:.3e} (direct) vs {anti_defect:.3e} (reversed)"
            )))
        }
    };

    let mode = match (antilinear, antimultiplicative) {
        (false, false) => DaggerMode::Identity,
        (false, true) => DaggerMode::Transpose,
        (true, false) => DaggerMode::Conjugate,
        (true, true) => DaggerMode::Adjoint,
    };

    // columns of U* from the rank-one projections χ(E_jj) = (U*e_j)(U*e_j)*
    let mut cols: Vec<CVector> = Vec::with_capacity(n);
    for j in 0..n {
        let proj = chi(&units[j][j]);
        let (w, sigma) = leading_unit_vector(&proj);
        if (sigma - 1.0).abs() > 1e-6 || (&proj - &w * w.adjoint()).norm() > 1e-6 {
            return Err(Error::NotIsometryForm(format!(
                "chi(E_{j}{j}) is not a rank-one projection (sigma = {sigma})"
            )));
        }
        cols.push(w);
    }

    // align relative phases against χ(E₁ⱼ), which couples w₁ and w_j
    for j in 1..n {
        let m = chi(&units[0][j]);
        let c = if mode.is_antimultiplicative() {
            // χ(E₁ⱼ) = w_j w₁*
            (cols[j].adjoint() * &m * &cols[0])[(0, 0)]
        } else {
            // χ(E₁ⱼ) = w₁ w_j*
            (cols[0].adjoint() * &m * &cols[j])[(0, 0)].conj()
        };
        if c.norm() < 1e-3 {
            return Err(Error::NotIsometryForm(format!(
                "phase probe chi(E_1{j}) is degenerate (|c| = {:.3e})",
                c.norm()
            )));
        }
        let fix = unit_phase(c);
        cols[j] = &cols[j] * fix;
    }

    let u_adj = CMatrix::from_columns(&cols);
    let defect = (u_adj.adjoint() * &u_adj - CMatrix::identity(n, n)).norm();
    if defect > 1e-6 {
        return Err(Error::NotIsometryForm(format!(
            "recovered frame is not orthonormal (defect {defect:.3e})"
        )));
    }
    let mut u = u_adj.adjoint();

    // global phase: largest-modulus entry real positive (first in row-major order)
    let mut best = (0usize, 0usize, -1.0f64);
    for i in 0..n {
        for j in 0..n {
            let m = u[(i, j)].norm();
            if m > best.2 {
                best = (i, j, m);
            }
        }
    }
    let fix = unit_phase(u[(best.0, best.1)]).conj();
    u *= fix;

    let descriptor = IsometryDescriptor::new(s0, mu, u, mode)?;

    // final validation on seeded random inputs
    for i in 0..20u64 {
        let a = sample::dense(n, 0xC0FFEE ^ i);
        let expected = f(&a);
        let got = descriptor.apply(&a)?;
        let rel = (&got - &expected).norm() / hs_norm(&expected).max(1.0);
        if rel > 1e-8 {
            return Err(Error::NotIsometryForm(format!(
                "validation failed on probe {i}: relative residual {rel:.3e}"
            )));
        }
    }
    Ok(descriptor)
}

/// r_q values of A, Ā, Aᵗ, A* and their relative spread.
#[derive(Debug, Clone)]
pub struct DaggerInvarianceReport {
    /// Values in the order of [`DaggerMode::ALL`].
    pub values: [f64; 4],
    pub max_relative_spread: f64,
    pub pass: bool,
}

pub fn dagger_invariance_check(
    a: &CMatrix,
    q: QParameter,
    cfg: &OptimizerConfig,
) -> Result<DaggerInvarianceReport> {
    let estimates: Vec<RadiusEstimate> = DaggerMode::ALL
        .par_iter()
        .map(|&mode| q_radius_reduced(&dagger(a, mode), q, cfg))
        .collect::<Result<_>>()?;
    let values = [
        estimates[0].value,
        estimates[1].value,
        estimates[2].value,
        estimates[3].value,
    ];
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let spread = (max - min) / max.max(1e-12);
    Ok(DaggerInvarianceReport {
        values,
        max_relative_spread: spread,
        pass: spread <= 1e-4,
    })
}
