//! Slow, independent brute-force references at n = 2.
//!
//! These evaluate the defining suprema on exhaustive parameter grids and share
//! no code with the optimizer modules. They exist to ground expected values
//! and to cross-validate the ascent methods.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, QParameter};

/// Grid resolution: points per angular parameter.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub density: usize,
}

impl GridSpec {
    pub fn new(density: usize) -> Result<Self> {
        if density < 8 {
            return Err(Error::Validation(format!(
                "grid density must be at least 8, got {density}"
            )));
        }
        Ok(GridSpec { density })
    }
}

/// Brute-force value together with a conservative Lipschitz error bound.
#[derive(Debug, Clone, Copy)]
pub struct BruteResult {
    pub value: f64,
    /// L · Σ(half grid spacings) with L estimated from the input norms.
    pub grid_error_bound: f64,
}

fn require_2x2(m: &CMatrix, name: &str) -> Result<()> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::Dimension(format!(
            "{name} must be 2x2, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Exhaustive evaluation of sup |⟨Ax, y⟩| over unit x, y with ⟨x, y⟩ = q.
///
/// The sphere of ℂ² is swept as x = (cos a, sin a e^{iφ}) — the global phase
/// of x drops out of the objective — and y = q x + p e^{iθ} z with z the unit
/// vector orthogonal to x. All three angles are gridded; no maximization
/// identity is used.
pub fn brute_q_radius_2x2(a: &CMatrix, q: QParameter, grid: GridSpec) -> Result<BruteResult> {
    require_2x2(a, "A")?;
    let d = grid.density;
    let (qv, pv) = (q.q(), q.p());

    let h_a = std::f64::consts::FRAC_PI_2 / d as f64;
    let h_phi = std::f64::consts::TAU / d as f64;
    let h_theta = std::f64::consts::TAU / d as f64;

    let best = (0..=d)
        .into_par_iter()
        .map(|ia| {
            let alpha = ia as f64 * h_a;
            let (s, c) = alpha.sin_cos();
            let mut local: f64 = 0.0;
            for iphi in 0..d {
                let phi = iphi as f64 * h_phi;
                let x0 = C64::new(c, 0.0);
                let x1 = C64::from_polar(s, phi);
                // z = (-conj(x1), conj(x0)) is a unit vector orthogonal to x
                let z0 = -x1.conj();
                let z1 = x0.conj();
                let ax0 = a[(0, 0)] * x0 + a[(0, 1)] * x1;
                let ax1 = a[(1, 0)] * x0 + a[(1, 1)] * x1;
                // ⟨Ax, y⟩ = q (x*Ax) + p e^{-iθ} (z*Ax)
                let head = (x0.conj() * ax0 + x1.conj() * ax1) * C64::from(qv);
                let tail = (z0.conj() * ax0 + z1.conj() * ax1) * C64::from(pv);
                for itheta in 0..d {
                    let theta = itheta as f64 * h_theta;
                    let v = (head + tail * C64::from_polar(1.0, -theta)).norm();
                    if v > local {
                        local = v;
                    }
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max);

    let lipschitz = 4.0 * frob(a);
    Ok(BruteResult {
        value: best,
        grid_error_bound: lipschitz * 0.5 * (h_a + h_phi + h_theta),
    })
}

/// Exhaustive evaluation of sup |tr(C U*AU)| over U(2).
///
/// U(2) = e^{iδ}·SU(2) and the objective is independent of the global phase
/// δ, so SU(2) is swept with the Cayley-Klein angles:
/// U = [[cos a e^{iα}, sin a e^{iβ}], [−sin a e^{−iβ}, cos a e^{−iα}]].
pub fn brute_c_radius_2x2(a: &CMatrix, c: &CMatrix, grid: GridSpec) -> Result<BruteResult> {
    require_2x2(a, "A")?;
    require_2x2(c, "C")?;
    let d = grid.density;

    let h_a = std::f64::consts::FRAC_PI_2 / d as f64;
    let h_al = std::f64::consts::TAU / d as f64;
    let h_be = std::f64::consts::TAU / d as f64;

    let best = (0..=d)
        .into_par_iter()
        .map(|ia| {
            let ang = ia as f64 * h_a;
            let (s, co) = ang.sin_cos();
            let mut local: f64 = 0.0;
            for ial in 0..d {
                let alpha = ial as f64 * h_al;
                let ea = C64::from_polar(1.0, alpha);
                for ibe in 0..d {
                    let beta = ibe as f64 * h_be;
                    let eb = C64::from_polar(1.0, beta);
                    let u00 = ea * C64::from(co);
                    let u01 = eb * C64::from(s);
                    let u10 = -eb.conj() * C64::from(s);
                    let u11 = ea.conj() * C64::from(co);
                    // M = U* A U
                    let b00 = a[(0, 0)] * u00 + a[(0, 1)] * u10;
                    let b10 = a[(1, 0)] * u00 + a[(1, 1)] * u10;
                    let b01 = a[(0, 0)] * u01 + a[(0, 1)] * u11;
                    let b11 = a[(1, 0)] * u01 + a[(1, 1)] * u11;
                    let m00 = u00.conj() * b00 + u10.conj() * b10;
                    let m01 = u00.conj() * b01 + u10.conj() * b11;
                    let m10 = u01.conj() * b00 + u11.conj() * b10;
                    let m11 = u01.conj() * b01 + u11.conj() * b11;
                    // tr(C M)
                    let t = c[(0, 0)] * m00 + c[(0, 1)] * m10 + c[(1, 0)] * m01 + c[(1, 1)] * m11;
                    let v = t.norm();
                    if v > local {
                        local = v;
                    }
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max);

    let lipschitz = 4.0 * frob(a) * frob(c);
    Ok(BruteResult {
        value: best,
        grid_error_bound: lipschitz * 0.5 * (h_a + h_al + h_be),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_unit, sample, trace};

    fn grid(d: usize) -> GridSpec {
        GridSpec::new(d).unwrap()
    }

    #[test]
    fn density_floor_enforced() {
        assert!(GridSpec::new(7).is_err());
        assert!(GridSpec::new(8).is_ok());
    }

    #[test]
    fn identity_value_is_q() {
        let q = QParameter::new(0.6).unwrap();
        let r = brute_q_radius_2x2(&CMatrix::identity(2, 2), q, grid(200)).unwrap();
        assert!((r.value - 0.6).abs() < 0.005, "got {}", r.value);
    }

    #[test]
    fn jordan_cell_matches_closed_form() {
        let q = QParameter::new(0.6).unwrap();
        let e12 = matrix_unit(2, 0, 1);
        let r = brute_q_radius_2x2(&e12, q, grid(400)).unwrap();
        assert!((r.value - 0.9).abs() < 0.003, "got {}", r.value);
    }

    #[test]
    fn q_one_recovers_classical_radius_of_jordan_cell() {
        let q = QParameter::new(1.0).unwrap();
        let e12 = matrix_unit(2, 0, 1);
        let r = brute_q_radius_2x2(&e12, q, grid(400)).unwrap();
        assert!((r.value - 0.5).abs() < 0.003, "got {}", r.value);
    }

    #[test]
    fn scalar_c_gives_constant_objective() {
        let a = sample::dense(2, 3);
        let lam = C64::new(0.4, -0.6);
        let c = CMatrix::identity(2, 2) * lam;
        let r = brute_c_radius_2x2(&a, &c, grid(16)).unwrap();
        let expected = (lam * trace(&a).unwrap()).norm();
        assert!((r.value - expected).abs() < 1e-12);
    }

    #[test]
    fn classical_radius_of_jordan_cell_via_c_e11() {
        let e12 = matrix_unit(2, 0, 1);
        let e11 = matrix_unit(2, 0, 0);
        let r = brute_c_radius_2x2(&e12, &e11, grid(300)).unwrap();
        assert!((r.value - 0.5).abs() < 0.005, "got {}", r.value);
    }

    #[test]
    fn cq_objective_matches_q_objective() {
        let q = QParameter::new(0.6).unwrap();
        let cq = crate::orbit::build_cq(q, 2).unwrap();
        for seed in 0..5u64 {
            let a = sample::dense(2, seed);
            let rq = brute_q_radius_2x2(&a, q, grid(150)).unwrap();
            let rc = brute_c_radius_2x2(&a, &cq, grid(150)).unwrap();
            // both converge to the same supremum; allow combined grid slack
            assert!(
                (rq.value - rc.value).abs() < 0.02 * rq.value.max(1.0),
                "seed {seed}: {} vs {}",
                rq.value,
                rc.value
            );
        }
    }

    #[test]
    fn values_monotone_under_grid_doubling() {
        let q = QParameter::new(0.37).unwrap();
        let a = sample::dense(2, 8);
        let mut last = 0.0;
        for d in [50usize, 100, 200, 400] {
            let r = brute_q_radius_2x2(&a, q, grid(d)).unwrap();
            assert!(r.value + 1e-12 >= last, "density {d} broke monotonicity");
            last = r.value;
        }
    }
}
