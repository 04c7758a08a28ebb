//! Deterministic self-test battery: oracle cross-checks plus scaled-down
//! versions of the full verification suite. Reports render with fixed float
//! formatting so identical (seed, profile) runs are byte-identical.

use crate::linalg::{
    hs_norm, matrix_unit, sample, trace, trace_norm, CMatrix, C64, DaggerMode, QParameter,
};
use crate::orbit::{build_cq, canonicalize, decompose_rank_one, is_in_orbit, sample_rank_one_pair};
use crate::oracle::{brute_q_radius_2x2, GridSpec};
use crate::radius::{
    beta_constant, q_radius_direct, q_radius_reduced, OptimizerConfig,
};
use crate::cradius::{c_radius, norm_certificate};
use crate::dual::{dual_radius, DEFAULT_GAP_TOL};
use crate::error::Result;
use crate::isometry::{
    dagger_invariance_check, recover_parameters, verify_isometry, IsometryDescriptor,
};

/// How much work the battery does. `Quick` mirrors every check at desk scale;
/// `Full` uses the verification-suite trial counts and runs for minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub seed: u64,
    pub profile: Profile,
    pub lines: Vec<CheckLine>,
    pub all_pass: bool,
}

impl SelftestReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "selftest seed={} profile={}\n",
            self.seed,
            match self.profile {
                Profile::Quick => "quick",
                Profile::Full => "full",
            }
        ));
        for line in &self.lines {
            out.push_str(&format!(
                "[{}] {:<24} {}\n",
                if line.pass { "PASS" } else { "FAIL" },
                line.name,
                line.detail
            ));
        }
        out.push_str(&format!(
            "result: {}\n",
            if self.all_pass { "all checks passed" } else { "FAILURES PRESENT" }
        ));
        out
    }
}

struct Scale {
    q_grid: Vec<f64>,
    identity_dims: Vec<usize>,
    agreement_trials: usize,
    inequality_trials: usize,
    orbit_trials: usize,
    decompose_trials: usize,
    lipschitz_trials: usize,
    dual_2x2: usize,
    dual_3x3: usize,
    dual_orbit_members: usize,
    isometry_descriptors: usize,
    isometry_trials: usize,
    recover_descriptors: usize,
    dagger_trials: usize,
    span_samples: usize,
    brute_density: usize,
}

impl Scale {
    fn of(profile: Profile) -> Scale {
        match profile {
            Profile::Quick => Scale {
                q_grid: vec![0.1, 0.25, 0.5, 0.6, 0.9, 1.0],
                identity_dims: vec![2, 3, 4],
                agreement_trials: 8,
                inequality_trials: 60,
                orbit_trials: 60,
                decompose_trials: 15,
                lipschitz_trials: 200,
                dual_2x2: 5,
                dual_3x3: 2,
                dual_orbit_members: 10,
                isometry_descriptors: 8,
                isometry_trials: 3,
                recover_descriptors: 12,
                dagger_trials: 10,
                span_samples: 120,
                brute_density: 150,
            },
            Profile::Full => Scale {
                q_grid: vec![0.1, 0.25, 0.5, 0.6, 0.9, 1.0],
                identity_dims: (2..=8).collect(),
                agreement_trials: 200,
                inequality_trials: 1000,
                orbit_trials: 1000,
                decompose_trials: 100,
                lipschitz_trials: 1000,
                dual_2x2: 50,
                dual_3x3: 20,
                dual_orbit_members: 100,
                isometry_descriptors: 100,
                isometry_trials: 4,
                recover_descriptors: 100,
                dagger_trials: 200,
                span_samples: 200,
                brute_density: 400,
            },
        }
    }
}

pub fn run(seed: u64, profile: Profile) -> SelftestReport {
    let scale = Scale::of(profile);
    let mut lines = Vec::new();
    let mut push = |name: &'static str, result: Result<(bool, String)>| match result {
        Ok((pass, detail)) => lines.push(CheckLine { name, pass, detail }),
        Err(e) => lines.push(CheckLine {
            name,
            pass: false,
            detail: format!("error: {e}"),
        }),
    };

    push("identity-radius", identity_radius(&scale));
    push("jordan-cell-oracle", jordan_cell(&scale));
    push("method-agreement", method_agreement(&scale, seed));
    push("inequality-suite", inequality_suite(&scale, seed));
    push("orbit-characterization", orbit_characterization(&scale, seed));
    push("rank-one-decomposition", decomposition(&scale, seed));
    push("rank-k-lipschitz", lipschitz(&scale, seed));
    push("dual-two-sided", dual_two_sided(&scale, seed));
    push("isometry-suite", isometry_suite(&scale, seed));
    push("norm-certificate", certificate(&scale, seed));
    push("rank-two-span", span_bound(&scale, seed));

    let all_pass = lines.iter().all(|l| l.pass);
    SelftestReport {
        seed,
        profile,
        lines,
        all_pass,
    }
}

fn qp(v: f64) -> QParameter {
    QParameter::new(v).expect("grid values are valid")
}

fn identity_radius(scale: &Scale) -> Result<(bool, String)> {
    let cfg = OptimizerConfig::default();
    let mut worst: f64 = 0.0;
    for &n in &scale.identity_dims {
        for &qv in &scale.q_grid {
            let est = q_radius_reduced(&CMatrix::identity(n, n), qp(qv), &cfg)?;
            worst = worst.max((est.value - qv).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |r_q(I) - q| = {worst:.3e}")))
}

fn jordan_cell(scale: &Scale) -> Result<(bool, String)> {
    let cfg = OptimizerConfig::default();
    let e12 = matrix_unit(2, 0, 1);
    let grid = GridSpec::new(scale.brute_density)?;
    let mut worst: f64 = 0.0;
    let mut worst_brute: f64 = 0.0;
    for &qv in &scale.q_grid {
        let q = qp(qv);
        let expected = (1.0 + q.p()) / 2.0;
        let est = q_radius_reduced(&e12, q, &cfg)?;
        worst = worst.max((est.value - expected).abs());
        let brute = brute_q_radius_2x2(&e12, q, grid)?;
        let err = (brute.value - est.value).abs();
        if err > brute.grid_error_bound {
            worst_brute = worst_brute.max(err - brute.grid_error_bound);
        }
    }
    Ok((
        worst <= 1e-6 && worst_brute == 0.0,
        format!("max |r_q(E12) - (1+p)/2| = {worst:.3e}, oracle excess {worst_brute:.3e}"),
    ))
}

fn method_agreement(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for i in 0..scale.agreement_trials {
        let a = sample::dense(3, seed ^ (7000 + i as u64));
        for &qv in &[0.3, 0.7, 1.0] {
            let q = qp(qv);
            let cfg = OptimizerConfig::with_seed(seed ^ (100 + i as u64));
            let reduced = q_radius_reduced(&a, q, &cfg)?.value;
            let direct = q_radius_direct(&a, q, &cfg)?.value;
            let cq = build_cq(q, 3)?;
            let via_c = c_radius(&a, &cq, &cfg)?.value;
            let scale_v = reduced.max(1.0);
            worst = worst.max((reduced - direct).abs() / scale_v);
            worst = worst.max((reduced - via_c).abs() / scale_v);
        }
    }
    Ok((worst <= 1e-4, format!("max relative spread = {worst:.3e}")))
}

fn inequality_suite(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut violations = 0usize;
    let mut rng = sample::rng_for(seed ^ 0x1BAD);
    use rand::Rng;
    for i in 0..scale.inequality_trials {
        let n = 2 + (i % 4);
        let a = sample::dense(n, seed ^ (31_000 + i as u64));
        let qv = 0.05 + 0.95 * rng.gen::<f64>();
        let q = qp(qv);
        let cfg = OptimizerConfig::with_seed(seed ^ (400 + i as u64));
        let rep = crate::radius::check_equivalence(&a, q, &cfg)?;
        if !rep.all_hold {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("{violations} violations in {} trials", scale.inequality_trials),
    ))
}

fn orbit_characterization(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut member_failures = 0usize;
    let mut violator_passes = 0usize;
    let mut worst_residual: f64 = 0.0;
    let mut rng = sample::rng_for(seed ^ 0x0B17);
    use rand::Rng;
    for i in 0..scale.orbit_trials {
        let n = 2 + (i % 4);
        let qv = 0.1 + 0.9 * rng.gen::<f64>();
        let q = qp(qv);
        let u = sample::unitary(n, seed ^ (50_000 + i as u64));
        let lam = sample::phase(seed ^ (60_000 + i as u64));
        let member = u.adjoint() * build_cq(q, n)? * &u * lam;
        if !is_in_orbit(&member, q, 1e-8)?.in_orbit {
            member_failures += 1;
        }
        let canon = canonicalize(&member, q)?;
        worst_residual = worst_residual.max(canon.residual);

        // violators: wrong rank, wrong trace, wrong norm (one of each kind)
        let violator = match i % 3 {
            0 => {
                let mut m = CMatrix::zeros(n.max(3), n.max(3));
                m[(0, 0)] = C64::from(q.q());
                m[(1, 2)] = C64::from(q.p());
                m
            }
            1 => {
                let q_other = qp((qv * 0.5).max(0.02) + if qv < 0.5 { 0.45 } else { 0.0 });
                let u2 = sample::unitary(n, seed ^ (70_000 + i as u64));
                u2.adjoint() * build_cq(q_other, n)? * &u2
            }
            _ => member * C64::from(0.5),
        };
        if is_in_orbit(&violator, q, 1e-8)?.in_orbit {
            violator_passes += 1;
        }
    }
    Ok((
        member_failures == 0 && violator_passes == 0 && worst_residual <= 1e-8,
        format!(
            "{member_failures} member failures, {violator_passes} violator passes, worst canon residual {worst_residual:.3e}"
        ),
    ))
}

fn decomposition(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut rng = sample::rng_for(seed ^ 0xDEC0);
    use rand::Rng;
    let mut failures = 0usize;
    let mut worst_sum: f64 = 0.0;
    for i in 0..scale.decompose_trials {
        let n = 3 + (i % 3);
        let qv = 0.2 + 0.6 * rng.gen::<f64>();
        let q = qp(qv);
        let limit = (2.0 * q.q()).min(2.0 * q.p());
        let x = sample::unit_vector(n, seed ^ (80_000 + i as u64));
        let y = sample::unit_vector(n, seed ^ (90_000 + i as u64));
        let scale_to = limit * (0.1 + 0.8 * rng.gen::<f64>());
        let r = crate::linalg::outer(&x, &y) * C64::from(scale_to);
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        match decompose_rank_one(&r, q, t, 3) {
            Ok((a, b)) => {
                let sum_err = (a.matrix.clone() + b.matrix.clone() - &r).norm();
                worst_sum = worst_sum.max(sum_err);
                if !is_in_orbit(&a.matrix, q, 1e-6)?.in_orbit
                    || !is_in_orbit(&b.matrix, q, 1e-6)?.in_orbit
                    || sum_err > 1e-10
                {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Ok((
        failures == 0,
        format!("{failures} failures, worst sum residual {worst_sum:.3e}"),
    ))
}

fn lipschitz(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut violations = 0usize;
    for i in 0..scale.lipschitz_trials {
        let k = 1 + (i % 3);
        let n = (2 * k).max(2) + (i % 3);
        let n = n.min(8);
        let t = sample::rank_k(n, k.min(n), seed ^ (100_000 + i as u64));
        let s = sample::rank_k(n, k.min(n), seed ^ (200_000 + i as u64));
        let diff = &t - &s;
        let d1 = trace_norm(&diff);
        let d2 = hs_norm(&diff);
        let bound = (2.0 * k as f64).sqrt() * d2;
        if !(d2 <= d1 * (1.0 + 1e-10) && d1 <= bound * (1.0 + 1e-10)) {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("{violations} violations in {} trials", scale.lipschitz_trials),
    ))
}

fn dual_two_sided(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let q = qp(0.6);
    let mut open_gaps = 0usize;
    let mut worst_gap: f64 = 0.0;
    let mut sandwich_failures = 0usize;
    for (n, count) in [(2usize, scale.dual_2x2), (3usize, scale.dual_3x3)] {
        for i in 0..count {
            let t = sample::dense(n, seed ^ (300_000 + (n * 1000 + i) as u64));
            let cfg = OptimizerConfig::with_seed(seed ^ (1000 + i as u64));
            let est = dual_radius(&t, q, &cfg, DEFAULT_GAP_TOL)?;
            worst_gap = worst_gap.max(est.gap);
            if !est.converged {
                open_gaps += 1;
            }
            let tn = trace_norm(&t);
            if tn > est.upper * (1.0 + 1e-9)
                || est.lower > beta_constant(q) * tn * (1.0 + 1e-3)
            {
                sandwich_failures += 1;
            }
        }
    }
    let mut member_out_of_band = 0usize;
    for i in 0..scale.dual_orbit_members {
        let n = 2 + (i % 2);
        let u = sample::unitary(n, seed ^ (400_000 + i as u64));
        let x = u.adjoint() * build_cq(q, n)? * &u * sample::phase(seed ^ (500_000 + i as u64));
        let cfg = OptimizerConfig::with_seed(seed ^ (2000 + i as u64));
        let est = dual_radius(&x, q, &cfg, DEFAULT_GAP_TOL)?;
        if !(0.98..=1.02).contains(&est.upper) || !(0.98..=1.02).contains(&est.lower) {
            member_out_of_band += 1;
        }
    }
    Ok((
        open_gaps == 0 && sandwich_failures == 0 && member_out_of_band == 0,
        format!(
            "worst gap {worst_gap:.4}, {open_gaps} open, {sandwich_failures} sandwich failures, {member_out_of_band} members off the unit sphere"
        ),
    ))
}

fn isometry_suite(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let q = qp(0.6);
    let cfg = OptimizerConfig {
        restarts: 16,
        ..OptimizerConfig::default()
    };
    let mut verify_failures = 0usize;
    for i in 0..scale.isometry_descriptors {
        let mode = DaggerMode::ALL[i % 4];
        let n = 2 + (i % 2);
        let d = IsometryDescriptor::random(n, seed ^ (600_000 + i as u64), mode, true);
        let rep = verify_isometry(
            |a| d.apply(a).expect("sizes match"),
            n,
            q,
            scale.isometry_trials,
            seed ^ (3000 + i as u64),
            &cfg,
        )?;
        if !rep.pass {
            verify_failures += 1;
        }
    }
    let scaling_detected = !verify_isometry(
        |a| a * C64::from(2.0),
        2,
        q,
        scale.isometry_trials,
        seed ^ 4000,
        &cfg,
    )?
    .pass;

    let mut recover_failures = 0usize;
    for i in 0..scale.recover_descriptors {
        let mode = DaggerMode::ALL[i % 4];
        let n = 2 + (i % 3);
        let d = IsometryDescriptor::random(n, seed ^ (700_000 + i as u64), mode, true);
        match recover_parameters(|a| d.apply(a).expect("sizes match"), q, n) {
            Ok(rec) => {
                let mut worst = 0.0f64;
                for s in 0..5u64 {
                    let a = sample::dense(n, seed ^ (800_000 + 10 * i as u64 + s));
                    let lhs = d.apply(&a)?;
                    let rhs = rec.apply(&a)?;
                    worst = worst.max((&lhs - &rhs).norm() / hs_norm(&lhs).max(1.0));
                }
                if rec.mode() != mode || worst > 1e-8 {
                    recover_failures += 1;
                }
            }
            Err(_) => recover_failures += 1,
        }
    }

    let mut dagger_failures = 0usize;
    let mut worst_spread: f64 = 0.0;
    for i in 0..scale.dagger_trials {
        let n = 2 + (i % 3);
        let a = sample::dense(n, seed ^ (900_000 + i as u64));
        let rep = dagger_invariance_check(&a, qp(0.3), &cfg)?;
        worst_spread = worst_spread.max(rep.max_relative_spread);
        if !rep.pass {
            dagger_failures += 1;
        }
    }

    Ok((
        verify_failures == 0 && scaling_detected && recover_failures == 0 && dagger_failures == 0,
        format!(
            "{verify_failures} verify failures, scaling detected: {scaling_detected}, {recover_failures} recovery failures, worst dagger spread {worst_spread:.3e}"
        ),
    ))
}

fn certificate(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let mut ok = true;
    for &qv in &scale.q_grid {
        ok &= norm_certificate(&build_cq(qp(qv), 3)?, 1e-9)?.is_norm;
    }
    ok &= !norm_certificate(&(CMatrix::identity(3, 3) * C64::from(3.0)), 1e-9)?.is_norm;
    ok &= !norm_certificate(&matrix_unit(2, 0, 1), 1e-9)?.is_norm;

    // r_{λI}(A) = |λ| |tr A| and r_C(I) = |tr C|
    let cfg = OptimizerConfig::with_seed(seed);
    let a = sample::dense(3, seed ^ 0xCE47);
    let lam = C64::new(0.3, -1.2);
    let est = c_radius(&a, &(CMatrix::identity(3, 3) * lam), &cfg)?;
    let expected = (lam * trace(&a)?).norm();
    ok &= (est.value - expected).abs() <= 1e-8 * expected.max(1.0);
    let c = sample::dense(3, seed ^ 0xCE48);
    let est = c_radius(&CMatrix::identity(3, 3), &c, &cfg)?;
    ok &= (est.value - trace(&c)?.norm()).abs() <= 1e-8;

    Ok((ok, "certificate and scalar-C identities".into()))
}

fn span_bound(scale: &Scale, seed: u64) -> Result<(bool, String)> {
    let n = 4;
    let r = sample::rank_k(n, 2, seed ^ 0x59A7);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(scale.span_samples);
    for i in 0..scale.span_samples {
        let (a, _b) = sample_rank_one_pair(&r, seed ^ (110_000 + i as u64))?;
        let mut row = Vec::with_capacity(2 * n * n);
        for z in a.iter() {
            row.push(z.re);
            row.push(z.im);
        }
        rows.push(row);
    }
    let stack = CMatrix::from_fn(rows.len(), 2 * n * n, |i, j| C64::from(rows[i][j]));
    let sv = crate::linalg::singular_values(&stack);
    let ratio = if sv.len() > 7 { sv[7] / sv[0] } else { 0.0 };
    Ok((
        ratio <= 1e-6,
        format!("8th/1st singular value = {ratio:.3e}"),
    ))
}
