//! Numerical machinery around the q-numerical radius
//! r_q(A) = sup{|⟨Ax, y⟩| : ‖x‖ = ‖y‖ = 1, ⟨x, y⟩ = q} of complex matrices,
//! its C-numerical generalization r_C(A) = sup_U |tr(C U*AU)|, the saturated
//! unitary orbit of C_q = q·E₁₁ + √(1−q²)·E₁₂, the dual norm r_q*, and the
//! isometries A ↦ S₀ + μ·U*·A†·U of the radius.
//!
//! Optimizer outputs are always lower bounds with convergence diagnostics;
//! independent brute-force oracles at n = 2 live in [`oracle`].

pub mod cradius;
pub mod dual;
pub mod error;
pub mod isometry;
pub mod linalg;
pub mod oracle;
pub mod orbit;
pub mod radius;
pub mod selftest;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, DaggerMode, QParameter, SchattenOrder, C64};
pub use radius::{OptimizerConfig, RadiusEstimate};
