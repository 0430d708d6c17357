//! Whitham modulation theory for the small-dispersion KdV equation:
//! the Hopf solution by characteristics, the phase shift `q(b1, b2, b3)`,
//! the Whitham characteristic speeds and their hodograph solution
//! `x = v_i t + w_i`, the kernel `theta(v; u)`, and the two edges of the
//! cusp-shaped oscillation zone.
//!
//! Conventions: Riemann invariants are ordered `b1 > b2 > b3`, all in
//! `(-1, 0)`. At the trailing edge `b1 = b2 = v`, `b3 = u`; at the leading
//! edge `b2 = b3 = v`, `b1 = u`.

mod edges;
mod hodograph;
mod hopf;
mod q_function;

pub use edges::{
    leading_edge, trailing2_residual, trailing3_lambda_form, trailing3_residual, trailing_edge,
    LeadingEdgePoint, TrailingEdgePoint,
};
pub use hodograph::{whitham_solve, whitham_velocities, WhithamVelocities};
pub use hopf::{hopf_solve, HopfBranch, HopfSolution};
pub use q_function::{q_eval, q_with_gradient, theta_at, theta_kernel, theta_vu};

use crate::initial_data::InitialDataError;
use crate::numerics::NumericsError;
use thiserror::Error;

/// Hodograph residuals below this bound qualify a state as accepted.
pub const HODOGRAPH_RESIDUAL_TOL: f64 = 1e-9;

/// Riemann-invariant gaps below this bound are numerically degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModulationError {
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("Riemann invariant gap below {DEGENERATE_GAP}; use the edge routines")]
    DegenerateGap,
    #[error("hodograph solve failed (point outside the cusp?): {0}")]
    OutsideCusp(String),
    #[error("t = {t} is not past the catastrophe time t_c = {t_c}")]
    NotPastCatastrophe { t: f64, t_c: f64 },
    #[error("edge system solve failed: {0}")]
    EdgeSolveFailed(String),
    #[error("d theta / dv = {0} is non-negative at the trailing edge")]
    NonNegativeDthetaDv(f64),
    #[error("edge continuation failed: {0}")]
    ContinuationFailed(String),
    #[error(transparent)]
    InitialData(#[from] InitialDataError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A solution of the hodograph equations at one `(x, t)` point.
#[derive(Debug, Clone, Copy)]
pub struct WhithamState {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub x: f64,
    pub t: f64,
    /// Residuals of the three hodograph equations at the state.
    pub residual: [f64; 3],
}

impl WhithamState {
    pub fn betas(&self) -> [f64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }

    /// Elliptic modulus `s` with `s^2 = (b2 - b3) / (b1 - b3)`.
    pub fn modulus(&self) -> f64 {
        ((self.beta2 - self.beta3) / (self.beta1 - self.beta3)).sqrt()
    }

    /// Ordering, range and residual checks for an accepted state.
    pub fn validate(&self) -> Result<(), ModulationError> {
        if !(self.beta1 > self.beta2 && self.beta2 > self.beta3) {
            return Err(ModulationError::Domain("need b1 > b2 > b3"));
        }
        if self.beta1 >= 0.0 || self.beta3 <= -1.0 {
            return Err(ModulationError::Domain("invariants must lie in (-1, 0)"));
        }
        let worst = self.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if !(worst <= HODOGRAPH_RESIDUAL_TOL) {
            return Err(ModulationError::OutsideCusp(format!(
                "residual {worst:.3e} exceeds {HODOGRAPH_RESIDUAL_TOL:.0e}"
            )));
        }
        Ok(())
    }
}
