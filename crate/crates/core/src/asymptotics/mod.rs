//! Small-dispersion asymptotics assembled from the modulation data:
//! semiclassical scattering phases `rho` and `tau`, the phase functions
//! `phi` / `phi_hat` with their inequality certificates, the conformal
//! variable `zeta` and the pulse constant `gamma`, the elliptic (theta and
//! dn form) approximation inside the cusp, and the trailing-edge soliton
//! train expansion.

mod elliptic;
mod phase;
mod scattering;
mod soliton;

pub use elliptic::{dn_form_value, elliptic_approx, theta_form_value, EllipticApproxResult};
pub use phase::{
    check_phi_inequalities, phi_eval, zeta_eval, zeta_prime_v, InequalityReport, PhaseValues,
    PhiInequalityCheck,
};
pub use scattering::{rho_eval, tau_eval};
pub use soliton::{
    formal_trailing, formal_trailing_with_modulus, soliton_sum, soliton_sum_with_edge, x_of_y,
    xk_eval, y_of_x, SolitonSumResult,
};

use crate::modulation::ModulationError;
use crate::numerics::NumericsError;
use crate::special::SpecialError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("-2 phi_hat is negative at lambda = {0}; zeta leaves its real neighborhood")]
    NegativeRadicand(f64),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    InitialData(#[from] crate::initial_data::InitialDataError),
}
