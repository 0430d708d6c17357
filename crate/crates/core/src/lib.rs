//! Small-dispersion asymptotics for the Korteweg-de Vries equation
//! `u_t + 6 u u_x + eps^2 u_xxx = 0` with negative single-hump initial data.
//!
//! The crate has three layers:
//!
//! * low-level kernels: bracketed root finding, damped Newton, adaptive and
//!   Gauss-Chebyshev quadrature ([`numerics`]), complete elliptic integrals,
//!   Jacobi `dn`, the theta function and Hermite normalization constants
//!   ([`special`]);
//! * the modulation theory pipeline: initial-data models and catastrophe
//!   data ([`initial_data`]), Hopf characteristics, the hodograph solution
//!   of the Whitham system and the oscillation-zone edges ([`modulation`]),
//!   scattering phases, phase functions and the elliptic / soliton-train
//!   approximations ([`asymptotics`]);
//! * a direct Fourier pseudospectral KdV solver used as a numerical oracle
//!   ([`spectral`]).
//!
//! Everything is pure and thread-safe; no global state.

pub mod asymptotics;
pub mod initial_data;
pub mod modulation;
pub mod numerics;
pub mod special;
pub mod spectral;

pub use initial_data::{CatastrophePoint, InitialDataModel};
pub use numerics::{QuadratureKind, QuadratureRule, ToleranceConfig};
pub use special::EllipticPair;
