//! Shared numerical kernels: bracketed root finding, damped Newton for small
//! systems, adaptive Gauss-Kronrod quadrature, Gauss-type rules for
//! inverse-square-root endpoint weights, and Richardson-extrapolated
//! differentiation.
//!
//! All routines are pure functions of their inputs and safe to call from any
//! number of threads.

mod brent;
mod newton;
mod quad;
mod richardson;
mod sqrt_rules;

pub use brent::find_root_bracketed;
pub use newton::newton_system;
pub use quad::quad_adaptive;
pub use richardson::{derivative_richardson, DerivativeEstimate};
pub(crate) use sqrt_rules::{gauss_legendre_table, quad_sqrt_converged};
pub use sqrt_rules::{gauss_legendre_nodes, quad_sqrt_singular};

use thiserror::Error;

/// Convergence controls shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute tolerance on residuals / bracket widths.
    pub abs_tol: f64,
    /// Relative tolerance.
    pub rel_tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    /// Validates positivity of the tolerances and `max_iter >= 1`.
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(NumericsError::InvalidTolerance(
                "tolerances must be strictly positive",
            ));
        }
        if self.max_iter < 1 {
            return Err(NumericsError::InvalidTolerance("max_iter must be >= 1"));
        }
        Ok(())
    }
}

/// Weight classes handled by [`quad_sqrt_singular`], plus the adaptive kind
/// used to tag rules that carry no endpoint weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// No built-in weight; integrand handled by adaptive subdivision.
    Adaptive,
    /// Weight `1/sqrt(x - a)` (singularity at the left endpoint).
    ChebyshevSqrtLeft,
    /// Weight `1/sqrt(b - x)` (singularity at the right endpoint).
    ChebyshevSqrtRight,
    /// Weight `1/sqrt((x - a)(b - x))` (both endpoints).
    ChebyshevBoth,
}

/// A quadrature rule: a weight class and a node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: usize,
}

impl QuadratureRule {
    pub fn new(kind: QuadratureKind, nodes: usize) -> Result<Self, NumericsError> {
        if nodes < 2 {
            return Err(NumericsError::InvalidRule("node count must be >= 2"));
        }
        Ok(Self { kind, nodes })
    }
}

/// Default initial node count for the Chebyshev-type rules; doubled until two
/// successive results agree to the relative tolerance.
pub const CHEBYSHEV_DEFAULT_NODES: usize = 200;
/// Cap on node doubling.
pub const CHEBYSHEV_MAX_NODES: usize = 3200;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("f(a) and f(b) have the same sign; no bracketed root")]
    NoSignChange,
    #[error("iteration limit exceeded ({0} iterations)")]
    MaxIterExceeded(usize),
    #[error("Jacobian is singular to working precision")]
    SingularJacobian,
    #[error("adaptive quadrature did not converge (max depth {0})")]
    NonConvergent(usize),
    #[error("invalid quadrature rule: {0}")]
    InvalidRule(&'static str),
    #[error("finite differences dominated by rounding noise")]
    NoiseDominated,
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(&'static str),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig {
            max_iter: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rule_rejects_tiny_node_count() {
        assert!(QuadratureRule::new(QuadratureKind::ChebyshevBoth, 1).is_err());
        assert!(QuadratureRule::new(QuadratureKind::ChebyshevBoth, 2).is_ok());
    }

    proptest! {
        // Root finding is deterministic: same inputs, same output bits.
        #[test]
        fn brent_is_deterministic(c in 0.1f64..3.9) {
            let f = |x: f64| x * x - c;
            let cfg = ToleranceConfig::default();
            let a = find_root_bracketed(&f, 0.0, 2.0, &cfg).unwrap();
            let b = find_root_bracketed(&f, 0.0, 2.0, &cfg).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
