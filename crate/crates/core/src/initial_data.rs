//! Initial-data profiles: real analytic, negative, single-hump functions
//! `u0` normalized to `u0(x_M) = -1`, together with their derivatives, the
//! monotone inverse branches `f_L` (decreasing part) and `f_R` (increasing
//! part), and the gradient-catastrophe data of the Hopf flow
//! `t_c = 1 / max(-6 u0'(xi))`.

use crate::numerics::{find_root_bracketed, NumericsError, ToleranceConfig};
use std::sync::Arc;
use thiserror::Error;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum InitialDataError {
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("profile violates the single-hump assumptions: {0}")]
    InvalidProfile(String),
    #[error("gradient catastrophe is not generic: |f_L'''(u_c)| = {0:.3e}")]
    NonGeneric(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A single-hump profile with analytic derivatives.
///
/// Immutable after construction; all evaluation methods are pure.
#[derive(Clone)]
pub struct InitialDataModel {
    u0: ScalarFn,
    u0_prime: ScalarFn,
    u0_second: ScalarFn,
    u0_third: ScalarFn,
    x_min: f64,
    decay_exponent: f64,
    /// Optional closed-form inverse of the decreasing branch.
    inverse_left: Option<ScalarFn>,
    /// Optional closed-form inverse of the increasing branch.
    inverse_right: Option<ScalarFn>,
}

impl std::fmt::Debug for InitialDataModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialDataModel")
            .field("x_min", &self.x_min)
            .field("decay_exponent", &self.decay_exponent)
            .field("analytic_inverse", &self.inverse_left.is_some())
            .finish()
    }
}

/// Gradient-catastrophe data of the Hopf flow for a given profile.
#[derive(Debug, Clone, Copy)]
pub struct CatastrophePoint {
    /// Breaking time `1 / max(-6 u0')`.
    pub t_c: f64,
    /// Characteristic foot realizing the maximum.
    pub xi_c: f64,
    /// Critical value `u0(xi_c)`.
    pub u_c: f64,
    /// Breaking location `xi_c + 6 u_c t_c`.
    pub x_c: f64,
    /// Third derivative of the inverse branch at `u_c` (genericity witness).
    pub fl_third_at_uc: f64,
    /// True when `|f_L'''(u_c)|` is safely away from zero.
    pub generic: bool,
}

impl InitialDataModel {
    /// Builds a model from a profile and its first three derivatives.
    ///
    /// Validates the hump normalization at `x_min` and strict monotonicity
    /// on both branches by sampling.
    pub fn new(
        u0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u0_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u0_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u0_third: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_min: f64,
        decay_exponent: f64,
    ) -> Result<Self, InitialDataError> {
        let model = Self {
            u0: Arc::new(u0),
            u0_prime: Arc::new(u0_prime),
            u0_second: Arc::new(u0_second),
            u0_third: Arc::new(u0_third),
            x_min,
            decay_exponent,
            inverse_left: None,
            inverse_right: None,
        };
        model.validate()?;
        Ok(model)
    }

    /// Registers closed-form inverse branches; values must satisfy
    /// `u0(f_L(y)) = y` to the residual tolerance (checked by the invariant
    /// suite, not here).
    pub fn with_analytic_inverses(
        mut self,
        f_l: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_r: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.inverse_left = Some(Arc::new(f_l));
        self.inverse_right = Some(Arc::new(f_r));
        self
    }

    fn validate(&self) -> Result<(), InitialDataError> {
        if !(self.decay_exponent > 3.0) {
            return Err(InitialDataError::InvalidProfile(
                "decay exponent must exceed 3".into(),
            ));
        }
        let at_min = (self.u0)(self.x_min);
        if (at_min + 1.0).abs() > 1e-12 {
            return Err(InitialDataError::InvalidProfile(format!(
                "u0(x_M) = {at_min} but the normalization requires -1"
            )));
        }
        if (self.u0_prime)(self.x_min).abs() > 1e-10 {
            return Err(InitialDataError::InvalidProfile(
                "u0'(x_M) must vanish".into(),
            ));
        }
        if (self.u0_second)(self.x_min) <= 0.0 {
            return Err(InitialDataError::InvalidProfile(
                "u0''(x_M) must be positive".into(),
            ));
        }
        // Sampled negativity and monotonicity on both sides of the hump.
        for i in 1..200 {
            let dx = 0.05 * i as f64;
            for x in [self.x_min - dx, self.x_min + dx] {
                let v = (self.u0)(x);
                if v >= 0.0 {
                    return Err(InitialDataError::InvalidProfile(format!(
                        "u0({x}) = {v} is not negative"
                    )));
                }
            }
            let dl = (self.u0_prime)(self.x_min - dx);
            let dr = (self.u0_prime)(self.x_min + dx);
            if dl >= 0.0 || dr <= 0.0 {
                return Err(InitialDataError::InvalidProfile(format!(
                    "u0 is not strictly monotone at distance {dx} from the hump"
                )));
            }
        }
        Ok(())
    }

    pub fn u0(&self, x: f64) -> f64 {
        (self.u0)(x)
    }
    pub fn u0_prime(&self, x: f64) -> f64 {
        (self.u0_prime)(x)
    }
    pub fn u0_second(&self, x: f64) -> f64 {
        (self.u0_second)(x)
    }
    pub fn u0_third(&self, x: f64) -> f64 {
        (self.u0_third)(x)
    }
    /// Hump location `x_M`.
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    /// Hump depth; -1 by normalization.
    pub fn u_min(&self) -> f64 {
        -1.0
    }
    pub fn decay_exponent(&self) -> f64 {
        self.decay_exponent
    }

    /// Inverse of the decreasing branch: `f_L(y) <= x_M`, `u0(f_L(y)) = y`.
    pub fn f_l(&self, y: f64) -> Result<f64, InitialDataError> {
        self.inverse(y, true)
    }

    /// Inverse of the increasing branch: `f_R(y) >= x_M`.
    pub fn f_r(&self, y: f64) -> Result<f64, InitialDataError> {
        self.inverse(y, false)
    }

    fn inverse(&self, y: f64, left: bool) -> Result<f64, InitialDataError> {
        if !(-1.0..0.0).contains(&y) {
            return Err(InitialDataError::Domain("inverse branches need -1 <= y < 0"));
        }
        if let Some(f) = if left {
            &self.inverse_left
        } else {
            &self.inverse_right
        } {
            return Ok(f(y));
        }
        if y == -1.0 {
            return Ok(self.x_min);
        }
        // Bracket on the monotone branch. Near y = -1 the inverse has a
        // square-root singularity; a quadratic model of the hump bottom
        // seeds the bracket there.
        let curv = (self.u0_second)(self.x_min);
        let near = 2.0 * (2.0 * (y + 1.0) / curv).sqrt() + 1e-3;
        let mut step = near;
        let side = if left { -1.0 } else { 1.0 };
        let mut far = self.x_min + side * step;
        let mut tries = 0;
        while (self.u0)(far) <= y {
            step *= 2.0;
            far = self.x_min + side * step;
            tries += 1;
            if tries > 200 {
                return Err(InitialDataError::InvalidProfile(
                    "failed to bracket the inverse branch".into(),
                ));
            }
        }
        let cfg = ToleranceConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_iter: 200,
        };
        let u0 = self.u0.clone();
        let root = if left {
            find_root_bracketed(|x| u0(x) - y, far, self.x_min, &cfg)?
        } else {
            find_root_bracketed(|x| u0(x) - y, self.x_min, far, &cfg)?
        };
        Ok(root)
    }

    /// `f_L'(y) = 1 / u0'(f_L(y))` by the inverse-function rule.
    pub fn f_l_prime(&self, y: f64) -> Result<f64, InitialDataError> {
        let x = self.f_l(y)?;
        Ok(1.0 / (self.u0_prime)(x))
    }

    /// `f_L''(y) = -u0'' / (u0')^3` at `f_L(y)`.
    pub fn f_l_second(&self, y: f64) -> Result<f64, InitialDataError> {
        let x = self.f_l(y)?;
        let d1 = (self.u0_prime)(x);
        let d2 = (self.u0_second)(x);
        Ok(-d2 / d1.powi(3))
    }

    /// `f_L'''(y) = (3 u0''^2 - u0' u0''') / (u0')^5` at `f_L(y)`.
    pub fn f_l_third(&self, y: f64) -> Result<f64, InitialDataError> {
        let x = self.f_l(y)?;
        let d1 = (self.u0_prime)(x);
        let d2 = (self.u0_second)(x);
        let d3 = (self.u0_third)(x);
        Ok((3.0 * d2 * d2 - d1 * d3) / d1.powi(5))
    }

    /// `f_R'(y) = 1 / u0'(f_R(y))`.
    pub fn f_r_prime(&self, y: f64) -> Result<f64, InitialDataError> {
        let x = self.f_r(y)?;
        Ok(1.0 / (self.u0_prime)(x))
    }

    /// Gradient-catastrophe data: maximizes `-6 u0'` on the decreasing
    /// branch (grid scan plus a bracketed root of `u0''`).
    pub fn catastrophe(&self) -> Result<CatastrophePoint, InitialDataError> {
        // The steepest descent point is an inflection of u0 left of the hump.
        let mut best_x = self.x_min - 0.5;
        let mut best = (self.u0_prime)(best_x);
        let mut x = self.x_min;
        while x > self.x_min - 60.0 {
            let d = (self.u0_prime)(x);
            if d < best {
                best = d;
                best_x = x;
            }
            x -= 0.01;
        }
        // Polish: u0'' changes sign across the steepest point.
        let lo = best_x - 0.02;
        let hi = best_x + 0.02;
        let cfg = ToleranceConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_iter: 200,
        };
        let u0_second = self.u0_second.clone();
        let xi_c = match find_root_bracketed(|x| u0_second(x), lo, hi, &cfg) {
            Ok(r) => r,
            Err(_) => best_x,
        };
        let slope = -6.0 * (self.u0_prime)(xi_c);
        if slope <= 0.0 {
            return Err(InitialDataError::InvalidProfile(
                "no steepest-descent point found on the decreasing branch".into(),
            ));
        }
        let t_c = 1.0 / slope;
        let u_c = (self.u0)(xi_c);
        let x_c = xi_c + 6.0 * u_c * t_c;
        let fl3 = self.f_l_third(u_c)?;
        let generic = fl3.abs() > 1e-8;
        if !generic {
            return Err(InitialDataError::NonGeneric(fl3.abs()));
        }
        Ok(CatastrophePoint {
            t_c,
            xi_c,
            u_c,
            x_c,
            fl_third_at_uc: fl3,
            generic,
        })
    }
}

/// The built-in profile `u0(x) = -sech^2(x)` with closed-form derivatives
/// and closed-form inverse branches `f_L(y) = -arcosh(1/sqrt(-y))`,
/// `f_R(y) = +arcosh(1/sqrt(-y))`.
pub fn make_sech2_profile() -> InitialDataModel {
    let sech2 = |x: f64| {
        let c = x.cosh();
        1.0 / (c * c)
    };
    InitialDataModel::new(
        move |x| -sech2(x),
        move |x| 2.0 * sech2(x) * x.tanh(),
        move |x| 2.0 * sech2(x) * (sech2(x) - 2.0 * x.tanh().powi(2)),
        move |x| {
            let t = x.tanh();
            8.0 * sech2(x) * t * (t * t - 2.0 * sech2(x))
        },
        0.0,
        4.0,
    )
    .expect("built-in profile satisfies the hump assumptions")
    .with_analytic_inverses(
        |y| -(1.0 / (-y).sqrt()).acosh(),
        |y| (1.0 / (-y).sqrt()).acosh(),
    )
}

/// Same profile but forced through the generic bracketed-root inverse path;
/// used to exercise the numeric inverse against the closed form.
#[doc(hidden)]
pub fn make_sech2_profile_numeric_inverse() -> InitialDataModel {
    let sech2 = |x: f64| {
        let c = x.cosh();
        1.0 / (c * c)
    };
    InitialDataModel::new(
        move |x| -sech2(x),
        move |x| 2.0 * sech2(x) * x.tanh(),
        move |x| 2.0 * sech2(x) * (sech2(x) - 2.0 * x.tanh().powi(2)),
        move |x| {
            let t = x.tanh();
            8.0 * sech2(x) * t * (t * t - 2.0 * sech2(x))
        },
        0.0,
        4.0,
    )
    .expect("built-in profile satisfies the hump assumptions")
}
