//! Direct numerical oracle: a Fourier pseudospectral solver for
//! `u_t + 6 u u_x + eps^2 u_xxx = 0` on a periodic domain.
//!
//! The third-derivative term is integrated exactly in Fourier space
//! (integrating factor); the advection term is advanced with classical RK4
//! on the transformed variable, dealiased by the 2/3 rule at every stage.
//! Mass (`integral of u`) is conserved to rounding by construction and the
//! momentum (`integral of u^2`) drift measures time-stepping error.

mod solver;
mod zone;

pub use solver::{evolve, exact_soliton, EvolveOptions};
pub use zone::oscillation_zone;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("solution blew up: max |u| = {max_abs} at t = {t} exceeds 10x the initial bound")]
    BlowUp { t: f64, max_abs: f64 },
    #[error("boundary decay violated at t = {t}: |u(+-L/2)| = {boundary:.3e}")]
    DecayViolation { t: f64, boundary: f64 },
    #[error("no oscillations above threshold")]
    NoOscillations,
}

/// Periodic grid samples of `u` at one time.
#[derive(Debug, Clone)]
pub struct SpectralField {
    /// Samples at `x_j = -L/2 + j L / N`.
    pub values: Vec<f64>,
    /// Domain length.
    pub l: f64,
    /// Grid size (power of two, >= 256).
    pub n: usize,
    /// Dispersion parameter.
    pub eps: f64,
    /// Current time.
    pub t: f64,
}

impl SpectralField {
    /// Samples a profile function on a fresh grid at `t = 0`.
    pub fn from_profile(
        f: impl Fn(f64) -> f64,
        l: f64,
        n: usize,
        eps: f64,
    ) -> Result<Self, SpectralError> {
        let field = Self {
            values: (0..n).map(|j| f(-0.5 * l + l * j as f64 / n as f64)).collect(),
            l,
            n,
            eps,
            t: 0.0,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| -0.5 * self.l + self.l * j as f64 / self.n as f64)
    }

    pub fn x_at(&self, j: usize) -> f64 {
        -0.5 * self.l + self.l * j as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.n < 256 || !self.n.is_power_of_two() {
            return Err(SpectralError::InvalidField(format!(
                "grid size {} must be a power of two >= 256",
                self.n
            )));
        }
        if self.values.len() != self.n {
            return Err(SpectralError::InvalidField(
                "sample count does not match grid size".into(),
            ));
        }
        if !(self.l > 0.0) || !(self.eps > 0.0) {
            return Err(SpectralError::InvalidField(
                "domain length and eps must be positive".into(),
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidField("non-finite samples".into()));
        }
        let boundary = self.values[0].abs();
        if boundary > 1e-10 {
            return Err(SpectralError::DecayViolation {
                t: self.t,
                boundary,
            });
        }
        Ok(())
    }

    /// Trapezoid-rule mass and momentum (spectrally accurate on periodic
    /// data): `(integral of u, integral of u^2)`.
    pub fn conserved(&self) -> (f64, f64) {
        let dx = self.l / self.n as f64;
        let mass: f64 = self.values.iter().sum::<f64>() * dx;
        let momentum: f64 = self.values.iter().map(|v| v * v).sum::<f64>() * dx;
        (mass, momentum)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Diagnostics of one `evolve` run.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Relative change of `integral of u` over the run.
    pub mass_drift: f64,
    /// Relative change of `integral of u^2` over the run.
    pub momentum_drift: f64,
    pub max_abs_u: f64,
    pub steps: usize,
    pub wall_time: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_validation() {
        assert!(SpectralField::from_profile(|_| 0.0, 30.0, 512, 0.1).is_ok());
        // Too small / not a power of two.
        assert!(SpectralField::from_profile(|_| 0.0, 30.0, 100, 0.1).is_err());
        assert!(SpectralField::from_profile(|_| 0.0, 30.0, 500, 0.1).is_err());
        // Boundary decay violated for a constant field.
        assert!(SpectralField::from_profile(|_| 1.0, 30.0, 512, 0.1).is_err());
    }

    #[test]
    fn conserved_of_zero_field() {
        let f = SpectralField::from_profile(|_| 0.0, 30.0, 512, 0.1).unwrap();
        let (m, p) = f.conserved();
        assert_eq!(m, 0.0);
        assert_eq!(p, 0.0);
    }

    // Mass of the soliton: integral of 2 eps^2 b^2 sech^2(b x) = 4 eps^2 b.
    #[test]
    fn soliton_mass_and_momentum() {
        let (b, eps) = (4.0, 0.1);
        let f = SpectralField::from_profile(
            |x| exact_soliton(b, 0.0, eps, x, 0.0),
            20.0,
            2048,
            eps,
        )
        .unwrap();
        let (mass, momentum) = f.conserved();
        assert!((mass - 4.0 * eps * eps * b).abs() < 1e-12, "mass {mass}");
        // integral of sech^4 = 4/(3b): momentum = (2 eps^2 b^2)^2 * 4/(3b).
        let expected = (2.0 * eps * eps * b * b).powi(2) * 4.0 / (3.0 * b);
        assert!(
            (momentum - expected).abs() < 1e-12,
            "momentum {momentum} vs {expected}"
        );
        assert!((momentum - 0.034_133_333_333_333_33).abs() < 1e-12);
    }
}
