use super::AsymptoticsError;
use crate::initial_data::InitialDataModel;
use crate::numerics::{quad_adaptive, ToleranceConfig};

/// Semiclassical reflection phase
/// `rho(l) = f_L(l) sqrt(-l) + integral from -inf to f_L(l) of
/// [sqrt(u0(x) - l) - sqrt(-l)] dx`.
///
/// Defined for `l` in `[-1, 0)`; the half-line integrand decays like
/// `u0(x) / (2 sqrt(-l))`, so the decay exponent of the profile guarantees
/// convergence under the rational map of the adaptive rule.
pub fn rho_eval(lambda: f64, model: &InitialDataModel) -> Result<f64, AsymptoticsError> {
    if !(-1.0..0.0).contains(&lambda) {
        return Err(AsymptoticsError::Domain("rho needs -1 <= lambda < 0"));
    }
    let fl = if lambda == -1.0 {
        model.x_min()
    } else {
        model.f_l(lambda)?
    };
    let cfg = ToleranceConfig {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_iter: 200,
    };
    let tail = quad_adaptive(
        |x: f64| ((model.u0(x) - lambda).max(0.0)).sqrt() - (-lambda).sqrt(),
        f64::NEG_INFINITY,
        fl,
        &cfg,
    )?;
    Ok(fl * (-lambda).sqrt() + tail)
}

/// Tunneling phase
/// `tau(l) = integral from f_L(l) to f_R(l) of sqrt(l - u0(x)) dx`,
/// positive on `(-1, 0)` and vanishing as `l -> -1` (empty well).
pub fn tau_eval(lambda: f64, model: &InitialDataModel) -> Result<f64, AsymptoticsError> {
    if !(-1.0 < lambda && lambda < 0.0) {
        return Err(AsymptoticsError::Domain("tau needs -1 < lambda < 0"));
    }
    let a = model.f_l(lambda)?;
    let b = model.f_r(lambda)?;
    let cfg = ToleranceConfig {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_iter: 200,
    };
    let val = quad_adaptive(
        |x: f64| ((lambda - model.u0(x)).max(0.0)).sqrt(),
        a,
        b,
        &cfg,
    )?;
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_sech2_profile;
    use std::f64::consts::{LN_2, PI};

    // At the well bottom the integral collapses to
    // integral from -inf to 0 of (|tanh x| - 1) dx = -ln 2.
    #[test]
    fn rho_at_minus_one() {
        let m = make_sech2_profile();
        let r = rho_eval(-1.0, &m).unwrap();
        assert!((r + LN_2).abs() < 1e-9, "rho(-1) = {r}");
    }

    #[test]
    fn rho_vanishes_toward_zero() {
        let m = make_sech2_profile();
        let r = rho_eval(-1e-6, &m).unwrap();
        assert!(r.abs() < 1e-2, "rho(-1e-6) = {r}");
    }

    #[test]
    fn rho_real_and_finite_on_grid() {
        let m = make_sech2_profile();
        let mut l = -0.95;
        while l < -0.05 {
            let r = rho_eval(l, &m).unwrap();
            assert!(r.is_finite());
            l += 0.1;
        }
    }

    #[test]
    fn tau_limits_and_positivity() {
        let m = make_sech2_profile();
        // Empty well as lambda -> -1.
        let near_bottom = tau_eval(-1.0 + 1e-6, &m).unwrap();
        assert!(near_bottom >= 0.0 && near_bottom < 1e-2);
        // Positive in between.
        let mut l = -0.9;
        while l < -0.1 {
            assert!(tau_eval(l, &m).unwrap() > 0.0);
            l += 0.1;
        }
        // Full well: integral of sech = pi.
        let full = tau_eval(-1e-4, &m).unwrap();
        assert!((full - PI).abs() < 0.05, "tau(0-) = {full}");
    }

    #[test]
    fn domain_guards() {
        let m = make_sech2_profile();
        assert!(rho_eval(0.0, &m).is_err());
        assert!(rho_eval(-1.5, &m).is_err());
        assert!(tau_eval(-1.0, &m).is_err());
        assert!(tau_eval(0.0, &m).is_err());
    }
}
