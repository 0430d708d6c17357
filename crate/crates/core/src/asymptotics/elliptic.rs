use super::AsymptoticsError;
use crate::initial_data::InitialDataModel;
use crate::modulation::{q_eval, whitham_solve, WhithamState};
use crate::special::{complementary_modulus, elliptic_ke, jacobi_dn, theta3};

/// Modulated elliptic approximation at one `(x, t)` point, in both the
/// theta-function and the `dn` form.
#[derive(Debug, Clone)]
pub struct EllipticApproxResult {
    pub state: WhithamState,
    /// Elliptic modulus `s`.
    pub s: f64,
    pub k: f64,
    pub e: f64,
    /// `alpha = -b1 + (b1-b3) E/K`.
    pub alpha: f64,
    /// Phase shift `q(b1, b2, b3)`.
    pub q: f64,
    /// Phase `Omega = sqrt(b1-b3)/(2 eps K) (x - 2t(b1+b2+b3) - q)`.
    pub omega: f64,
    /// Imaginary part of the theta modulus `T = i K'/K`.
    pub cal_t_im: f64,
    /// `b1+b2+b3 + 2 alpha + 2 eps^2 d^2/dx^2 ln theta(Omega; T)`.
    pub u_theta: f64,
    /// `b2+b3-b1 + 2(b1-b2)/dn^2(2 K Omega; s)`.
    pub u_dn: f64,
}

/// The `dn`-form value for given invariants and phase.
pub fn dn_form_value(beta: [f64; 3], omega: f64) -> Result<f64, AsymptoticsError> {
    let [b1, b2, b3] = beta;
    let s2 = (b2 - b3) / (b1 - b3);
    let s = s2.max(0.0).sqrt();
    if s == 0.0 {
        // dn = 1 identically: the Hopf branch b1.
        return Ok(b2 + b3 - b1 + 2.0 * (b1 - b2));
    }
    let big_k = elliptic_ke(s)?.k;
    let dn = jacobi_dn(2.0 * big_k * omega, s)?;
    Ok(b2 + b3 - b1 + 2.0 * (b1 - b2) / (dn * dn))
}

/// The theta-form value for given invariants and phase. The second
/// `x`-derivative of `ln theta` is taken at frozen invariants: only `Omega`
/// varies with `x`, with `dOmega/dx = sqrt(b1-b3)/(2 eps K)`, so the
/// `eps^2` prefactor cancels and the result depends on `x` through `Omega`
/// alone.
pub fn theta_form_value(beta: [f64; 3], omega: f64) -> Result<f64, AsymptoticsError> {
    let [b1, b2, b3] = beta;
    let s2 = (b2 - b3) / (b1 - b3);
    let s = s2.max(0.0).sqrt();
    let pair = elliptic_ke(s)?;
    let alpha = -b1 + (b1 - b3) * pair.e / pair.k;
    let kprime = elliptic_ke(complementary_modulus(s))?.k;
    let th = theta3(omega, kprime / pair.k)?;
    let log_second = (th.dzz * th.value - th.dz * th.dz) / (th.value * th.value);
    Ok(b1 + b2 + b3 + 2.0 * alpha + (b1 - b3) / (2.0 * pair.k * pair.k) * log_second)
}

/// Full elliptic approximation at `(x, t)`: solves the hodograph system,
/// assembles `s, K, E, alpha, q, Omega, T` and evaluates both forms.
///
/// `seed` short-circuits the trailing-edge continuation when sweeping in
/// `x`; pass the previous state.
pub fn elliptic_approx(
    x: f64,
    t: f64,
    eps: f64,
    model: &InitialDataModel,
    seed: Option<&WhithamState>,
) -> Result<EllipticApproxResult, AsymptoticsError> {
    if !(eps > 0.0) {
        return Err(AsymptoticsError::Domain("eps must be positive"));
    }
    let state = whitham_solve(x, t, model, seed)?;
    let [b1, b2, b3] = state.betas();
    let s = state.modulus();
    let pair = elliptic_ke(s)?;
    let alpha = -b1 + (b1 - b3) * pair.e / pair.k;
    let q = q_eval(b1, b2, b3, model)?;
    let omega = (b1 - b3).sqrt() / (2.0 * eps * pair.k) * (x - 2.0 * t * (b1 + b2 + b3) - q);
    let kprime = elliptic_ke(complementary_modulus(s))?.k;
    let u_theta = theta_form_value([b1, b2, b3], omega)?;
    let u_dn = dn_form_value([b1, b2, b3], omega)?;
    Ok(EllipticApproxResult {
        state,
        s,
        k: pair.k,
        e: pair.e,
        alpha,
        q,
        omega,
        cal_t_im: kprime / pair.k,
        u_theta,
        u_dn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dn_form_degenerate_pair_reduces_to_hopf_branch() {
        // b2 = b3 gives s = 0, dn = 1, and the value collapses to b1.
        let b = [-0.3, -0.6, -0.6];
        for omega in [0.0, 0.37, 2.9] {
            let v = dn_form_value(b, omega).unwrap();
            assert!((v - b[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn dn_form_period_one_in_omega() {
        let b = [-0.3, -0.5, -0.8];
        for omega in [0.0, 0.21, 0.73] {
            let a = dn_form_value(b, omega).unwrap();
            let c = dn_form_value(b, omega + 1.0).unwrap();
            assert!((a - c).abs() < 1e-10, "omega={omega}: {a} vs {c}");
        }
    }

    #[test]
    fn dn_form_oscillates_between_trough_and_crest() {
        // Extremes are b1+b3-b2 (dn=1) and b1+b2-b3 (dn=k').
        let b = [-0.3, -0.5, -0.8];
        let trough = b[0] + b[2] - b[1];
        let crest = b[0] + b[1] - b[2];
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for i in 0..=400 {
            let v = dn_form_value(b, i as f64 / 400.0).unwrap();
            min = min.min(v);
            max = max.max(v);
        }
        assert!((min - trough).abs() < 1e-9, "trough {min} vs {trough}");
        assert!((max - crest).abs() < 1e-9, "crest {max} vs {crest}");
    }

    #[test]
    fn theta_and_dn_forms_agree_pointwise() {
        // The two displays are the same function of (beta, Omega).
        let b = [-0.35, -0.55, -0.85];
        for omega in [0.0, 0.13, 0.41, 0.77] {
            let ut = theta_form_value(b, omega).unwrap();
            let ud = dn_form_value(b, omega).unwrap();
            assert!(
                (ut - ud).abs() < 1e-10,
                "omega={omega}: theta {ut} vs dn {ud}"
            );
        }
    }
}
