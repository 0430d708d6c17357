//! Special functions used by the elliptic and solitonic approximations:
//! complete elliptic integrals `K(s)` and `E(s)` in the *modulus* convention,
//! the Jacobi `dn` function, the theta function
//! `theta(z; T) = sum over n of exp(pi i n^2 T + 2 pi i n z)` for purely
//! imaginary `T`, and the Hermite normalization constant
//! `h_k = 2^(k/2) / (pi^(1/4) sqrt(k!))`.
//!
//! Everything here works in the modulus `s`; the parameter convention
//! `m = s^2` of many references must be converted by the caller.

use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecialError {
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("Im T = {0} below the 0.05 convergence floor of the theta series")]
    ConvergenceFloor(f64),
}

/// `K(s)` and `E(s)` for a common modulus `s`.
#[derive(Debug, Clone, Copy)]
pub struct EllipticPair {
    /// Complete elliptic integral of the first kind.
    pub k: f64,
    /// Complete elliptic integral of the second kind.
    pub e: f64,
    /// `K - E` from the AGM defect sum; accurate in relative terms even for
    /// small modulus, where `k - e` would cancel.
    pub k_minus_e: f64,
    /// The modulus the pair was evaluated at.
    pub modulus: f64,
}

const AGM_MAX_ITER: usize = 40;

/// Complete elliptic integrals of the first and second kind at modulus
/// `s` in `[0, 1)`, by the arithmetic-geometric mean.
///
/// `K(s) = pi / (2 agm(1, sqrt(1-s^2)))`; `E` from the AGM defect sums.
pub fn elliptic_ke(s: f64) -> Result<EllipticPair, SpecialError> {
    if !(0.0..1.0).contains(&s) {
        return Err(SpecialError::Domain("modulus must satisfy 0 <= s < 1"));
    }
    if s == 0.0 {
        return Ok(EllipticPair {
            k: FRAC_PI_2,
            e: FRAC_PI_2,
            k_minus_e: 0.0,
            modulus: s,
        });
    }
    let mut a = 1.0f64;
    let mut b = ((1.0 - s) * (1.0 + s)).sqrt();
    let mut c = s;
    let mut sum = 0.5 * c * c;
    let mut pow2 = 1.0;
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow2 *= 2.0;
        sum += 0.5 * pow2 * c * c;
        a = an;
        b = bn;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    // sum is a positive series, so K - E = K * sum carries full relative
    // accuracy down to s -> 0.
    let k_minus_e = k * sum;
    let e = k - k_minus_e;
    Ok(EllipticPair {
        k,
        e,
        k_minus_e,
        modulus: s,
    })
}

/// Complementary modulus `sqrt(1 - s^2)` computed without cancellation.
pub fn complementary_modulus(s: f64) -> f64 {
    ((1.0 - s) * (1.0 + s)).sqrt()
}

/// Jacobi `dn(w; s)` for modulus `s` in `[0, 1]`, by the descending AGM
/// (Landen) scheme. Periodic with period `2K(s)` for `s < 1`; exactly
/// `sech(w)` at `s = 1` and identically 1 at `s = 0`.
pub fn jacobi_dn(w: f64, s: f64) -> Result<f64, SpecialError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SpecialError::Domain("modulus must satisfy 0 <= s <= 1"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    if s == 1.0 {
        return Ok(1.0 / w.cosh());
    }
    // Reduce |w| into [0, K/2]: dn is even with period 2K, and
    // dn(w) = k' / dn(K - w) maps the upper half of the period cell down.
    // The amplitude back-recurrence is ill-conditioned near w = K (the
    // ratio cos(phi_0)/cos(phi_1 - phi_0) degenerates to 0/0), so the
    // reduction is what keeps full accuracy there.
    let big_k = elliptic_ke(s)?.k;
    let mut w = (w.abs()) % (2.0 * big_k);
    if w > big_k {
        w = 2.0 * big_k - w;
    }
    if w > 0.5 * big_k {
        let kp = complementary_modulus(s);
        return Ok(kp / jacobi_dn(big_k - w, s)?);
    }

    // AGM ladder a_m, c_m, stopping when the defect c underflows.
    let mut a = vec![1.0f64];
    let mut c = vec![s];
    let mut an = 1.0;
    let mut bn = complementary_modulus(s);
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * an && n < AGM_MAX_ITER {
        let a1 = 0.5 * (an + bn);
        let c1 = 0.5 * (an - bn);
        bn = (an * bn).sqrt();
        an = a1;
        a.push(an);
        c.push(c1);
        n += 1;
    }
    // Back recurrence for the amplitudes phi_m (descending Landen):
    // sin(2 phi_{m-1} - phi_m) = (c_m / a_m) sin(phi_m).
    let mut phis = vec![0.0f64; n + 1];
    phis[n] = (2.0f64).powi(n as i32) * an * w;
    for m in (1..=n).rev() {
        let sincorr = (c[m] / a[m]) * phis[m].sin();
        phis[m - 1] = 0.5 * (phis[m] + sincorr.asin());
    }
    let dn = if n == 0 {
        (1.0 - s * s * phis[0].sin().powi(2)).sqrt()
    } else {
        phis[0].cos() / (phis[1] - phis[0]).cos()
    };
    Ok(dn)
}

/// Value of the theta series and its first two `z`-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ThetaEval {
    pub value: f64,
    pub dz: f64,
    pub dzz: f64,
}

/// Theta function `theta(z; T)` for `T = i * tau_im` purely imaginary,
/// summed until terms fall below 1e-16, together with its first and second
/// `z`-derivatives (termwise differentiation).
///
/// Below `tau_im = 0.05` the series needs too many terms for uniform
/// accuracy and the call is rejected.
pub fn theta3(z: f64, tau_im: f64) -> Result<ThetaEval, SpecialError> {
    if tau_im < 0.05 {
        return Err(SpecialError::ConvergenceFloor(tau_im));
    }
    // Integer periodicity: reduce z to [-1/2, 1/2] to keep the cosines
    // well conditioned for large phases.
    let zr = z - z.round();
    let lnq = -PI * tau_im; // nome q = exp(-pi tau_im)
    let mut value = 1.0;
    let mut dz = 0.0;
    let mut dzz = 0.0;
    let mut n = 1.0f64;
    loop {
        let qn = (lnq * n * n).exp();
        if qn < 1e-16 {
            break;
        }
        let phase = 2.0 * PI * n * zr;
        value += 2.0 * qn * phase.cos();
        dz -= 4.0 * PI * n * qn * phase.sin();
        dzz -= 8.0 * PI * PI * n * n * qn * phase.cos();
        n += 1.0;
        if n > 1e6 {
            break;
        }
    }
    Ok(ThetaEval { value, dz, dzz })
}

/// Hermite normalization constant `h_k = 2^(k/2) / (pi^(1/4) sqrt(k!))`,
/// computed in log space. Returns `(h_k, ln h_k)`; `h_k` may underflow to 0
/// for large `k` while `ln h_k` stays exact.
pub fn hermite_norm(k: u32) -> Result<(f64, f64), SpecialError> {
    if k > 500 {
        return Err(SpecialError::Domain("k must be <= 500"));
    }
    let kf = f64::from(k);
    let mut ln_fact = 0.0;
    for j in 2..=k {
        ln_fact += f64::from(j).ln();
    }
    let ln_h = 0.5 * kf * std::f64::consts::LN_2 - 0.25 * PI.ln() - 0.5 * ln_fact;
    Ok((ln_h.exp(), ln_h))
}
