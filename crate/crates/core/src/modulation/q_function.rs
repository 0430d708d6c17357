use super::ModulationError;
use crate::initial_data::InitialDataModel;
use crate::numerics::{QuadratureKind, CHEBYSHEV_DEFAULT_NODES, CHEBYSHEV_MAX_NODES};
use std::f64::consts::PI;

/// The phase-shift function entering the hodograph transform:
///
/// `q(b1,b2,b3) = 1/(2 sqrt(2) pi) * double integral over [-1,1]^2 of
///   f_L((1+mu)/2 ((1+nu)/2 b1 + (1-nu)/2 b2) + (1-mu)/2 b3)
///   / (sqrt(1-mu) sqrt(1-nu^2)) dmu dnu`.
///
/// Evaluated by a tensor product of Gauss rules matched to the two weights,
/// with node doubling until successive results agree to the relative
/// tolerance 1e-10. Symmetric in `b1 <-> b2`; collapses to `f_L(b)` when all
/// arguments coincide.
pub fn q_eval(
    b1: f64,
    b2: f64,
    b3: f64,
    model: &InitialDataModel,
) -> Result<f64, ModulationError> {
    Ok(q_with_gradient(b1, b2, b3, model)?.0)
}

/// `q` together with its gradient `(dq/db1, dq/db2, dq/db3)`.
///
/// The partials share the quadrature nodes of `q` itself: differentiation
/// passes through the integral onto `f_L'` times the affine node factors, so
/// one tensor sweep yields all four values.
pub fn q_with_gradient(
    b1: f64,
    b2: f64,
    b3: f64,
    model: &InitialDataModel,
) -> Result<(f64, [f64; 3]), ModulationError> {
    for b in [b1, b2, b3] {
        if !(-1.0 < b && b < 0.0) {
            return Err(ModulationError::Domain(
                "q arguments must lie strictly inside (-1, 0)",
            ));
        }
    }
    let rel_tol = 1e-10;
    let mut n = CHEBYSHEV_DEFAULT_NODES;
    let mut prev = q_tensor(b1, b2, b3, model, n)?;
    while 2 * n <= CHEBYSHEV_MAX_NODES {
        n *= 2;
        let next = q_tensor(b1, b2, b3, model, n)?;
        let dq = (next.0 - prev.0).abs();
        let dgrad = next
            .1
            .iter()
            .zip(prev.1.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = next.0.abs().max(1.0);
        if dq <= rel_tol * scale && dgrad <= 1e-8 {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

fn q_tensor(
    b1: f64,
    b2: f64,
    b3: f64,
    model: &InitialDataModel,
    n: usize,
) -> Result<(f64, [f64; 3]), ModulationError> {
    // Outer weight 1/sqrt(1-mu): n-point rule from the folded 2n-point
    // Gauss-Legendre rule (nodes mu = 1 - 2 s^2, weights 2 sqrt(2) w).
    let table = crate::numerics::gauss_legendre_table(2 * n);
    let (gl_nodes, gl_weights) = (&table.0, &table.1);
    // Inner weight 1/sqrt(1-nu^2): classic Gauss-Chebyshev.
    let cheb_w = PI / n as f64;
    let pref = 1.0 / (2.0 * std::f64::consts::SQRT_2 * PI);

    let mut q = 0.0;
    let mut dq = [0.0; 3];
    for j in 0..n {
        let s = gl_nodes[n + j];
        let w_mu = std::f64::consts::SQRT_2 * 2.0 * gl_weights[n + j];
        let mu = 1.0 - 2.0 * s * s;
        let ap = 0.5 * (1.0 + mu);
        let am = 0.5 * (1.0 - mu);
        for i in 1..=n {
            let nu = (PI * (2.0 * i as f64 - 1.0) / (2.0 * n as f64)).cos();
            let cp = 0.5 * (1.0 + nu);
            let cm = 0.5 * (1.0 - nu);
            let arg = ap * (cp * b1 + cm * b2) + am * b3;
            let x = model.f_l(arg)?;
            let w = w_mu * cheb_w;
            q += w * x;
            let flp = 1.0 / model.u0_prime(x);
            dq[0] += w * flp * ap * cp;
            dq[1] += w * flp * ap * cm;
            dq[2] += w * flp * am;
        }
    }
    Ok((
        pref * q,
        [pref * dq[0], pref * dq[1], pref * dq[2]],
    ))
}

/// The trailing-edge kernel
/// `theta(v; u) = 1/(2 sqrt(v-u)) * integral from u to v of
/// f_L'(xi) / sqrt(v - xi) dxi`,
/// in the rescaled form
/// `theta = 1/2 * integral over [0,1] of f_L'(u + (v-u) sigma)
/// (1-sigma)^(-1/2) dsigma`,
/// which is analytic across `v = u` (where it equals `f_L'(u)`) and valid on
/// both sides of `u`.
pub fn theta_kernel<F: Fn(f64) -> f64>(
    lambda: f64,
    u: f64,
    f_l_prime: &F,
    rel_tol: f64,
) -> Result<f64, ModulationError> {
    let gap = lambda - u;
    let integrand = |sigma: f64| f_l_prime(u + gap * sigma);
    let val = crate::numerics::quad_sqrt_converged(
        &integrand,
        0.0,
        1.0,
        QuadratureKind::ChebyshevSqrtRight,
        CHEBYSHEV_DEFAULT_NODES,
        rel_tol,
    )?;
    Ok(0.5 * val)
}

/// `theta(v; u)` for a profile model; requires `-1 < u < v < 0`.
pub fn theta_vu(v: f64, u: f64, model: &InitialDataModel) -> Result<f64, ModulationError> {
    if !(-1.0 < u && u < v && v < 0.0) {
        return Err(ModulationError::Domain("theta(v; u) needs -1 < u < v < 0"));
    }
    theta_at(v, u, model)
}

/// Same kernel without the ordering restriction (needed for `lambda < u` in
/// the phase derivative).
pub fn theta_at(
    lambda: f64,
    u: f64,
    model: &InitialDataModel,
) -> Result<f64, ModulationError> {
    let f = |y: f64| {
        match model.f_l(y) {
            Ok(x) => 1.0 / model.u0_prime(x),
            Err(_) => f64::NAN,
        }
    };
    theta_kernel(lambda, u, &f, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_sech2_profile;

    #[test]
    fn q_collapses_to_f_l_on_the_diagonal() {
        let m = make_sech2_profile();
        let b = -0.5;
        let q = q_eval(b, b, b, &m).unwrap();
        let fl = m.f_l(b).unwrap();
        assert!((q - fl).abs() < 1e-11, "q={q} f_L={fl}");
        assert!((q + 0.881_373_587_019_543).abs() < 1e-9);
    }

    #[test]
    fn q_symmetric_in_first_two_arguments() {
        let m = make_sech2_profile();
        let a = q_eval(-0.3, -0.5, -0.8, &m).unwrap();
        let b = q_eval(-0.5, -0.3, -0.8, &m).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    // Golden value frozen after the node-doubling convergence check.
    #[test]
    fn q_golden_value() {
        let m = make_sech2_profile();
        let q = q_eval(-0.3, -0.5, -0.8, &m).unwrap();
        // Non-regression tolerance on the self-converged quadrature.
        assert!(
            (q - Q_GOLDEN_M3_M5_M8).abs() < 1e-9,
            "q(-0.3,-0.5,-0.8) = {q:.15}"
        );
    }

    // Frozen from the converged tensor quadrature (node doubling changed the
    // result by < 1e-10).
    const Q_GOLDEN_M3_M5_M8: f64 = -0.844_131_855_235_376_4;

    #[test]
    fn q_rejects_out_of_domain_arguments() {
        let m = make_sech2_profile();
        assert!(q_eval(-0.3, -0.5, -1.0, &m).is_err());
        assert!(q_eval(0.0, -0.5, -0.8, &m).is_err());
    }

    #[test]
    fn q_gradient_matches_richardson_differentiation() {
        let m = make_sech2_profile();
        let b = [-0.35, -0.55, -0.75];
        let (_, grad) = q_with_gradient(b[0], b[1], b[2], &m).unwrap();
        for i in 0..3 {
            let fd = crate::numerics::derivative_richardson(
                |bi: f64| {
                    let mut bb = b;
                    bb[i] = bi;
                    q_eval(bb[0], bb[1], bb[2], &m).unwrap()
                },
                b[i],
                1e-2,
                1,
            )
            .unwrap();
            assert!(
                (grad[i] - fd.value).abs() < 1e-8,
                "dq/db{i}: analytic {} vs Richardson {}",
                grad[i],
                fd.value
            );
        }
    }

    #[test]
    fn theta_constant_slope_stub() {
        // f_L' identically c makes theta(v; u) = c for any u < v.
        let c = -2.7;
        let flp = |_: f64| c;
        let t = theta_kernel(-0.3, -0.8, &flp, 1e-12).unwrap();
        assert!((t - c).abs() < 1e-12);
    }

    #[test]
    fn theta_golden_and_continuity() {
        let m = make_sech2_profile();
        let t = theta_vu(-0.3, -0.8, &m).unwrap();
        assert!(
            (t - THETA_GOLDEN_M3_M8).abs() < 1e-9,
            "theta(-0.3; -0.8) = {t:.15}"
        );
        // v -> u recovers f_L'(u).
        let u = -0.8;
        let flp_u = m.f_l_prime(u).unwrap();
        for h in [1e-3, 1e-5, 1e-7] {
            let t = theta_vu(u + h, u, &m).unwrap();
            assert!(
                (t - flp_u).abs() < 10.0 * h.max(1e-10),
                "h={h}: theta={t} f_L'={flp_u}"
            );
        }
    }

    // Frozen from the converged singular-weight quadrature.
    const THETA_GOLDEN_M3_M8: f64 = -1.597_377_323_807_373_2;

    #[test]
    fn theta_ordering_enforced() {
        let m = make_sech2_profile();
        assert!(theta_vu(-0.8, -0.3, &m).is_err());
        assert!(theta_vu(-0.3, -1.2, &m).is_err());
    }
}
