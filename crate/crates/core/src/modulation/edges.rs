use super::hodograph::{solve_fixed_gap, GapKind};
use super::q_function::theta_at;
use super::ModulationError;
use crate::initial_data::InitialDataModel;
use crate::numerics::{derivative_richardson, newton_system, quad_adaptive, ToleranceConfig};

/// The trailing edge `x+(t)` of the oscillation zone, where `b1 = b2 = v`
/// and `b3 = u`, together with the pulse constants `d theta/dv` and `gamma`.
#[derive(Debug, Clone, Copy)]
pub struct TrailingEdgePoint {
    pub t: f64,
    /// `x+ = 6 t u + f_L(u)`.
    pub x_plus: f64,
    /// Lower invariant limit (`b3`).
    pub u: f64,
    /// Merged upper pair (`b1 = b2`).
    pub v: f64,
    /// `d theta(v; u) / dv`, negative past the catastrophe.
    pub dtheta_dv: f64,
    /// `gamma = 4 (v-u)^(5/4) sqrt(-d theta/dv)`.
    pub gamma: f64,
    /// Residuals of the three defining equations at the returned point.
    pub residual: [f64; 3],
}

/// The leading edge `x-(t)`, where `b2 = b3 = v` and `b1 = u`, located by
/// gap continuation and Richardson extrapolation in the gap parameter.
#[derive(Debug, Clone, Copy)]
pub struct LeadingEdgePoint {
    pub t: f64,
    pub x_minus: f64,
    /// Surviving invariant limit (`b1`).
    pub u: f64,
    /// Merged lower pair (`b2 = b3`).
    pub v: f64,
    /// Smallest gap reached by the continuation.
    pub gap_reached: f64,
    /// Difference of the last two extrapolants (error indicator).
    pub extrapolation_error: f64,
}

/// Residual of the trailing-edge phase equation `6t + theta(v; u) = 0`.
pub fn trailing2_residual(
    u: f64,
    v: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<f64, ModulationError> {
    Ok(6.0 * t + theta_at(v, u, model)?)
}

/// Residual of the integral equation
/// `integral from u to v of (6t + theta(l; u)) sqrt(l - u) dl = 0`.
///
/// Fubini turns this into
/// `integral from u to v of (f_L'(xi) + 6t) sqrt(v - xi) dxi`, and the
/// substitution `x = f_L(xi)` then gives
/// `4t (v-u)^(3/2) - integral over [f_L(v), f_L(u)] of sqrt(v - u0(x)) dx`,
/// which is free of the `f_L'` boundary layer near the hump depth and is
/// handled spectrally by the endpoint-weight rule.
pub fn trailing3_residual(
    u: f64,
    v: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<f64, ModulationError> {
    let x_u = model.f_l(u)?;
    let x_v = model.f_l(v)?;
    let g = |x: f64| ((x - x_v).max(0.0) * (v - model.u0(x)).max(0.0)).sqrt();
    let j = crate::numerics::quad_sqrt_converged(
        &g,
        x_v,
        x_u,
        crate::numerics::QuadratureKind::ChebyshevSqrtLeft,
        crate::numerics::CHEBYSHEV_DEFAULT_NODES,
        1e-12,
    )?;
    Ok(4.0 * t * (v - u).powf(1.5) - j)
}

/// The same integral evaluated in its original form (adaptive quadrature of
/// `(6t + theta(l; u)) sqrt(l - u)` in `l`); retained as an independent
/// route for cross-checks. Accurate while `1 + u` is not tiny.
pub fn trailing3_lambda_form(
    u: f64,
    v: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<f64, ModulationError> {
    let cfg = ToleranceConfig {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_iter: 200,
    };
    let val = quad_adaptive(
        |lam: f64| match theta_at(lam, u, model) {
            Ok(th) => (6.0 * t + th) * (lam - u).max(0.0).sqrt(),
            Err(_) => f64::NAN,
        },
        u,
        v,
        &cfg,
    )?;
    Ok(val)
}

/// Newton on the trailing pair in the variables `(ln(1+u), v)`: the root's
/// distance `1+u` from the hump depth shrinks rapidly in `t`, and the log
/// keeps the iteration and its finite-difference Jacobian well scaled.
fn solve_trailing_pair(
    seed: (f64, f64),
    t: f64,
    model: &InitialDataModel,
) -> Result<(f64, f64), ModulationError> {
    let f = |z: &[f64]| -> Vec<f64> {
        let u = -1.0 + z[0].exp();
        let v = z[1];
        if !(z[0].is_finite() && -1.0 < u && u < v && v < 0.0) {
            return vec![f64::NAN; 2];
        }
        match (trailing2_residual(u, v, t, model), trailing3_residual(u, v, t, model)) {
            (Ok(a), Ok(b)) => vec![a, b],
            _ => vec![f64::NAN; 2],
        }
    };
    let cfg = ToleranceConfig {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_iter: 120,
    };
    let sol = newton_system(f, &[(1.0 + seed.0).ln(), seed.1], None, &cfg)
        .map_err(|e| ModulationError::EdgeSolveFailed(format!("t = {t}: {e}")))?;
    Ok((-1.0 + sol[0].exp(), sol[1]))
}

/// Solves the trailing-edge system for `(u, v)` and assembles the edge data.
///
/// Newton is seeded from the catastrophe point: the confluent expansion
/// about `t_c` gives `v - u ~ sqrt(122.5 (t - t_c) / |f_L'''(u_c)|)` with
/// `u - u_c = -(4/7)(v-u)`; from there the solver continues geometrically
/// in `t` when the target is far.
pub fn trailing_edge(t: f64, model: &InitialDataModel) -> Result<TrailingEdgePoint, ModulationError> {
    let cat = model.catastrophe()?;
    if t <= cat.t_c {
        return Err(ModulationError::NotPastCatastrophe { t, t_c: cat.t_c });
    }

    let seed_at = |tau: f64| -> (f64, f64) {
        let d = (122.5 * tau / cat.fl_third_at_uc.abs()).sqrt();
        (cat.u_c - 4.0 / 7.0 * d, cat.u_c + 3.0 / 7.0 * d)
    };

    let tau_target = t - cat.t_c;
    let tau0 = tau_target.min(2e-3);
    let mut tau = tau0;
    let mut sol = solve_trailing_pair(seed_at(tau), cat.t_c + tau, model);
    // Halve the starting offset if the local expansion seed is not yet in
    // the Newton basin.
    let mut shrink = 0;
    while sol.is_err() && shrink < 10 {
        tau *= 0.5;
        sol = solve_trailing_pair(seed_at(tau), cat.t_c + tau, model);
        shrink += 1;
    }
    // Continuation in t, with secant seeds in (ln(1+u), v): the root's
    // distance from the hump depth decays exponentially, so the log is the
    // coordinate that stays secant-friendly. Steps halve on failure.
    let mut prev_tau = tau;
    let mut prev = sol?;
    let mut prev2: Option<(f64, (f64, f64))> = None;
    let mut guard = 0;
    while tau < tau_target {
        guard += 1;
        if guard > 400 {
            return Err(ModulationError::EdgeSolveFailed(format!(
                "t-continuation stalled at t = {}",
                cat.t_c + tau
            )));
        }
        let mut dt_step = (tau * 0.6).min(tau_target - tau);
        loop {
            let next_tau = tau + dt_step;
            let seed = match prev2 {
                Some((tau2, p2)) if tau - tau2 > 0.0 => {
                    let r = (next_tau - tau) / (tau - tau2);
                    let z = (1.0 + prev.0).ln();
                    let z2 = (1.0 + p2.0).ln();
                    let z_seed = z + r * (z - z2);
                    (
                        -1.0 + z_seed.exp(),
                        (prev.1 + r * (prev.1 - p2.1)).min(-1e-9),
                    )
                }
                _ => prev,
            };
            match solve_trailing_pair(seed, cat.t_c + next_tau, model)
                .or_else(|_| solve_trailing_pair(prev, cat.t_c + next_tau, model))
            {
                Ok(sol) => {
                    prev2 = Some((prev_tau, prev));
                    prev_tau = tau;
                    prev = sol;
                    tau = next_tau;
                    break;
                }
                Err(e) => {
                    dt_step *= 0.5;
                    if dt_step < 1e-8 * tau_target.max(1.0) {
                        return Err(ModulationError::EdgeSolveFailed(format!(
                            "no trailing-edge solution reachable at t = {t}                              (the two-zero structure is lost past the validity                              horizon); last good t = {}: {e}",
                            cat.t_c + tau
                        )));
                    }
                }
            }
        }
    }
    let (u, v) = prev;
    if !(u > -1.0) || 1.0 + u < 1e-14 {
        return Err(ModulationError::EdgeSolveFailed(format!(
            "trailing invariant u collapsed into the hump depth at t = {t};              past the validity horizon of the decreasing-branch system"
        )));
    }

    let x_plus = 6.0 * t * u + model.f_l(u)?;
    let dtheta = derivative_richardson(
        |lam: f64| theta_at(lam, u, model).unwrap_or(f64::NAN),
        v,
        1e-3 * (v - u),
        1,
    )?;
    if dtheta.value >= 0.0 {
        return Err(ModulationError::NonNegativeDthetaDv(dtheta.value));
    }
    let gamma = 4.0 * (v - u).powf(1.25) * (-dtheta.value).sqrt();
    let residual = [
        x_plus - 6.0 * t * u - model.f_l(u)?,
        trailing2_residual(u, v, t, model)?,
        trailing3_residual(u, v, t, model)?,
    ];
    Ok(TrailingEdgePoint {
        t,
        x_plus,
        u,
        v,
        dtheta_dv: dtheta.value,
        gamma,
        residual,
    })
}

/// Locates the leading edge by continuation of the hodograph solution in the
/// lower gap `b2 - b3`: the gap is halved from the interior down to 1e-7,
/// and `x`, `b1`, and the midpoint of the merging pair are Richardson-
/// extrapolated to zero gap (the solution branch is analytic in the gap).
pub fn leading_edge(t: f64, model: &InitialDataModel) -> Result<LeadingEdgePoint, ModulationError> {
    let edge = trailing_edge(t, model)?;

    // Enter the cusp just inside the trailing edge.
    let mut delta0 = 1e-4;
    let mut entry = None;
    for _ in 0..12 {
        let seed = [edge.v + 0.5 * delta0, edge.v - 0.5 * delta0, edge.u];
        match solve_fixed_gap(seed, edge.x_plus, delta0, GapKind::Upper, t, model) {
            Ok(p) => {
                entry = Some(p);
                break;
            }
            Err(_) => delta0 *= 0.5,
        }
    }
    let (mut beta, mut x) = entry.ok_or_else(|| {
        ModulationError::ContinuationFailed("could not enter the cusp at the trailing edge".into())
    })?;

    // Continuation in the lower gap, shrinking toward zero with
    // substepping. Steps are accepted only when the branch moves the right
    // way (x decreases toward the leading edge) and the invariants move
    // continuously; otherwise the step shrinks, which keeps Newton from
    // landing on a spurious root far from the branch.
    let mut samples: Vec<(f64, f64, f64, f64)> = Vec::new(); // (gap, x, b1, mid23)
    let mut gap = beta[1] - beta[2];
    let stop_gap = 1e-7;
    let mut guard = 0;
    while gap > stop_gap {
        guard += 1;
        if guard > 2000 {
            return Err(ModulationError::ContinuationFailed(
                "gap continuation stalled".into(),
            ));
        }
        let mut target = (0.6 * gap).max(stop_gap * 0.999);
        let mut sub = 0;
        loop {
            let attempt = solve_fixed_gap(beta, x, target, GapKind::Lower, t, model);
            let accepted = match &attempt {
                Ok((b, xs)) => {
                    *xs <= x + 1e-10
                        && (b[0] - beta[0]).abs() < 0.2
                        && (0.5 * (b[1] + b[2]) - 0.5 * (beta[1] + beta[2])).abs() < 0.2
                }
                Err(_) => false,
            };
            if accepted {
                let (b, xs) = attempt.unwrap();
                beta = b;
                x = xs;
                gap = target;
                break;
            }
            sub += 1;
            if sub > 24 {
                return attempt.map(|_| ()).err().map_or(
                    Err(ModulationError::ContinuationFailed(
                        "gap continuation kept leaving the branch".into(),
                    )),
                    Err,
                )?;
            }
            // Retry closer to the current gap.
            target = (gap * target).sqrt();
        }
        samples.push((gap, x, beta[0], 0.5 * (beta[1] + beta[2])));
    }

    // Neville extrapolation of the tail samples to gap = 0.
    let tail: Vec<_> = samples.iter().rev().take(7).cloned().collect();
    if tail.len() < 3 {
        return Err(ModulationError::ContinuationFailed(
            "not enough continuation samples for extrapolation".into(),
        ));
    }
    let (x_minus, err_x) = neville_to_zero(&tail.iter().map(|s| (s.0, s.1)).collect::<Vec<_>>());
    let (b1_lim, _) = neville_to_zero(&tail.iter().map(|s| (s.0, s.2)).collect::<Vec<_>>());
    let (v_lim, _) = neville_to_zero(&tail.iter().map(|s| (s.0, s.3)).collect::<Vec<_>>());

    Ok(LeadingEdgePoint {
        t,
        x_minus,
        u: b1_lim,
        v: v_lim,
        gap_reached: samples.last().map(|s| s.0).unwrap_or(f64::NAN),
        extrapolation_error: err_x,
    })
}

/// Neville polynomial extrapolation of `(h_i, y_i)` samples to `h = 0`;
/// returns the value and the magnitude of the final correction.
fn neville_to_zero(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len();
    let mut tab: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let h: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut last = tab[n - 1];
    let mut corr = f64::INFINITY;
    for j in 1..n {
        for i in (j..n).rev() {
            tab[i] = tab[i] + (tab[i] - tab[i - 1]) * h[i] / (h[i - j] - h[i]);
        }
        corr = (tab[n - 1] - last).abs();
        last = tab[n - 1];
    }
    (last, corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_sech2_profile;

    #[test]
    fn trailing_edge_residuals_are_tiny() {
        let m = make_sech2_profile();
        let e = trailing_edge(0.28, &m).unwrap();
        assert!(e.residual[0].abs() < 1e-12);
        assert!(e.residual[1].abs() < 1e-10, "r2 = {:e}", e.residual[1]);
        assert!(e.residual[2].abs() < 1e-10, "r3 = {:e}", e.residual[2]);
        assert!(-1.0 < e.u && e.u < e.v && e.v < 0.0);
        assert!(e.dtheta_dv < 0.0);
        assert!(e.gamma > 0.0);
    }

    #[test]
    fn trailing_edge_confluence_at_catastrophe() {
        let m = make_sech2_profile();
        let cat = m.catastrophe().unwrap();
        let e = trailing_edge(cat.t_c + 1e-4, &m).unwrap();
        assert!(
            (e.u - cat.u_c).abs() + (e.v - cat.u_c).abs() < 0.1,
            "u = {}, v = {} far from u_c = {}",
            e.u,
            e.v,
            cat.u_c
        );
        assert!((e.x_plus - cat.x_c).abs() < 0.05);
    }

    #[test]
    fn trailing_edge_rejects_pre_catastrophe_times() {
        let m = make_sech2_profile();
        let cat = m.catastrophe().unwrap();
        assert!(matches!(
            trailing_edge(cat.t_c, &m),
            Err(ModulationError::NotPastCatastrophe { .. })
        ));
        assert!(trailing_edge(0.1, &m).is_err());
    }

    // Independent oracle: nested bisection. The outer variable is u; for
    // each u, v(u) solves the phase equation by bisection, and the outer
    // residual is the integral equation.
    #[test]
    fn trailing_edge_matches_nested_bisection() {
        use crate::numerics::{find_root_bracketed, ToleranceConfig};
        let m = make_sech2_profile();
        let t = 0.25;
        let e = trailing_edge(t, &m).unwrap();

        let cfg = ToleranceConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_iter: 300,
        };
        // v(u): the zero of 6t + theta(v; u) above the interior zero.
        let v_of_u = |u: f64| -> f64 {
            // Scan upward from u to bracket the sign change from + to -.
            let n = 400;
            let lo = u + 1e-9;
            let hi = -1e-9;
            let g = |v: f64| 6.0 * t + theta_at(v, u, &m).unwrap();
            let mut prev_v = lo;
            let mut prev_g = g(lo);
            let mut bracket = None;
            for i in 1..=n {
                let v = u + (hi - u) * i as f64 / n as f64;
                let gv = g(v);
                if prev_g > 0.0 && gv <= 0.0 {
                    bracket = Some((prev_v, v));
                    break;
                }
                prev_v = v;
                prev_g = gv;
            }
            let (a, b) = bracket.expect("phase equation must change sign");
            find_root_bracketed(g, a, b, &cfg).unwrap()
        };
        // Outer residual through the independent lambda-form quadrature.
        let outer = |u: f64| trailing3_lambda_form(u, v_of_u(u), t, &m).unwrap();
        // Bracket the outer root around the Newton solution.
        let (mut a, mut b) = (e.u - 5e-3, e.u + 5e-3);
        assert!(outer(a) * outer(b) < 0.0, "oracle bracket failed");
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if outer(a) * outer(mid) <= 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let u_bis = 0.5 * (a + b);
        let v_bis = v_of_u(u_bis);
        let x_bis = 6.0 * t * u_bis + m.f_l(u_bis).unwrap();
        assert!((e.u - u_bis).abs() < 1e-8, "u: {} vs {u_bis}", e.u);
        assert!((e.v - v_bis).abs() < 1e-8, "v: {} vs {v_bis}", e.v);
        assert!((e.x_plus - x_bis).abs() < 1e-8, "x+: {} vs {x_bis}", e.x_plus);
    }

    #[test]
    fn phase_function_has_exactly_two_zeros() {
        // 6t + theta(l; u) vanishes at v and at exactly one interior point.
        let m = make_sech2_profile();
        let t = 0.28;
        let e = trailing_edge(t, &m).unwrap();
        let g = |lam: f64| 6.0 * t + theta_at(lam, e.u, &m).unwrap();
        let mut crossings = 0;
        let n = 2000;
        let mut prev = g(-0.999_99);
        for i in 1..=n {
            let lam = -0.999_99 + (0.999_89) * i as f64 / n as f64;
            let cur = g(lam);
            if prev.signum() != cur.signum() {
                crossings += 1;
            }
            prev = cur;
        }
        assert_eq!(crossings, 2, "expected the two-zero structure");
    }

    #[test]
    fn leading_edge_orders_and_confluence() {
        let m = make_sech2_profile();
        let t = 0.3;
        let lead = leading_edge(t, &m).unwrap();
        let trail = trailing_edge(t, &m).unwrap();
        assert!(
            lead.x_minus < trail.x_plus,
            "cusp ordering x- < x+ violated"
        );
        assert!(lead.gap_reached <= 1e-7);
        assert!(-1.0 < lead.v && lead.v < lead.u && lead.u < 0.0);
    }

    #[test]
    fn edges_collapse_to_cusp_point() {
        let m = make_sech2_profile();
        let cat = m.catastrophe().unwrap();
        let t = cat.t_c + 2e-3;
        let lead = leading_edge(t, &m).unwrap();
        let trail = trailing_edge(t, &m).unwrap();
        assert!((trail.x_plus - cat.x_c).abs() < 0.15);
        assert!((lead.x_minus - cat.x_c).abs() < 0.15);
        assert!(trail.x_plus > lead.x_minus);
    }
}
