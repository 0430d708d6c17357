use super::q_function::q_with_gradient;
use super::{ModulationError, WhithamState, DEGENERATE_GAP};
use crate::initial_data::InitialDataModel;
use crate::numerics::{newton_system, ToleranceConfig};
use crate::special::elliptic_ke;

/// Characteristic speeds `v_i` and hodograph data `w_i` of the Whitham
/// system at one triple of Riemann invariants.
#[derive(Debug, Clone, Copy)]
pub struct WhithamVelocities {
    pub v: [f64; 3],
    pub w: [f64; 3],
    /// Elliptic modulus `s`, `s^2 = (b2-b3)/(b1-b3)`.
    pub s: f64,
    /// `alpha = -b1 + (b1-b3) E/K`.
    pub alpha: f64,
    pub q: f64,
    pub dq: [f64; 3],
}

/// Whitham characteristic speeds
/// `v_i = 4 prod_{k != i}(b_i - b_k) / (b_i + alpha) + 2(b1+b2+b3)`
/// and the hodograph right-hand sides
/// `w_i = (v_i - 2 sum b) / 2 * dq/db_i + q`.
pub fn whitham_velocities(
    beta: [f64; 3],
    model: &InitialDataModel,
) -> Result<WhithamVelocities, ModulationError> {
    let [b1, b2, b3] = beta;
    if !(b1 > b2 && b2 > b3) {
        return Err(ModulationError::Domain("need b1 > b2 > b3"));
    }
    if b1 - b2 < DEGENERATE_GAP || b2 - b3 < DEGENERATE_GAP {
        return Err(ModulationError::DegenerateGap);
    }
    let s2 = (b2 - b3) / (b1 - b3);
    let s = s2.sqrt();
    let pair = elliptic_ke(s).map_err(|_| ModulationError::Domain("modulus outside [0,1)"))?;
    let alpha = -b1 + (b1 - b3) * pair.e / pair.k;
    // Denominators b_i + alpha written without the catastrophic b2 - b1
    // cancellation near the edges: (K-E)/K keeps full relative accuracy.
    let kme = pair.k_minus_e / pair.k;
    let denoms = [
        (b1 - b3) * pair.e / pair.k,
        (b2 - b3) - (b1 - b3) * kme,
        -(b1 - b3) * kme,
    ];
    let sum = b1 + b2 + b3;
    let (q, dq) = q_with_gradient(b1, b2, b3, model)?;
    let mut v = [0.0; 3];
    let mut w = [0.0; 3];
    for i in 0..3 {
        let bi = beta[i];
        let prod: f64 = (0..3).filter(|&k| k != i).map(|k| bi - beta[k]).product();
        let denom = denoms[i];
        if denom.abs() < 1e-300 {
            return Err(ModulationError::DegenerateGap);
        }
        v[i] = 4.0 * prod / denom + 2.0 * sum;
        w[i] = 0.5 * (v[i] - 2.0 * sum) * dq[i] + q;
    }
    Ok(WhithamVelocities {
        v,
        w,
        s,
        alpha,
        q,
        dq,
    })
}

/// Residuals of the hodograph equations `x = v_i t + w_i`.
pub(crate) fn hodograph_residual(
    beta: [f64; 3],
    x: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<[f64; 3], ModulationError> {
    let vel = whitham_velocities(beta, model)?;
    Ok([
        vel.v[0] * t + vel.w[0] - x,
        vel.v[1] * t + vel.w[1] - x,
        vel.v[2] * t + vel.w[2] - x,
    ])
}

fn betas_admissible(beta: &[f64]) -> bool {
    beta[0] > beta[1]
        && beta[1] > beta[2]
        && beta[0] < 0.0
        && beta[2] > -1.0
        && beta[0] - beta[1] > DEGENERATE_GAP
        && beta[1] - beta[2] > DEGENERATE_GAP
}

/// Damped Newton on the three hodograph equations at fixed `(x, t)`.
pub(crate) fn solve_fixed_x(
    seed: [f64; 3],
    x: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<[f64; 3], ModulationError> {
    let f = |b: &[f64]| -> Vec<f64> {
        if !betas_admissible(b) {
            return vec![f64::NAN; 3];
        }
        match hodograph_residual([b[0], b[1], b[2]], x, t, model) {
            Ok(r) => r.to_vec(),
            Err(_) => vec![f64::NAN; 3],
        }
    };
    let cfg = ToleranceConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_iter: 60,
    };
    let sol = newton_system(f, &seed, None, &cfg)
        .map_err(|e| ModulationError::OutsideCusp(format!("Newton at x={x}: {e}")))?;
    Ok([sol[0], sol[1], sol[2]])
}

/// Which invariant gap a bordered continuation step prescribes.
#[derive(Debug, Clone, Copy)]
pub(crate) enum GapKind {
    /// `b1 - b2` (trailing side).
    Upper,
    /// `b2 - b3` (leading side).
    Lower,
}

/// Continuation solve with a prescribed invariant gap: the merging pair is
/// parametrized as `midpoint +- gap/2` so the gap is held exactly, and `x`
/// joins the unknowns. This stays well conditioned arbitrarily close to the
/// edges, where fixing `x` is not.
pub(crate) fn solve_fixed_gap(
    seed_beta: [f64; 3],
    seed_x: f64,
    gap: f64,
    kind: GapKind,
    t: f64,
    model: &InitialDataModel,
) -> Result<([f64; 3], f64), ModulationError> {
    let assemble = |z: &[f64]| -> [f64; 3] {
        match kind {
            // unknowns (midpoint of b1,b2; b3; x)
            GapKind::Upper => [z[0] + 0.5 * gap, z[0] - 0.5 * gap, z[1]],
            // unknowns (b1; midpoint of b2,b3; x)
            GapKind::Lower => [z[0], z[1] + 0.5 * gap, z[1] - 0.5 * gap],
        }
    };
    let f = |z: &[f64]| -> Vec<f64> {
        let b = assemble(z);
        if !betas_admissible(&b) {
            return vec![f64::NAN; 3];
        }
        match hodograph_residual(b, z[2], t, model) {
            Ok(r) => r.to_vec(),
            Err(_) => vec![f64::NAN; 3],
        }
    };
    // Residual noise grows like eps/gap through the confluent denominators;
    // keep the target above it.
    let cfg = ToleranceConfig {
        abs_tol: 1e-10f64.max(3e-17 / gap),
        rel_tol: 1e-10,
        max_iter: 60,
    };
    let seed = match kind {
        GapKind::Upper => [0.5 * (seed_beta[0] + seed_beta[1]), seed_beta[2], seed_x],
        GapKind::Lower => [seed_beta[0], 0.5 * (seed_beta[1] + seed_beta[2]), seed_x],
    };
    let sol = newton_system(f, &seed, None, &cfg)
        .map_err(|e| ModulationError::ContinuationFailed(format!("gap {gap:.3e}: {e}")))?;
    Ok((assemble(&sol), sol[2]))
}

/// Solves the hodograph system at `(x, t)` inside the cusp.
///
/// With a seed the Newton iteration starts there directly. Without one, the
/// solver seeds itself at the trailing edge (computable independently from
/// the confluent system) with a small prescribed gap `b1 - b2`, then marches
/// `x` inward with adaptive steps.
pub fn whitham_solve(
    x: f64,
    t: f64,
    model: &InitialDataModel,
    seed: Option<&WhithamState>,
) -> Result<WhithamState, ModulationError> {
    let accepted = |beta: [f64; 3]| -> Result<WhithamState, ModulationError> {
        let residual = hodograph_residual(beta, x, t, model)?;
        let state = WhithamState {
            beta1: beta[0],
            beta2: beta[1],
            beta3: beta[2],
            x,
            t,
            residual,
        };
        state.validate()?;
        Ok(state)
    };

    if let Some(s) = seed {
        let beta = solve_fixed_x(s.betas(), x, t, model)?;
        return accepted(beta);
    }

    let cat = model.catastrophe()?;
    if t <= cat.t_c {
        return Err(ModulationError::NotPastCatastrophe { t, t_c: cat.t_c });
    }
    let edge = super::edges::trailing_edge(t, model)?;
    if x >= edge.x_plus {
        return Err(ModulationError::OutsideCusp(format!(
            "x = {x} lies at or beyond the trailing edge x+ = {}",
            edge.x_plus
        )));
    }

    // Enter the cusp with a prescribed small gap; delta0 halves on failure.
    let mut delta0 = 1e-4;
    let mut entry = None;
    for _ in 0..12 {
        let seed_beta = [
            edge.v + 0.5 * delta0,
            edge.v - 0.5 * delta0,
            edge.u,
        ];
        match solve_fixed_gap(seed_beta, edge.x_plus, delta0, GapKind::Upper, t, model) {
            Ok(pair) => {
                entry = Some(pair);
                break;
            }
            Err(_) => delta0 *= 0.5,
        }
    }
    let (mut beta, mut x_cur) = entry.ok_or_else(|| {
        ModulationError::ContinuationFailed("failed to enter the cusp at the trailing edge".into())
    })?;

    if x > x_cur {
        // Target sits between the entry point and the edge: home in on it by
        // bisecting the prescribed gap (x is monotone in the gap there).
        let mut lo_gap = beta[0] - beta[1]; // x(lo_gap) = x_cur < x
        let mut hi_gap = lo_gap * 1e-8; // gap -> 0 gives x -> x_plus > x
        for _ in 0..200 {
            let mid = (lo_gap * hi_gap).sqrt();
            let (b_mid, x_mid) = solve_fixed_gap(beta, x_cur, mid, GapKind::Upper, t, model)?;
            if x_mid < x {
                lo_gap = mid;
            } else {
                hi_gap = mid;
            }
            beta = b_mid;
            x_cur = x_mid;
            if (x_mid - x).abs() < 1e-12 * x.abs().max(1.0) || lo_gap / hi_gap < 1.0 + 1e-14 {
                break;
            }
        }
        let beta = solve_fixed_x(beta, x, t, model)?;
        return accepted(beta);
    }

    // March x downward with adaptive steps.
    let mut step = ((x_cur - x) / 16.0).max(1e-4);
    let mut guard = 0;
    while x_cur > x {
        guard += 1;
        if guard > 100_000 {
            return Err(ModulationError::ContinuationFailed(
                "continuation stalled while marching toward the target".into(),
            ));
        }
        let next_x = (x_cur - step).max(x);
        match solve_fixed_x(beta, next_x, t, model) {
            Ok(b) => {
                beta = b;
                x_cur = next_x;
                step *= 1.6;
            }
            Err(_) => {
                step *= 0.5;
                if step < 1e-13 {
                    return Err(ModulationError::OutsideCusp(format!(
                        "continuation stalled at x = {x_cur} on the way to {x}"
                    )));
                }
            }
        }
    }
    let beta = solve_fixed_x(beta, x, t, model)?;
    accepted(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_sech2_profile;

    #[test]
    fn velocity_reduces_to_hopf_speed_at_leading_degeneracy() {
        // As b2 -> b3, E/K -> 1 and v1 -> 6 b1.
        let m = make_sech2_profile();
        let b1 = -0.3;
        let mut gap = 1e-3;
        for _ in 0..3 {
            let vel = whitham_velocities([b1, -0.7, -0.7 - gap], &m).unwrap();
            assert!(
                (vel.v[0] - 6.0 * b1).abs() < 40.0 * gap,
                "gap={gap}: v1={} vs {}",
                vel.v[0],
                6.0 * b1
            );
            gap *= 0.1;
        }
    }

    #[test]
    fn velocities_sorted_at_interior_point() {
        let m = make_sech2_profile();
        let vel = whitham_velocities([-0.3, -0.5, -0.8], &m).unwrap();
        assert!(vel.v[0] > vel.v[1], "v1={} v2={}", vel.v[0], vel.v[1]);
    }

    #[test]
    fn degenerate_gap_rejected() {
        let m = make_sech2_profile();
        let e = whitham_velocities([-0.3, -0.3 + 1e-13, -0.8], &m).unwrap_err();
        assert!(matches!(
            e,
            ModulationError::DegenerateGap | ModulationError::Domain(_)
        ));
    }

    #[test]
    fn constant_q_stub_gives_w_equal_q() {
        // With dq = 0 the w_i all collapse to q.
        let vel_w = |v: f64, sum: f64, dq: f64, q: f64| 0.5 * (v - 2.0 * sum) * dq + q;
        assert_eq!(vel_w(3.7, -1.0, 0.0, -2.5), -2.5);
    }
}
