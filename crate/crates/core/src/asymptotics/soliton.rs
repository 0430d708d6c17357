use super::AsymptoticsError;
use crate::initial_data::InitialDataModel;
use crate::modulation::{trailing_edge, TrailingEdgePoint, WhithamState};
use crate::special::hermite_norm;
use std::collections::BTreeMap;

/// Terms with `|X_k|` beyond this bound contribute less than 1.8e-35 and
/// are dropped.
const XK_CUTOFF: f64 = 40.0;

/// The trailing-edge soliton-train value at one scaling point `y`.
#[derive(Debug, Clone)]
pub struct SolitonSumResult {
    /// Scaling variable `y = 2 sqrt(v-u) (x - x+) / (eps ln eps)`.
    pub y: f64,
    /// Non-negative integer closest to `y`.
    pub k: u32,
    /// `y - k`; in `[-1/2, 1/2]` once `y >= -1/2`.
    pub delta_k: f64,
    /// Retained pulse phases `X_k`.
    pub x: BTreeMap<u32, f64>,
    /// `u + 2(v-u) sum of sech^2(X_k)`.
    pub u_value: f64,
    pub terms_used: usize,
}

/// Pulse phase of the expansion:
/// `X_k = (1/2)(1/2 - y + k) ln eps - ln(sqrt(2 pi) h_k) - (k + 1/2) ln gamma`.
pub fn xk_eval(y: f64, k: u32, eps: f64, edge: &TrailingEdgePoint) -> Result<f64, AsymptoticsError> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(AsymptoticsError::Domain("eps must lie in (0, 1)"));
    }
    let (_, ln_hk) = hermite_norm(k)?;
    let ln_eps = eps.ln();
    Ok(0.5 * (0.5 - y + f64::from(k)) * ln_eps
        - (0.5 * (2.0 * std::f64::consts::PI).ln() + ln_hk)
        - (f64::from(k) + 0.5) * edge.gamma.ln())
}

/// Converts the physical coordinate to the trailing-edge scaling variable:
/// `y = 2 sqrt(v-u) (x - x+) / (eps ln eps)` (note `ln eps < 0`).
pub fn y_of_x(x: f64, eps: f64, edge: &TrailingEdgePoint) -> f64 {
    2.0 * (edge.v - edge.u).sqrt() * (x - edge.x_plus) / (eps * eps.ln())
}

/// Inverse conversion: `x = x+ + eps ln(eps) y / (2 sqrt(v-u))`.
pub fn x_of_y(y: f64, eps: f64, edge: &TrailingEdgePoint) -> f64 {
    edge.x_plus + eps * eps.ln() * y / (2.0 * (edge.v - edge.u).sqrt())
}

/// Soliton-train expansion at scaling point `y` for a precomputed edge.
///
/// Sums `sech^2(X_k)` over the window of `k` where the expansion carries
/// weight. `X_k` decreases without bound in `k` past the pulse window (the
/// factorial growth of `1/h_k` only reverses this far outside the
/// expansion's validity, at `k` of order `1/eps`), so the sum stops at the
/// first `k` past `y` with `X_k` below the cutoff.
pub fn soliton_sum_with_edge(
    y: f64,
    eps: f64,
    edge: &TrailingEdgePoint,
) -> Result<SolitonSumResult, AsymptoticsError> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(AsymptoticsError::Domain("eps must lie in (0, 1)"));
    }
    let mut terms = BTreeMap::new();
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        let xk = xk_eval(y, k, eps, edge)?;
        if xk.abs() <= XK_CUTOFF {
            let sech = 1.0 / xk.cosh();
            sum += sech * sech;
            terms.insert(k, xk);
        }
        if f64::from(k) > y && xk < -XK_CUTOFF {
            break;
        }
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    let nearest = y.round().max(0.0) as u32;
    Ok(SolitonSumResult {
        y,
        k: nearest,
        delta_k: y - f64::from(nearest),
        terms_used: terms.len(),
        x: terms,
        u_value: edge.u + 2.0 * (edge.v - edge.u) * sum,
    })
}

/// Soliton-train expansion at `(y, t, eps)`, computing the trailing edge
/// internally.
pub fn soliton_sum(
    y: f64,
    t: f64,
    eps: f64,
    model: &InitialDataModel,
) -> Result<SolitonSumResult, AsymptoticsError> {
    let edge = trailing_edge(t, model)?;
    soliton_sum_with_edge(y, eps, &edge)
}

/// Formal trailing limit of the elliptic solution:
/// `u + 2(v-u) sech^2[ (x-x+) sqrt(v-u)/eps + (k+1/2) ln(8/(1-s)) ]`,
/// with the modulus taken from a modulated state near the edge.
pub fn formal_trailing(
    x: f64,
    eps: f64,
    k: u32,
    edge: &TrailingEdgePoint,
    state: &WhithamState,
) -> f64 {
    formal_trailing_with_modulus(x, eps, k, edge, state.modulus())
}

/// Kernel of the formal limit with the modulus supplied directly (used for
/// matched-modulus comparisons against the rigorous expansion).
pub fn formal_trailing_with_modulus(
    x: f64,
    eps: f64,
    k: u32,
    edge: &TrailingEdgePoint,
    s: f64,
) -> f64 {
    let amp = edge.v - edge.u;
    let phase =
        (x - edge.x_plus) * amp.sqrt() / eps + (f64::from(k) + 0.5) * (8.0 / (1.0 - s)).ln();
    let sech = 1.0 / phase.cosh();
    edge.u + 2.0 * amp * sech * sech
}
