use super::{NumericsError, QuadratureKind, QuadratureRule};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

// Node tables are pure functions of n; memoizing them keeps repeated
// singular-weight quadratures from re-running the Newton solve for the
// Legendre roots on every call.
static GL_CACHE: OnceLock<RwLock<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();

pub(crate) fn gauss_legendre_table(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    let cache = GL_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = cache.read().expect("poisoned").get(&n) {
        return hit.clone();
    }
    let fresh = Arc::new(gauss_legendre_nodes(n));
    cache
        .write()
        .expect("poisoned")
        .entry(n)
        .or_insert(fresh)
        .clone()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence. Accurate to a few ulp for the node counts used
/// here.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // One polishing step.
        let (p, dp) = legendre_with_derivative(n, x);
        x -= p / dp;
        let pp = legendre_with_derivative(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrates `f` against an inverse-square-root endpoint weight over
/// `[a, b]` with a Gauss-type rule of `rule.nodes` points:
///
/// * `ChebyshevSqrtRight`: `integral of f(x) / sqrt(b - x)`,
/// * `ChebyshevSqrtLeft`:  `integral of f(x) / sqrt(x - a)`,
/// * `ChebyshevBoth`:      `integral of f(x) / sqrt((x - a)(b - x))`.
///
/// Each rule is exact for polynomial `f` up to degree `2 * nodes - 1` and
/// converges spectrally for analytic `f`.
pub fn quad_sqrt_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rule: QuadratureRule,
) -> Result<f64, NumericsError> {
    if rule.nodes < 2 {
        return Err(NumericsError::InvalidRule("node count must be >= 2"));
    }
    if !(b > a) {
        return Err(NumericsError::InvalidRule("interval must satisfy a < b"));
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    match rule.kind {
        QuadratureKind::Adaptive => Err(NumericsError::InvalidRule(
            "adaptive rule carries no endpoint weight; use quad_adaptive",
        )),
        QuadratureKind::ChebyshevBoth => {
            // Classic Gauss-Chebyshev: nodes cos((2j-1)pi/2n), weights pi/n.
            let n = rule.nodes;
            let mut sum = 0.0;
            for j in 1..=n {
                let t = (PI * (2.0 * j as f64 - 1.0) / (2.0 * n as f64)).cos();
                sum += f(mid + half * t);
            }
            Ok(sum * PI / n as f64)
        }
        QuadratureKind::ChebyshevSqrtRight => Ok(half.sqrt() * one_sided(|t| f(mid + half * t), rule.nodes)),
        QuadratureKind::ChebyshevSqrtLeft => {
            // Reflect x -> a + b - x to reuse the right-endpoint rule.
            Ok(half.sqrt() * one_sided(|t| f(mid - half * t), rule.nodes))
        }
    }
}

/// Gauss rule for `integral over [-1,1] of g(t) (1-t)^(-1/2) dt`.
///
/// Substituting `t = 1 - 2 s^2` gives `sqrt(2) * integral over [-1,1] of
/// g(1-2s^2) ds`; the even fold of the `2n`-point Gauss-Legendre rule then
/// yields an `n`-point rule exact for `g` up to degree `2n - 1`.
fn one_sided<G: Fn(f64) -> f64>(g: G, n: usize) -> f64 {
    let table = gauss_legendre_table(2 * n);
    let (s, w) = (&table.0, &table.1);
    let mut sum = 0.0;
    for j in 0..n {
        // Positive nodes sit in the upper half of the sorted array.
        let sj = s[n + j];
        sum += 2.0 * w[n + j] * g(1.0 - 2.0 * sj * sj);
    }
    std::f64::consts::SQRT_2 * sum
}

/// Node-doubling driver: starts at `start` nodes (default policy: 200),
/// doubles until two successive results differ by less than
/// `rel_tol * |result|` (cap 3200), and returns the finest result.
pub(crate) fn quad_sqrt_converged<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    kind: QuadratureKind,
    start: usize,
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    let mut n = start.max(2);
    let mut prev = quad_sqrt_singular(&f, a, b, QuadratureRule { kind, nodes: n })?;
    while 2 * n <= super::CHEBYSHEV_MAX_NODES {
        n *= 2;
        let next = quad_sqrt_singular(&f, a, b, QuadratureRule { kind, nodes: n })?;
        if (next - prev).abs() <= rel_tol * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}
