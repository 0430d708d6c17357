use super::{NumericsError, ToleranceConfig};

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_2,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH_DEFAULT: usize = 50;
// Total panel budget; protects against tolerance targets below the
// integrand's noise floor.
const MAX_PANELS: usize = 4000;

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Either endpoint may be infinite; semi-infinite ranges are mapped
/// rationally (`x = a + s/(1-s)`) rather than truncated. Converges when the
/// summed error estimate drops below `max(abs_tol, rel_tol * |result|)`.
pub fn quad_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &ToleranceConfig,
) -> Result<f64, NumericsError> {
    cfg.validate()?;
    match (a.is_infinite(), b.is_infinite()) {
        (false, false) => quad_finite(&f, a, b, cfg),
        (false, true) => {
            // x = a + s/(1-s), dx = ds/(1-s)^2
            quad_finite(
                &|s: f64| {
                    let om = 1.0 - s;
                    let v = f(a + s / om) / (om * om);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                cfg,
            )
        }
        (true, false) => {
            // x = b - s/(1-s)
            quad_finite(
                &|s: f64| {
                    let om = 1.0 - s;
                    let v = f(b - s / om) / (om * om);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                cfg,
            )
        }
        (true, true) => {
            let left = quad_finite(
                &|s: f64| {
                    let om = 1.0 - s;
                    let v = f(-s / om) / (om * om);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                cfg,
            )?;
            let right = quad_finite(
                &|s: f64| {
                    let om = 1.0 - s;
                    let v = f(s / om) / (om * om);
                    if v.is_finite() {
                        v
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
                cfg,
            )?;
            Ok(left + right)
        }
    }
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: usize,
}

fn quad_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &ToleranceConfig,
) -> Result<f64, NumericsError> {
    let (v, e) = gk15(f, a, b);
    let mut intervals = vec![Interval {
        a,
        b,
        value: v,
        error: e,
        depth: 0,
    }];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.value).sum();
        let err: f64 = intervals.iter().map(|iv| iv.error).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            return Ok(total);
        }
        // Split the interval with the largest error estimate.
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i)
            .unwrap();
        let iv = intervals.swap_remove(worst);
        if iv.depth >= MAX_DEPTH_DEFAULT || intervals.len() >= MAX_PANELS {
            return Err(NumericsError::NonConvergent(MAX_DEPTH_DEFAULT));
        }
        let mid = 0.5 * (iv.a + iv.b);
        for (lo, hi) in [(iv.a, mid), (mid, iv.b)] {
            let (v, e) = gk15(f, lo, hi);
            intervals.push(Interval {
                a: lo,
                b: hi,
                value: v,
                error: e,
                depth: iv.depth + 1,
            });
        }
    }
}

/// One Gauss-Kronrod 15(7) panel; returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut result_k = WGK[7] * fc;
    let mut result_g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let fsum = f(c - x) + f(c + x);
        result_k += WGK[j] * fsum;
        if j % 2 == 1 {
            result_g += WG[j / 2] * fsum;
        }
    }
    result_k *= h;
    result_g *= h;
    // The Gauss/Kronrod discrepancy overestimates the K15 error, which makes
    // it a safe (if conservative) refinement driver.
    let diff = (result_k - result_g).abs();
    (result_k, diff.max(4.0 * f64::EPSILON * result_k.abs()))
}
