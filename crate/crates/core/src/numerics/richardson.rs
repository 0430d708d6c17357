use super::NumericsError;

/// A derivative estimate together with an error indicator.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Indicator from the extrapolation table; bounds the true error on
    /// smooth functions up to a modest factor.
    pub error: f64,
}

const LEVELS: usize = 6;

/// Central-difference derivative of order 1 or 2 at `x`, Richardson-
/// extrapolated over successive step halvings starting from `h0`.
///
/// Fails with `NoiseDominated` when halving the step only amplifies rounding
/// noise (the extrapolants diverge from the first level on).
pub fn derivative_richardson<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    h0: f64,
    order: u8,
) -> Result<DerivativeEstimate, NumericsError> {
    assert!(order == 1 || order == 2, "order must be 1 or 2");
    assert!(h0 > 0.0 && h0.is_finite(), "h0 must be positive");

    let diff = |h: f64| -> f64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            _ => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        }
    };

    // Ridders-style table: rows halve the step, columns cancel powers of h^2.
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut best = DerivativeEstimate {
        value: f64::NAN,
        error: f64::INFINITY,
    };
    let mut h = h0;
    let mut worsened = 0usize;
    let mut rows = LEVELS;
    for i in 0..LEVELS {
        table[i][0] = diff(h);
        let mut fac = 4.0;
        for j in 1..=i {
            table[i][j] = (fac * table[i][j - 1] - table[i - 1][j - 1]) / (fac - 1.0);
            fac *= 4.0;
            let err = (table[i][j] - table[i][j - 1])
                .abs()
                .max((table[i][j] - table[i - 1][j - 1]).abs());
            if err <= best.error {
                best = DerivativeEstimate {
                    value: table[i][j],
                    error: err,
                };
            }
        }
        if i >= 1 {
            let row_gap = (table[i][i] - table[i - 1][i - 1]).abs();
            if row_gap > 2.0 * best.error && best.error.is_finite() {
                worsened += 1;
                if worsened >= 2 {
                    rows = i + 1;
                    break; // deeper halvings only add rounding noise
                }
            }
        }
        h *= 0.5;
    }
    if !best.value.is_finite() {
        return Err(NumericsError::NoiseDominated);
    }
    // Divergence check on the raw differences: if no halving ever shrank the
    // first-column gap, the samples carry no derivative information at this
    // scale.
    let scale = f64::EPSILON * (1.0 + best.value.abs()) / h0;
    let mut improved = false;
    let mut last_gap = 0.0;
    for i in 1..rows {
        let gap = (table[i][0] - table[i - 1][0]).abs();
        if gap < 0.5 * last_gap || gap <= scale {
            improved = true;
        }
        last_gap = gap;
    }
    if rows > 2 && !improved && last_gap > scale {
        return Err(NumericsError::NoiseDominated);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_at_zero() {
        let d = derivative_richardson(f64::sin, 0.0, 0.1, 1).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_second_derivative() {
        let d = derivative_richardson(|x: f64| x.powi(3), 2.0, 0.1, 2).unwrap();
        assert!((d.value - 12.0).abs() < 1e-9);
    }

    #[test]
    fn exp_at_one() {
        let d = derivative_richardson(f64::exp, 1.0, 0.1, 1).unwrap();
        assert!((d.value - std::f64::consts::E).abs() < 1e-11);
    }

    // The error indicator must bound the true error within a factor 10 on
    // a smooth test set.
    #[test]
    fn indicator_bounds_error() {
        let cases: [(fn(f64) -> f64, fn(f64) -> f64, f64); 3] = [
            (f64::sin, f64::cos, 0.7),
            (f64::exp, f64::exp, 1.3),
            (|x| x.powi(5), |x| 5.0 * x.powi(4), 1.5),
        ];
        for (f, df, x) in cases {
            let d = derivative_richardson(f, x, 0.2, 1).unwrap();
            let true_err = (d.value - df(x)).abs();
            assert!(
                true_err <= 10.0 * d.error.max(1e-16),
                "true {true_err:.3e} vs indicator {:.3e}",
                d.error
            );
        }
    }

    #[test]
    fn noise_dominated_detected() {
        // A jump inside the stencil: the central differences grow like 1/h,
        // so successive extrapolants diverge.
        let step = |x: f64| if x > 0.3 { 1.0 } else { 0.0 };
        let r = derivative_richardson(step, 0.3, 0.1, 1);
        assert!(
            matches!(r, Err(NumericsError::NoiseDominated)),
            "expected NoiseDominated, got {r:?}"
        );
    }
}
