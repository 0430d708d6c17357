use super::{NumericsError, ToleranceConfig};

/// Finds a root of `f` in `[a, b]` by Brent's method (bisection safeguarded
/// with secant / inverse quadratic interpolation).
///
/// Requires `f(a) * f(b) <= 0`. Terminates when `|f(x)| <= abs_tol` or the
/// bracket width drops below `rel_tol * |x| + abs_tol`.
pub fn find_root_bracketed<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &ToleranceConfig,
) -> Result<f64, NumericsError> {
    cfg.validate()?;
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange);
    }

    // c is the previous iterate; (b, fb) is kept as the best point.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = b - a;

    for _ in 0..cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (cfg.rel_tol * b.abs() + cfg.abs_tol);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= cfg.abs_tol {
            return Ok(b);
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            // Interpolation is making no progress; bisect.
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // Secant step.
                (2.0 * m * s, 1.0 - s)
            } else {
                // Inverse quadratic interpolation.
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min(e.abs() * q.abs() * 0.5) * 2.0
                && 2.0 * p < (3.0 * m * q).abs()
            {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
    }
    Err(NumericsError::MaxIterExceeded(cfg.max_iter))
}
