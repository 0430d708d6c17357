use super::{NumericsError, ToleranceConfig};

/// Damped Newton iteration for small dense systems `F(x) = 0`.
///
/// The Jacobian is formed by central finite differences with step
/// `sqrt(machine eps) * max(1, |x_i|)` unless `jacobian` supplies an analytic
/// one. Steps are halved (up to 30 times) until the residual norm decreases.
/// Converges when `||F(x)||_inf <= abs_tol`.
pub fn newton_system<F>(
    f: F,
    x0: &[f64],
    jacobian: Option<&dyn Fn(&[f64]) -> Vec<Vec<f64>>>,
    cfg: &ToleranceConfig,
) -> Result<Vec<f64>, NumericsError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    cfg.validate()?;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    assert_eq!(fx.len(), n, "F must return an n-vector");

    for _ in 0..cfg.max_iter {
        let res = inf_norm(&fx);
        if res <= cfg.abs_tol {
            return Ok(x);
        }
        let jac = match jacobian {
            Some(j) => j(&x),
            None => fd_jacobian(&f, &x, &fx),
        };
        let rhs: Vec<f64> = fx.iter().map(|v| -v).collect();
        let step = solve_dense(jac, rhs)?;

        // Line-search damping: halve until the residual improves.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&step)
                .map(|(xi, si)| xi + lambda * si)
                .collect();
            let ftrial = f(&trial);
            let rtrial = inf_norm(&ftrial);
            if rtrial.is_finite() && rtrial < res {
                x = trial;
                fx = ftrial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(NumericsError::MaxIterExceeded(cfg.max_iter));
        }
    }
    if inf_norm(&fx) <= cfg.abs_tol {
        Ok(x)
    } else {
        Err(NumericsError::MaxIterExceeded(cfg.max_iter))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn fd_jacobian<F>(f: &F, x: &[f64], _fx: &[f64]) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; n];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = f64::EPSILON.sqrt() * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..n {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Gaussian elimination with partial pivoting; adequate for the 2x2-4x4
/// systems this crate solves.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, NumericsError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(NumericsError::SingularJacobian);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            if m != 0.0 {
                for k in col..n {
                    a[row][k] -= m * a[col][k];
                }
                b[row] -= m * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        if a[row][row].abs() < 1e-300 {
            return Err(NumericsError::SingularJacobian);
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn linear_system() {
        let sol = newton_system(
            |x| vec![x[0] - 1.0, x[1] + 2.0],
            &[0.0, 0.0],
            None,
            &cfg(),
        )
        .unwrap();
        assert!((sol[0] - 1.0).abs() < 1e-12);
        assert!((sol[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_quadratic() {
        let sol = newton_system(|x| vec![x[0] * x[0] - 4.0], &[3.0], None, &cfg()).unwrap();
        assert!((sol[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn circle_line_intersection() {
        let sol = newton_system(
            |x| vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]],
            &[1.0, 0.0],
            None,
            &cfg(),
        )
        .unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol[0] - r).abs() < 1e-10);
        assert!((sol[1] - r).abs() < 1e-10);
    }

    #[test]
    fn singular_jacobian_detected() {
        let err = newton_system(
            |x| vec![x[0] + x[1], x[0] + x[1]],
            &[1.0, 1.0],
            None,
            &cfg(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            NumericsError::SingularJacobian | NumericsError::MaxIterExceeded(_)
        ));
    }

    #[test]
    fn analytic_jacobian_path() {
        let jac = |x: &[f64]| vec![vec![2.0 * x[0]]];
        let sol = newton_system(|x| vec![x[0] * x[0] - 4.0], &[3.0], Some(&jac), &cfg()).unwrap();
        assert!((sol[0] - 2.0).abs() < 1e-10);
    }
}
