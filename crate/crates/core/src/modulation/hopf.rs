use super::ModulationError;
use crate::initial_data::InitialDataModel;
use crate::numerics::{find_root_bracketed, ToleranceConfig};

/// One characteristic branch of the Hopf solution at `(x, t)`.
#[derive(Debug, Clone, Copy)]
pub struct HopfBranch {
    /// Characteristic foot: solves `x = xi + 6 u0(xi) t`.
    pub xi: f64,
    /// Transported value `u0(xi)`.
    pub u: f64,
}

/// All characteristic branches through `(x, t)`, sorted by `u`.
#[derive(Debug, Clone)]
pub struct HopfSolution {
    pub branches: Vec<HopfBranch>,
}

impl HopfSolution {
    /// More than one characteristic reaches the point (inside the fold).
    pub fn is_multivalued(&self) -> bool {
        self.branches.len() > 1
    }

    /// The branch value when single-valued.
    pub fn single(&self) -> Option<f64> {
        (self.branches.len() == 1).then(|| self.branches[0].u)
    }
}

const SCAN_POINTS: usize = 4000;

/// Solves the Hopf equation `u_t + 6 u u_x = 0` by characteristics:
/// finds every `xi` with `x = xi + 6 u0(xi) t` and returns `u = u0(xi)`
/// per branch. Before the catastrophe time there is exactly one branch;
/// inside the fold there are three.
pub fn hopf_solve(
    x: f64,
    t: f64,
    model: &InitialDataModel,
) -> Result<HopfSolution, ModulationError> {
    if !(t >= 0.0) {
        return Err(ModulationError::Domain("t must be non-negative"));
    }
    if t == 0.0 {
        return Ok(HopfSolution {
            branches: vec![HopfBranch {
                xi: x,
                u: model.u0(x),
            }],
        });
    }
    // u0 in (-1, 0) confines every root to [x, x + 6t].
    let lo = x - 1e-9;
    let hi = x + 6.0 * t + 1e-9;
    let g = |xi: f64| xi + 6.0 * model.u0(xi) * t - x;
    let cfg = ToleranceConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_iter: 200,
    };
    let mut branches = Vec::new();
    let mut prev_xi = lo;
    let mut prev_g = g(lo);
    for i in 1..=SCAN_POINTS {
        let xi = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let gi = g(xi);
        if prev_g == 0.0 {
            push_unique(&mut branches, prev_xi, model);
        } else if prev_g.signum() != gi.signum() {
            let root = find_root_bracketed(g, prev_xi, xi, &cfg)?;
            push_unique(&mut branches, root, model);
        }
        prev_xi = xi;
        prev_g = gi;
    }
    if branches.is_empty() {
        // Can only happen by grid misfortune at a tangency; fall back to the
        // monotone bracket endpoints.
        let root = find_root_bracketed(g, lo, hi, &cfg)?;
        push_unique(&mut branches, root, model);
    }
    branches.sort_by(|a, b| a.u.total_cmp(&b.u));
    Ok(HopfSolution { branches })
}

fn push_unique(branches: &mut Vec<HopfBranch>, xi: f64, model: &InitialDataModel) {
    if branches.iter().all(|b| (b.xi - xi).abs() > 1e-9) {
        branches.push(HopfBranch {
            xi,
            u: model.u0(xi),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::make_sech2_profile;

    #[test]
    fn t_zero_echoes_initial_data() {
        let m = make_sech2_profile();
        for x in [-2.0, -0.3, 0.0, 1.7] {
            let s = hopf_solve(x, 0.0, &m).unwrap();
            assert_eq!(s.branches.len(), 1);
            assert!((s.branches[0].u - m.u0(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn decays_far_from_hump() {
        let m = make_sech2_profile();
        for x in [-30.0, 30.0] {
            let s = hopf_solve(x, 0.1, &m).unwrap();
            assert!(!s.is_multivalued());
            assert!(s.branches[0].u.abs() < 1e-10);
        }
    }

    // Golden case certified by its defining residual.
    #[test]
    fn single_valued_before_breaking() {
        let m = make_sech2_profile();
        let (x, t) = (-1.0, 0.1);
        let s = hopf_solve(x, t, &m).unwrap();
        assert_eq!(s.branches.len(), 1, "t < t_c must be single-valued");
        let xi = s.branches[0].xi;
        assert!((x - xi - 6.0 * m.u0(xi) * t).abs() < 1e-12);
    }

    #[test]
    fn three_branches_inside_fold() {
        let m = make_sech2_profile();
        let c = m.catastrophe().unwrap();
        // Follow the critical characteristic slightly past breaking.
        let t = c.t_c + 0.05;
        let x = c.xi_c + 6.0 * c.u_c * t;
        let s = hopf_solve(x, t, &m).unwrap();
        assert_eq!(s.branches.len(), 3, "expected a fold at {x}, {t}");
        assert!(s.is_multivalued());
        // Branches sorted by u.
        assert!(s.branches[0].u < s.branches[1].u);
        assert!(s.branches[1].u < s.branches[2].u);
    }
}
