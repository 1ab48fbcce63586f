use nalgebra::{DMatrix, DVector};

use super::DiscreteLinearSystem;
use crate::error::{domain, Error, Result};
use crate::series::norm2;
use crate::Series;

/// Singular values below `RANK_CUTOFF * σ_max` count as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Selection `Π x_k = (x_k[c] for c in coords)` on the nodes
/// `window_start..=window_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOperator {
    pub window_start: usize,
    pub window_end: usize,
    pub coords: Vec<usize>,
}

impl TraceOperator {
    pub fn new(window_start: usize, window_end: usize, coords: Vec<usize>) -> Result<Self> {
        if window_start > window_end {
            return Err(domain(format!("empty trace window [{window_start}, {window_end}]")));
        }
        if coords.is_empty() {
            return Err(domain("trace needs at least one coordinate"));
        }
        Ok(TraceOperator {
            window_start,
            window_end,
            coords,
        })
    }

    pub fn z_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn window_len(&self) -> usize {
        self.window_end - self.window_start + 1
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<usize> {
        self.window_start..=self.window_end
    }

    pub(crate) fn check(&self, sys: &DiscreteLinearSystem) -> Result<()> {
        if self.window_end > sys.grid().steps() {
            return Err(domain(format!(
                "trace window ends at {} beyond N = {}",
                self.window_end,
                sys.grid().steps()
            )));
        }
        if let Some(&c) = self.coords.iter().find(|&&c| c >= sys.state_dim()) {
            return Err(domain(format!("trace coordinate {c} out of range")));
        }
        Ok(())
    }

    /// `Π x` stacked over the window.
    pub fn apply(&self, x: &Series) -> Vec<f64> {
        self.nodes()
            .flat_map(|k| self.coords.iter().map(move |&c| x.node(k)[c]))
            .collect()
    }

    /// `Πᵀ z` as a full per-node series of dimension `state_dim`.
    pub fn transpose(&self, z: &[f64], nodes: usize, state_dim: usize) -> Series {
        let mut g = Series::zeros(nodes, state_dim);
        let zd = self.z_dim();
        for (w, k) in self.nodes().enumerate() {
            for (i, &c) in self.coords.iter().enumerate() {
                g.node_mut(k)[c] += z[w * zd + i];
            }
        }
        g
    }
}

/// Minimal-norm steering control and the empirical controllability
/// constant `Ĉ₁ = max(1, ‖free-response map‖) / σ_min`, all norms taken in
/// the L² metrics of the discrete spaces (control weight `dt`, state weight
/// of the system).
#[derive(Debug, Clone)]
pub struct ControllabilityReport {
    pub operator_rank: usize,
    pub needed_rank: usize,
    pub singular_values: Vec<f64>,
    pub sigma_min: f64,
    pub c1_hat: f64,
    pub u_exact: Series,
    pub residual: f64,
    dt: f64,
}

impl ControllabilityReport {
    /// `(Σ_k dt ‖u_exact,k − u_d‖²)^{1/2}`.
    pub fn control_distance(&self, u_d: &[f64]) -> f64 {
        let s: f64 = self
            .u_exact
            .iter()
            .map(|uk| uk.iter().zip(u_d).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum();
        (self.dt * s).sqrt()
    }

    pub fn control_norm(&self) -> f64 {
        self.control_distance(&vec![0.0; self.u_exact.dim()])
    }
}

fn check_target_index(sys: &DiscreteLinearSystem, k0: usize) -> Result<()> {
    if k0 == 0 || k0 > sys.grid().steps() {
        return Err(domain(format!(
            "target index {k0} must lie in [1, {}]",
            sys.grid().steps()
        )));
    }
    Ok(())
}

/// `K` and the transition matrix `A_{k₀-1} ⋯ A_0`.
fn operator_and_transition(sys: &DiscreteLinearSystem, k0: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, m) = (sys.state_dim(), sys.control_dim());
    let mut k = DMatrix::zeros(n, m * k0);
    let mut p = DMatrix::<f64>::identity(n, n);
    for j in (0..k0).rev() {
        let s = sys.step(j);
        k.view_mut((0, j * m), (n, m)).copy_from(&s.b.left_mul_dense(&p));
        p = s.a.left_mul_dense(&p);
    }
    (k, p)
}

/// Dense map from stacked controls `u_0..u_{k₀-1}` to `x_{k₀}` minus the
/// free response.
pub fn controllability_operator(sys: &DiscreteLinearSystem, k0: usize) -> Result<DMatrix<f64>> {
    check_target_index(sys, k0)?;
    Ok(operator_and_transition(sys, k0).0)
}

struct PseudoSolve {
    x: DVector<f64>,
    rank: usize,
    sigma: Vec<f64>,
}

fn min_norm_solve(k: &DMatrix<f64>, rhs: &DVector<f64>) -> PseudoSolve {
    let svd = k.clone().svd(true, true);
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = RANK_CUTOFF * smax;
    let rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut x = DVector::zeros(k.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let coef = u.column(i).dot(rhs) / s;
            x += vt.row(i).transpose() * coef;
        }
    }
    PseudoSolve { x, rank, sigma }
}

fn pad_controls(sys: &DiscreteLinearSystem, u: &Series) -> Series {
    let mut full = Series::zeros(sys.grid().steps(), sys.control_dim());
    full.as_mut_slice()[..u.as_slice().len()].copy_from_slice(u.as_slice());
    full
}

/// Minimal-norm control steering `x0` to `x_target` at node `k₀`.
pub fn min_norm_exact_control(
    sys: &DiscreteLinearSystem,
    x_target: &[f64],
    k0: usize,
) -> Result<ControllabilityReport> {
    check_target_index(sys, k0)?;
    let (n, m, dt) = (sys.state_dim(), sys.control_dim(), sys.grid().dt());
    if x_target.len() != n {
        return Err(Error::Dimension {
            step: k0,
            detail: format!("target has length {}, expected {n}", x_target.len()),
        });
    }
    let (k, phi) = operator_and_transition(sys, k0);
    let free = sys.free_response();
    let rhs = DVector::from_iterator(n, x_target.iter().zip(free.node(k0)).map(|(t, f)| t - f));
    let sol = min_norm_solve(&k, &rhs);
    if sol.rank < n {
        return Err(Error::NotControllable {
            target_index: k0,
            rank: sol.rank,
            needed: n,
            sigma: sol.sigma,
        });
    }
    let sigma_min = sol.sigma[n - 1];
    let sigma_w = (sys.state_weight() / dt).sqrt() * sigma_min;
    let phi_norm = phi.svd(false, false).singular_values.max();
    let u_exact = Series::from_flat(m, sol.x.as_slice().to_vec())?;
    let x = sys.simulate(&pad_controls(sys, &u_exact))?;
    let residual = x
        .node(k0)
        .iter()
        .zip(x_target)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ControllabilityReport {
        operator_rank: sol.rank,
        needed_rank: n,
        singular_values: sol.sigma,
        sigma_min,
        c1_hat: phi_norm.max(1.0) / sigma_w,
        u_exact,
        residual,
        dt,
    })
}

/// Minimal-norm control over all `N` steps with `Π x_k = z_k` on the trace
/// window. `z_target` has one node per window node.
pub fn min_norm_nodal_control(
    sys: &DiscreteLinearSystem,
    trace: &TraceOperator,
    z_target: &Series,
) -> Result<ControllabilityReport> {
    trace.check(sys)?;
    let (n, m, steps, dt) = (sys.state_dim(), sys.control_dim(), sys.grid().steps(), sys.grid().dt());
    if z_target.len() != trace.window_len() || z_target.dim() != trace.z_dim() {
        return Err(Error::Dimension {
            step: trace.window_start,
            detail: format!(
                "trace target is {}x{}, expected {}x{}",
                z_target.len(),
                z_target.dim(),
                trace.window_len(),
                trace.z_dim()
            ),
        });
    }
    let rows = trace.window_len() * trace.z_dim();
    let mut k = DMatrix::zeros(rows, steps * m);
    let mut e = vec![0.0; rows];
    for r in 0..rows {
        e[r] = 1.0;
        let row = sys.adjoint(&trace.transpose(&e, steps + 1, n))?;
        for (c, v) in row.as_slice().iter().enumerate() {
            k[(r, c)] = *v;
        }
        e[r] = 0.0;
    }
    let free = trace.apply(&sys.free_response());
    let rhs = DVector::from_iterator(rows, z_target.as_slice().iter().zip(&free).map(|(z, f)| z - f));
    let sol = min_norm_solve(&k, &rhs);
    if sol.rank < rows {
        let tail = sol.sigma[sol.sigma.len().saturating_sub(5)..].to_vec();
        return Err(Error::NodalNotControllable {
            rank: sol.rank,
            needed: rows,
            sigma: tail,
        });
    }
    let sigma_min = sol.sigma[rows - 1];

    let zero_u = Series::zeros(steps, m);
    let mut free_map = DMatrix::zeros(rows, n);
    let mut unit = vec![0.0; n];
    for c in 0..n {
        unit[c] = 1.0;
        let col = trace.apply(&sys.run(&unit, &zero_u, false));
        free_map.column_mut(c).copy_from_slice(&col);
        unit[c] = 0.0;
    }
    let free_norm = free_map.svd(false, false).singular_values.max() * (dt / sys.state_weight()).sqrt();

    let u_exact = Series::from_flat(m, sol.x.as_slice().to_vec())?;
    let reached = trace.apply(&sys.simulate(&u_exact)?);
    let residual = norm2(
        &reached
            .iter()
            .zip(z_target.as_slice())
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    Ok(ControllabilityReport {
        operator_rank: sol.rank,
        needed_rank: rows,
        singular_values: sol.sigma,
        sigma_min,
        c1_hat: free_norm.max(1.0) / sigma_min,
        u_exact,
        residual,
        dt,
    })
}

/// Steer to `x_d` at `k₀` with the minimal-norm control, then hold with
/// `u_d`. Fails unless `A_k x_d + B_k u_d (+ c_k) = x_d` for all `k ≥ k₀`.
pub fn holdable_extension(
    sys: &DiscreteLinearSystem,
    x_d: &[f64],
    u_d: &[f64],
    k0: usize,
) -> Result<(Series, ControllabilityReport)> {
    check_target_index(sys, k0)?;
    let n = sys.state_dim();
    if x_d.len() != n || u_d.len() != sys.control_dim() {
        return Err(Error::Dimension {
            step: k0,
            detail: "desired pair has the wrong dimensions".into(),
        });
    }
    let tol = 1e-10 * (1.0 + x_d.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let mut worst = (0.0f64, k0);
    for k in k0..sys.grid().steps() {
        let s = sys.step(k);
        let mut next = s.a.mul(x_d);
        s.b.mul_add(u_d, &mut next);
        if let Some(c) = &s.offset {
            next.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        }
        let dev = next.iter().zip(x_d).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        if dev > worst.0 {
            worst = (dev, k);
        }
    }
    if worst.0 > tol {
        return Err(Error::NotHoldable {
            max_deviation: worst.0,
            step: worst.1,
        });
    }
    let report = min_norm_exact_control(sys, x_d, k0)?;
    let mut u = Series::constant(sys.grid().steps(), u_d);
    u.as_mut_slice()[..report.u_exact.as_slice().len()].copy_from_slice(report.u_exact.as_slice());
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::super::{from_diag_hyperbolic, from_scalar_ode, Boundary, HyperbolicParams, OdeScheme, TimeGrid};
    use super::*;
    use crate::scalar_oracle::Coefficient;

    fn integrator(steps: usize, horizon: f64, x0: f64) -> DiscreteLinearSystem {
        from_scalar_ode(
            &Coefficient::constant(0.0),
            &Coefficient::constant(1.0),
            TimeGrid::new(horizon, steps).unwrap(),
            x0,
            OdeScheme::ImplicitEuler,
        )
        .unwrap()
    }

    #[test]
    fn integrator_operator_row_is_dt() {
        let sys = integrator(10, 1.0, 0.0);
        let k = controllability_operator(&sys, 6).unwrap();
        assert_eq!(k.shape(), (1, 6));
        assert!(k.iter().all(|&v| (v - 0.1).abs() < 1e-15));
    }

    #[test]
    fn integrator_min_norm_control_is_constant() {
        let sys = integrator(10, 1.0, 0.0);
        let r = min_norm_exact_control(&sys, &[1.0], 5).unwrap();
        for &u in r.u_exact.as_slice() {
            assert!((u - 1.0 / (5.0 * 0.1)).abs() < 1e-12);
        }
        assert!(r.residual < 1e-12);
        // σ_w = sqrt(k₀ dt), Φ = 1.
        assert!((r.c1_hat - 1.0 / 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.control_norm() <= r.c1_hat * 1.0 + 1e-12);
    }

    #[test]
    fn target_equal_to_free_response_needs_no_control() {
        let sys = from_scalar_ode(
            &Coefficient::constant(1.0),
            &Coefficient::exponential(1.0, 1.0),
            TimeGrid::new(2.0, 20).unwrap(),
            -1.0,
            OdeScheme::ImplicitEuler,
        )
        .unwrap();
        let free = sys.free_response();
        let r = min_norm_exact_control(&sys, free.node(12), 12).unwrap();
        assert!(r.u_exact.as_slice().iter().all(|v| v.abs() < 1e-14));
        assert_eq!(r.operator_rank, 1);
    }

    #[test]
    fn zero_input_matrix_is_not_controllable() {
        let sys = from_scalar_ode(
            &Coefficient::constant(0.0),
            &Coefficient::constant(0.0),
            TimeGrid::new(1.0, 4).unwrap(),
            1.0,
            OdeScheme::ImplicitEuler,
        )
        .unwrap();
        assert_eq!(controllability_operator(&sys, 4).unwrap().norm(), 0.0);
        assert!(matches!(
            min_norm_exact_control(&sys, &[0.0], 4),
            Err(Error::NotControllable { rank: 0, .. })
        ));
    }

    #[test]
    fn wave_controllable_after_round_trip_only() {
        let p = HyperbolicParams::wave(10);
        let sys = from_diag_hyperbolic(&p, p.grid(30).unwrap()).unwrap();
        let target: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        assert!(matches!(
            min_norm_exact_control(&sys, &target, 19),
            Err(Error::NotControllable { .. })
        ));
        let r = min_norm_exact_control(&sys, &target, 20).unwrap();
        assert!(r.residual < 1e-10);
        assert!(r.c1_hat.is_finite());
    }

    #[test]
    fn holdable_extension_keeps_target() {
        let sys = integrator(20, 2.0, -1.0);
        let (u, _) = holdable_extension(&sys, &[0.5], &[0.0], 10).unwrap();
        let x = sys.simulate(&u).unwrap();
        for k in 10..=20 {
            assert!((x.node(k)[0] - 0.5).abs() < 1e-12);
        }
        assert!(matches!(
            holdable_extension(&sys, &[0.5], &[1.0], 10),
            Err(Error::NotHoldable { .. })
        ));
    }

    #[test]
    fn nodal_trace_needs_transport_delay() {
        let p = HyperbolicParams {
            d_plus: 1.0,
            d_minus: -1.0,
            eta0: -0.1,
            coupling: vec![[[1.0, 0.0], [0.0, 1.0]]],
            length: 1.0,
            cells: 8,
            boundary: Boundary::Dirichlet { r_minus_right: 0.0 },
        };
        let sys = from_diag_hyperbolic(&p, p.grid(20).unwrap()).unwrap();
        let late = TraceOperator::new(8, 20, vec![7]).unwrap();
        let z = Series::from_scalars((0..13).map(|i| 0.1 * i as f64).collect());
        let r = min_norm_nodal_control(&sys, &late, &z).unwrap();
        assert!(r.residual < 1e-10);
        let early = TraceOperator::new(7, 20, vec![7]).unwrap();
        let z = Series::from_scalars(vec![1.0; 14]);
        assert!(matches!(
            min_norm_nodal_control(&sys, &early, &z),
            Err(Error::NodalNotControllable { .. })
        ));
    }
}
