//! Discrete-time linear dynamics `x_{k+1} = A_k x_k + B_k u_k (+ c_k)`,
//! builders for the example systems and controllability tools.

mod builders;
mod control;
mod sparse;

pub use builders::{
    from_diag_hyperbolic, from_scalar_ode, leapfrog_wave, wave_displacement, Boundary, HyperbolicParams, OdeScheme,
};
pub use control::{
    controllability_operator, holdable_extension, min_norm_exact_control, min_norm_nodal_control,
    ControllabilityReport, TraceOperator, RANK_CUTOFF,
};
pub use sparse::CsrMatrix;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::Series;

/// Uniform grid on `[0, T]` with `N + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(domain(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(domain("time grid needs at least one step"));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `t_k`, computed as `k T / N` so that `t_N = T` exactly.
    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }
}

/// Matrices of one update step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    /// Constant input, e.g. fixed boundary data.
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLinearSystem {
    grid: TimeGrid,
    state_dim: usize,
    control_dim: usize,
    steps: Vec<Step>,
    x0: Vec<f64>,
    state_weight: f64,
}

impl DiscreteLinearSystem {
    pub fn new(grid: TimeGrid, x0: Vec<f64>, steps: Vec<Step>) -> Result<Self> {
        let n = x0.len();
        if n == 0 {
            return Err(domain("state dimension must be positive"));
        }
        if steps.len() != grid.steps() {
            return Err(Error::Dimension {
                step: steps.len(),
                detail: format!("{} step matrices for a grid with {} steps", steps.len(), grid.steps()),
            });
        }
        let m = steps[0].b.cols();
        for (k, s) in steps.iter().enumerate() {
            let bad = |detail: String| Error::Dimension { step: k, detail };
            if s.a.rows() != n || s.a.cols() != n {
                return Err(bad(format!("A is {}x{}, expected {n}x{n}", s.a.rows(), s.a.cols())));
            }
            if s.b.rows() != n || s.b.cols() != m {
                return Err(bad(format!("B is {}x{}, expected {n}x{m}", s.b.rows(), s.b.cols())));
            }
            if let Some(c) = &s.offset {
                if c.len() != n {
                    return Err(bad(format!("offset has length {}, expected {n}", c.len())));
                }
                if !c.iter().all(|v| v.is_finite()) {
                    return Err(bad("offset has non-finite entries".into()));
                }
            }
            if !(s.a.is_finite() && s.b.is_finite()) {
                return Err(bad("non-finite matrix entries".into()));
            }
        }
        if !x0.iter().all(|v| v.is_finite()) {
            return Err(domain("initial state has non-finite entries"));
        }
        Ok(DiscreteLinearSystem {
            grid,
            state_dim: n,
            control_dim: m,
            steps,
            x0,
            state_weight: 1.0,
        })
    }

    /// Same `(A, B)` at every step.
    pub fn time_invariant(grid: TimeGrid, x0: Vec<f64>, step: Step) -> Result<Self> {
        Self::new(grid, x0, vec![step; grid.steps()])
    }

    /// Weight `w` of the state inner product `w ⟨x, y⟩`, e.g. the mesh
    /// width for discretized PDE states.
    pub fn with_state_weight(mut self, w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(domain(format!("state weight must be positive, got {w}")));
        }
        self.state_weight = w;
        Ok(self)
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Result<Self> {
        if x0.len() != self.state_dim {
            return Err(Error::Dimension {
                step: 0,
                detail: format!("initial state has length {}, expected {}", x0.len(), self.state_dim),
            });
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn control_dim(&self) -> usize {
        self.control_dim
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn state_weight(&self) -> f64 {
        self.state_weight
    }

    pub fn step(&self, k: usize) -> &Step {
        &self.steps[k]
    }

    pub fn has_offsets(&self) -> bool {
        self.steps.iter().any(|s| s.offset.is_some())
    }

    fn check_controls(&self, u: &Series) -> Result<()> {
        if u.len() != self.grid.steps() {
            return Err(Error::Dimension {
                step: u.len().min(self.grid.steps()),
                detail: format!("{} controls for {} steps", u.len(), self.grid.steps()),
            });
        }
        if u.dim() != self.control_dim {
            return Err(Error::Dimension {
                step: 0,
                detail: format!("control has dimension {}, expected {}", u.dim(), self.control_dim),
            });
        }
        Ok(())
    }

    fn run(&self, x0: &[f64], u: &Series, affine: bool) -> Series {
        let n = self.state_dim;
        let mut x = Series::zeros(self.grid.steps() + 1, n);
        x.node_mut(0).copy_from_slice(x0);
        for (k, s) in self.steps.iter().enumerate() {
            let (done, rest) = x.as_mut_slice().split_at_mut((k + 1) * n);
            let prev = &done[k * n..];
            let next = &mut rest[..n];
            s.a.mul_add(prev, next);
            s.b.mul_add(u.node(k), next);
            if affine {
                if let Some(c) = &s.offset {
                    for (xi, ci) in next.iter_mut().zip(c) {
                        *xi += ci;
                    }
                }
            }
        }
        x
    }

    /// All `N + 1` states, starting from `x0`.
    pub fn simulate(&self, u: &Series) -> Result<Series> {
        self.check_controls(u)?;
        Ok(self.run(&self.x0, u, true))
    }

    /// Response to `u` from a zero state without offsets.
    pub fn simulate_linear(&self, u: &Series) -> Result<Series> {
        self.check_controls(u)?;
        Ok(self.run(&vec![0.0; self.state_dim], u, false))
    }

    /// Trajectory under zero control.
    pub fn free_response(&self) -> Series {
        self.run(&self.x0, &Series::zeros(self.grid.steps(), self.control_dim), true)
    }

    /// Transpose of the map `u ↦ simulate_linear(u)`: given per-node
    /// cotangents `g_k` (`N + 1` nodes), returns `Σ_k ⟨g_k, ∂x_k/∂u_j⟩` for
    /// every step `j`.
    pub fn adjoint(&self, g: &Series) -> Result<Series> {
        let (n, m, steps) = (self.state_dim, self.control_dim, self.grid.steps());
        if g.len() != steps + 1 || g.dim() != n {
            return Err(Error::Dimension {
                step: g.len(),
                detail: format!("adjoint input is {}x{}, expected {}x{n}", g.len(), g.dim(), steps + 1),
            });
        }
        let mut out = Series::zeros(steps, m);
        let mut p = g.node(steps).to_vec();
        let mut next = vec![0.0; n];
        for k in (0..steps).rev() {
            let s = &self.steps[k];
            s.b.mul_t_add(&p, out.node_mut(k));
            next.copy_from_slice(g.node(k));
            s.a.mul_t_add(&p, &mut next);
            std::mem::swap(&mut p, &mut next);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(grid: TimeGrid, a: f64, b: f64, x0: f64) -> DiscreteLinearSystem {
        let step = Step {
            a: CsrMatrix::from_triplets(1, 1, &[(0, 0, a)]),
            b: CsrMatrix::from_triplets(1, 1, &[(0, 0, b)]),
            offset: None,
        };
        DiscreteLinearSystem::time_invariant(grid, vec![x0], step).unwrap()
    }

    #[test]
    fn grid_nodes_end_exactly() {
        let g = TimeGrid::new(2.0, 200).unwrap();
        assert_eq!(g.time(200), 2.0);
        assert_eq!(g.nodes().len(), 201);
        assert!((g.dt() - 0.01).abs() < 1e-15);
        assert!(TimeGrid::new(2.0, 0).is_err());
        assert!(TimeGrid::new(-1.0, 3).is_err());
    }

    #[test]
    fn trivial_trajectories() {
        let g = TimeGrid::new(1.0, 5).unwrap();
        let sys = scalar(g, 0.7, 1.0, 0.0);
        let x = sys.simulate(&Series::zeros(5, 1)).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 0.0));
        let held = scalar(g, 1.0, 0.0, 3.0)
            .simulate(&Series::from_scalars(vec![1.0; 5]))
            .unwrap();
        assert!(held.as_slice().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn dimension_errors_name_the_step() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        let good = Step {
            a: CsrMatrix::identity(2),
            b: CsrMatrix::zeros(2, 1),
            offset: None,
        };
        let bad = Step {
            a: CsrMatrix::identity(3),
            ..good.clone()
        };
        match DiscreteLinearSystem::new(g, vec![0.0; 2], vec![good.clone(), good.clone(), bad]) {
            Err(Error::Dimension { step, .. }) => assert_eq!(step, 2),
            other => panic!("{other:?}"),
        }
        let sys = DiscreteLinearSystem::time_invariant(g, vec![0.0; 2], good).unwrap();
        assert!(matches!(
            sys.simulate(&Series::zeros(2, 1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn adjoint_is_transpose() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        let steps: Vec<Step> = (0..4)
            .map(|k| Step {
                a: CsrMatrix::from_dense(&nalgebra::DMatrix::from_row_slice(
                    2,
                    2,
                    &[0.9, 0.1 * k as f64, -0.2, 1.1],
                )),
                b: CsrMatrix::from_dense(&nalgebra::DMatrix::from_row_slice(2, 1, &[1.0, 0.5 + k as f64])),
                offset: Some(vec![0.3, -0.1]),
            })
            .collect();
        let sys = DiscreteLinearSystem::new(g, vec![1.0, -1.0], steps).unwrap();
        let u = Series::from_scalars(vec![0.3, -1.2, 2.0, 0.7]);
        let w = Series::from_flat(2, (0..10).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let lhs: f64 = sys
            .simulate_linear(&u)
            .unwrap()
            .as_slice()
            .iter()
            .zip(w.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = sys
            .adjoint(&w)
            .unwrap()
            .as_slice()
            .iter()
            .zip(u.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}
