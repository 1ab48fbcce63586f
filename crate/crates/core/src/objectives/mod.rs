//! Composite objectives
//! `Σ_k dt (½‖u_k − u_d,k‖² + l ‖u_k‖₁) + φ(tracked residual)`.
//!
//! The tracked residual stacks `x_k − x_d` (or `Π x_k − Π x_d`) over the
//! nodes a tracking term looks at. Every tracking term is a support
//! function `φ(r) = max_{p ∈ D} ⟨p, r⟩` of a convex set `D` in the
//! Euclidean pairing, which is what the primal–dual solver works with.

mod prox;

pub(crate) use prox::prox_control_in_place;
pub use prox::{prox_control_term, ProxResult};

use crate::dynamics::{DiscreteLinearSystem, TimeGrid, TraceOperator};
use crate::error::{domain, Error, Result};
use crate::series::norm2;
use crate::Series;

#[derive(Debug, Clone, PartialEq)]
pub enum Tracking {
    /// `Σ_k w_k dt ‖x_k − x_d‖₁` with the state weight folded into the
    /// norm; `weights` has one entry per node and includes any `γ`.
    PointwiseL1 { weights: Vec<f64>, target: Vec<f64> },
    /// `γ max_{k ∈ [start, end]} ‖x_k − x_d‖`.
    MaxNormWindow {
        gamma: f64,
        window: (usize, usize),
        target: Vec<f64>,
    },
    /// `γ (Σ_{k in window} dt ‖Π x_k − z_d‖²)^{1/2}`.
    GroupL2Window {
        gamma: f64,
        trace: TraceOperator,
        target: Vec<f64>,
    },
    /// `γ ‖x_{k₀} − x_d‖`.
    PointPenalty { gamma: f64, index: usize, target: Vec<f64> },
}

/// `w_k = 1/((k − k₀) dt)` for `k > k₀`, zero otherwise.
pub fn singular_weights(grid: &TimeGrid, k0: usize) -> Result<Vec<f64>> {
    if k0 >= grid.steps() {
        return Err(domain(format!("k0 = {k0} must be below N = {}", grid.steps())));
    }
    let dt = grid.dt();
    Ok((0..=grid.steps())
        .map(|k| if k > k0 { 1.0 / ((k - k0) as f64 * dt) } else { 0.0 })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub grid: TimeGrid,
    pub u_d: Series,
    pub control_l1_weight: f64,
    pub tracking: Tracking,
    /// Weight of the state inner product (mesh width for PDE states).
    pub state_weight: f64,
}

impl ObjectiveSpec {
    pub fn new(
        grid: TimeGrid,
        u_d: Series,
        control_l1_weight: f64,
        tracking: Tracking,
        state_weight: f64,
    ) -> Result<Self> {
        let spec = ObjectiveSpec {
            grid,
            u_d,
            control_l1_weight,
            tracking,
            state_weight,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid and state weight taken from `sys`, constant reference control.
    pub fn for_system(
        sys: &DiscreteLinearSystem,
        u_d: &[f64],
        control_l1_weight: f64,
        tracking: Tracking,
    ) -> Result<Self> {
        let spec = Self::new(
            *sys.grid(),
            Series::constant(sys.grid().steps(), u_d),
            control_l1_weight,
            tracking,
            sys.state_weight(),
        )?;
        spec.check_system(sys)?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let n_steps = self.grid.steps();
        if self.u_d.len() != n_steps {
            return Err(Error::Dimension {
                step: self.u_d.len(),
                detail: format!("u_d has {} entries for {n_steps} steps", self.u_d.len()),
            });
        }
        if !(self.control_l1_weight.is_finite() && self.control_l1_weight >= 0.0) {
            return Err(domain("control L1 weight must be finite and >= 0"));
        }
        if !(self.state_weight.is_finite() && self.state_weight > 0.0) {
            return Err(domain("state weight must be positive"));
        }
        let gamma_ok = |g: f64| g.is_finite() && g >= 0.0;
        match &self.tracking {
            Tracking::PointwiseL1 { weights, .. } => {
                if weights.len() != n_steps + 1 {
                    return Err(Error::Dimension {
                        step: weights.len(),
                        detail: format!("{} weights for {} nodes", weights.len(), n_steps + 1),
                    });
                }
                if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(domain(format!("weight at node {k} must be finite and >= 0")));
                }
            }
            Tracking::MaxNormWindow { gamma, window, .. } => {
                if !gamma_ok(*gamma) {
                    return Err(domain("gamma must be finite and >= 0"));
                }
                if window.0 > window.1 || window.1 > n_steps {
                    return Err(domain(format!("window {window:?} outside [0, {n_steps}]")));
                }
            }
            Tracking::GroupL2Window { gamma, trace, target } => {
                if !gamma_ok(*gamma) {
                    return Err(domain("gamma must be finite and >= 0"));
                }
                if trace.window_end > n_steps {
                    return Err(domain("trace window outside the grid"));
                }
                if target.len() != trace.z_dim() {
                    return Err(domain("trace target length differs from the trace dimension"));
                }
            }
            Tracking::PointPenalty { gamma, index, .. } => {
                if !gamma_ok(*gamma) {
                    return Err(domain("gamma must be finite and >= 0"));
                }
                if *index > n_steps {
                    return Err(domain(format!("penalty node {index} outside [0, {n_steps}]")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_system(&self, sys: &DiscreteLinearSystem) -> Result<()> {
        if sys.grid() != &self.grid {
            return Err(domain("objective and system use different grids"));
        }
        if self.u_d.dim() != sys.control_dim() {
            return Err(Error::Dimension {
                step: 0,
                detail: format!(
                    "u_d has dimension {}, controls have {}",
                    self.u_d.dim(),
                    sys.control_dim()
                ),
            });
        }
        match &self.tracking {
            Tracking::GroupL2Window { trace, .. } => trace.check(sys),
            Tracking::PointwiseL1 { target, .. }
            | Tracking::MaxNormWindow { target, .. }
            | Tracking::PointPenalty { target, .. } => {
                if target.len() != sys.state_dim() {
                    return Err(Error::Dimension {
                        step: 0,
                        detail: format!("target has length {}, state has {}", target.len(), sys.state_dim()),
                    });
                }
                Ok(())
            }
        }
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt()
    }

    /// Nodes entering the tracked residual, in order.
    pub fn tracked_nodes(&self) -> Vec<usize> {
        match &self.tracking {
            Tracking::PointwiseL1 { weights, .. } => (0..weights.len()).filter(|&k| weights[k] > 0.0).collect(),
            Tracking::MaxNormWindow { window, .. } => (window.0..=window.1).collect(),
            Tracking::GroupL2Window { trace, .. } => trace.nodes().collect(),
            Tracking::PointPenalty { index, .. } => vec![*index],
        }
    }

    /// Length of one residual block.
    pub fn block_dim(&self) -> usize {
        match &self.tracking {
            Tracking::GroupL2Window { trace, .. } => trace.z_dim(),
            Tracking::PointwiseL1 { target, .. }
            | Tracking::MaxNormWindow { target, .. }
            | Tracking::PointPenalty { target, .. } => target.len(),
        }
    }

    fn target(&self) -> &[f64] {
        match &self.tracking {
            Tracking::PointwiseL1 { target, .. }
            | Tracking::MaxNormWindow { target, .. }
            | Tracking::GroupL2Window { target, .. }
            | Tracking::PointPenalty { target, .. } => target,
        }
    }

    /// Stacked tracked residual of a trajectory.
    pub fn residual(&self, x: &Series) -> Vec<f64> {
        let target = self.target();
        let mut r = Vec::with_capacity(self.tracked_nodes().len() * self.block_dim());
        for k in self.tracked_nodes() {
            let xk = x.node(k);
            match &self.tracking {
                Tracking::GroupL2Window { trace, .. } => {
                    r.extend(trace.coords.iter().zip(target).map(|(&c, t)| xk[c] - t));
                }
                _ => r.extend(xk.iter().zip(target).map(|(a, t)| a - t)),
            }
        }
        r
    }

    /// Transpose of `x ↦ residual(x)` (without the constant), as per-node
    /// cotangents for [`DiscreteLinearSystem::adjoint`].
    pub fn residual_transpose(&self, r: &[f64], state_dim: usize) -> Series {
        let mut g = Series::zeros(self.grid.steps() + 1, state_dim);
        let bd = self.block_dim();
        for (b, k) in self.tracked_nodes().into_iter().enumerate() {
            let block = &r[b * bd..(b + 1) * bd];
            let gk = g.node_mut(k);
            match &self.tracking {
                Tracking::GroupL2Window { trace, .. } => {
                    for (&c, v) in trace.coords.iter().zip(block) {
                        gk[c] += v;
                    }
                }
                _ => gk.iter_mut().zip(block).for_each(|(a, v)| *a += v),
            }
        }
        g
    }

    /// `Σ_k dt (½‖u_k − u_d,k‖² + l ‖u_k‖₁)`.
    pub fn control_cost(&self, u: &Series) -> f64 {
        let (dt, l) = (self.dt(), self.control_l1_weight);
        u.as_slice()
            .iter()
            .zip(self.u_d.as_slice())
            .map(|(&v, &d)| dt * (0.5 * (v - d).powi(2) + l * v.abs()))
            .sum()
    }

    /// `φ(r)` for a stacked residual.
    pub fn tracking_value(&self, r: &[f64]) -> f64 {
        let bd = self.block_dim();
        let sw = self.state_weight;
        match &self.tracking {
            Tracking::PointwiseL1 { weights, .. } => {
                let dt = self.dt();
                self.tracked_nodes()
                    .iter()
                    .zip(r.chunks(bd))
                    .map(|(&k, b)| weights[k] * dt * sw * b.iter().map(|v| v.abs()).sum::<f64>())
                    .sum()
            }
            Tracking::MaxNormWindow { gamma, .. } => gamma * sw.sqrt() * r.chunks(bd).map(norm2).fold(0.0, f64::max),
            Tracking::GroupL2Window { gamma, .. } => gamma * self.dt().sqrt() * norm2(r),
            Tracking::PointPenalty { gamma, .. } => gamma * sw.sqrt() * norm2(r),
        }
    }

    /// `½ Σ_b ω_b ‖r_b‖²` with block weights matching the scale of the
    /// non-smooth term, and its gradient `ω_b r_b`.
    pub fn squared_tracking(&self, r: &[f64]) -> (f64, Vec<f64>) {
        let bd = self.block_dim();
        let (sw, dt) = (self.state_weight, self.dt());
        let nodes = self.tracked_nodes();
        let mut grad = Vec::with_capacity(r.len());
        let mut value = 0.0;
        for (b, block) in r.chunks(bd).enumerate() {
            let w = match &self.tracking {
                Tracking::PointwiseL1 { weights, .. } => weights[nodes[b]] * dt * sw,
                Tracking::MaxNormWindow { gamma, .. } | Tracking::PointPenalty { gamma, .. } => gamma * sw,
                Tracking::GroupL2Window { gamma, .. } => gamma * dt,
            };
            value += 0.5 * w * block.iter().map(|v| v * v).sum::<f64>();
            grad.extend(block.iter().map(|v| w * v));
        }
        (value, grad)
    }
}

fn check_dims(spec: &ObjectiveSpec, u: &Series, x: &Series) -> Result<()> {
    if u.len() != spec.grid.steps() || u.dim() != spec.u_d.dim() {
        return Err(Error::Dimension {
            step: u.len(),
            detail: format!(
                "controls are {}x{}, expected {}x{}",
                u.len(),
                u.dim(),
                spec.grid.steps(),
                spec.u_d.dim()
            ),
        });
    }
    if x.len() != spec.grid.steps() + 1 {
        return Err(Error::Dimension {
            step: x.len(),
            detail: format!("trajectory has {} nodes, expected {}", x.len(), spec.grid.steps() + 1),
        });
    }
    let needed = match &spec.tracking {
        Tracking::GroupL2Window { trace, .. } => trace.coords.iter().max().map_or(0, |c| c + 1),
        _ => spec.block_dim(),
    };
    if x.dim() < needed || (!matches!(spec.tracking, Tracking::GroupL2Window { .. }) && x.dim() != needed) {
        return Err(Error::Dimension {
            step: 0,
            detail: format!("state dimension {} does not fit the tracking term", x.dim()),
        });
    }
    Ok(())
}

/// Objective value of a control/trajectory pair.
pub fn evaluate(spec: &ObjectiveSpec, u: &Series, x: &Series) -> Result<f64> {
    check_dims(spec, u, x)?;
    Ok(spec.control_cost(u) + spec.tracking_value(&spec.residual(x)))
}

/// Gradient `dt (u_k − u_d,k)` of the quadratic control cost.
pub fn smooth_gradient(spec: &ObjectiveSpec, u: &Series) -> Series {
    let dt = spec.dt();
    let data = u
        .as_slice()
        .iter()
        .zip(spec.u_d.as_slice())
        .map(|(v, d)| dt * (v - d))
        .collect();
    Series::from_flat(u.dim(), data).expect("same shape as u")
}

/// Value and gradient of `½Σ dt‖u − u_d‖² + ½Σ_b ω_b ‖r_b(u)‖²`, the
/// gradient computed by one adjoint pass.
pub fn smooth_surrogate(spec: &ObjectiveSpec, sys: &DiscreteLinearSystem, u: &Series) -> Result<(f64, Series)> {
    spec.check_system(sys)?;
    let x = sys.simulate(u)?;
    let r = spec.residual(&x);
    let (track, w) = spec.squared_tracking(&r);
    let quad: f64 = {
        let dt = spec.dt();
        u.as_slice()
            .iter()
            .zip(spec.u_d.as_slice())
            .map(|(v, d)| 0.5 * dt * (v - d).powi(2))
            .sum()
    };
    let mut grad = sys.adjoint(&spec.residual_transpose(&w, sys.state_dim()))?;
    for (g, s) in grad.as_mut_slice().iter_mut().zip(smooth_gradient(spec, u).as_slice()) {
        *g += s;
    }
    Ok((quad + track, grad))
}
