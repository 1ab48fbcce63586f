//! `min ∫ ½u² + |u| + γ|y|` subject to `y' = y + eᵗ u`, `y(0) = -1`.

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive_simpson, bisect_increasing};

/// Residual tolerance for the arrival-time root.
pub const T0_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    pub gamma: f64,
    pub horizon: f64,
    t0: f64,
}

impl Example1Params {
    pub fn new(gamma: f64, horizon: f64) -> Result<Self> {
        let t0 = solve_t0(gamma)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(domain(format!("horizon must be positive and finite, got {horizon}")));
        }
        Ok(Example1Params { gamma, horizon, t0 })
    }

    /// Arrival time `t₀(γ)`.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Checks `T > t₀` and `γ eᵀ ≥ 1 + γ e^{t₀}`, naming the failed one.
    pub fn check_feasibility(&self) -> Result<()> {
        if self.horizon <= self.t0 {
            return Err(Error::Infeasible(format!(
                "horizon T = {} does not exceed t0 = {}",
                self.horizon, self.t0
            )));
        }
        let lhs = self.gamma * self.horizon.exp();
        let rhs = 1.0 + self.gamma * self.t0.exp();
        if lhs < rhs {
            return Err(Error::Infeasible(format!("gamma*e^T = {lhs} < 1 + gamma*e^t0 = {rhs}")));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }
}

/// Unique positive root of `(t - 1) eᵗ = 1/γ - 1`.
pub fn solve_t0(gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(domain(format!("gamma must be positive and finite, got {gamma}")));
    }
    let rhs = 1.0 / gamma - 1.0;
    let h = |t: f64| (t - 1.0) * t.exp() - rhs;
    let lo = 1e-12;
    let mut hi = 10.0;
    while h(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(domain(format!("no bracket for t0 with gamma = {gamma}")));
        }
    }
    // h(lo) ≈ -1/γ < 0 for every γ > 0, so [lo, hi] brackets the root.
    let t0 = bisect_increasing(h, lo, hi, 0.0);
    debug_assert!(h(t0).abs() <= T0_RESIDUAL_TOL.max(1e-15 * rhs.abs()));
    Ok(t0)
}

/// `û(t) = γ(e^{t₀} - eᵗ)` on `[0, t₀]`, zero afterwards.
pub fn example1_control(p: &Example1Params, t: f64) -> Result<f64> {
    p.check_time(t)?;
    Ok(control_unchecked(p, t))
}

/// `ŷ(t) = γ t e^{t+t₀} - γ e^{2t} + (γ-1) eᵗ` before `t₀`, zero afterwards.
pub fn example1_state(p: &Example1Params, t: f64) -> Result<f64> {
    p.check_time(t)?;
    Ok(state_unchecked(p, t))
}

fn control_unchecked(p: &Example1Params, t: f64) -> f64 {
    if t <= p.t0 {
        (p.gamma * (p.t0.exp() - t.exp())).max(0.0)
    } else {
        0.0
    }
}

fn state_unchecked(p: &Example1Params, t: f64) -> f64 {
    if t < p.t0 {
        let g = p.gamma;
        g * t * (t + p.t0).exp() - g * (2.0 * t).exp() + (g - 1.0) * t.exp()
    } else {
        0.0
    }
}

/// `∫₀ᵀ û dτ`; equals one for every γ.
pub fn example1_moment_check(p: &Example1Params) -> f64 {
    let end = p.t0.min(p.horizon);
    adaptive_simpson(|t| control_unchecked(p, t), 0.0, end, 1e-14)
}

/// Optimal value `∫₀^{t₀} ½û² + û + γ|ŷ| dt`.
pub fn example1_objective(p: &Example1Params) -> Result<f64> {
    p.check_feasibility()?;
    let integrand = |t: f64| {
        let u = control_unchecked(p, t);
        0.5 * u * u + u + p.gamma * state_unchecked(p, t).abs()
    };
    Ok(adaptive_simpson(integrand, 0.0, p.t0, 1e-13))
}
