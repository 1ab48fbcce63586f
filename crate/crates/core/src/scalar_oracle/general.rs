//! `min ∫ ½u² + |u| + γ|y|` subject to `y' = f y + g u`, `y(0) = α < 0`,
//! `y(T) = 0`.
//!
//! With `F = exp(∫f)` and `H = ∫F`, the optimal control is
//! `û = max{0, -1 - γ gH/F + λ g/F}` where `λ` solves the moment equation
//! `∫₀ᵀ û g/F = -α`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Coefficient;
use crate::error::{domain, Error, Result, Sign};
use crate::quadrature::{bisect_increasing, crossing, simpson};

/// Intervals of the internal quadrature grid.
pub const KERNEL_INTERVALS: usize = 4096;

/// Relative slack allowed when checking `g' ≤ f g` by central differences.
const DERIVATIVE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarDynamics {
    pub f: Coefficient,
    pub g: Coefficient,
    pub alpha: f64,
    pub horizon: f64,
}

impl ScalarDynamics {
    pub fn new(f: Coefficient, g: Coefficient, alpha: f64, horizon: f64) -> Result<Self> {
        let d = ScalarDynamics { f, g, alpha, horizon };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.f.validate()?;
        self.g.validate()?;
        if !(self.alpha.is_finite() && self.alpha < 0.0) {
            return Err(domain(format!("alpha must be negative, got {}", self.alpha)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProblem {
    pub dynamics: ScalarDynamics,
    pub gamma: f64,
}

impl ScalarProblem {
    /// Accepts any `γ > 0`; see [`ScalarOracleSolution::gamma_hypothesis_met`]
    /// for the `γ ≥ 1` range where optimality of the closed form is proven.
    pub fn new(dynamics: ScalarDynamics, gamma: f64) -> Result<Self> {
        dynamics.validate()?;
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(ScalarProblem { dynamics, gamma })
    }
}

/// Dense-grid representation of `F`, `H`, `g/F` and the integrals the
/// oracle needs. Off-grid values use a local Simpson step from the nearest
/// node to the left.
#[derive(Debug)]
pub(crate) struct Kernel {
    f: Coefficient,
    g: Coefficient,
    horizon: f64,
    n: usize,
    step: f64,
    cum_f: Vec<f64>,
    big_h: Vec<f64>,
    q: Vec<f64>,
    q_mid: Vec<f64>,
    h_mid: Vec<f64>,
    int_q: Vec<f64>,
    int_q2: Vec<f64>,
    int_hq2: Vec<f64>,
}

impl Kernel {
    pub(crate) fn new(d: &ScalarDynamics) -> Result<Self> {
        d.validate()?;
        let n = KERNEL_INTERVALS;
        let step = d.horizon / n as f64;
        let node = |i: usize| d.horizon * i as f64 / n as f64;
        for i in 0..=2 * n {
            let t = d.horizon * i as f64 / (2 * n) as f64;
            let (fv, gv) = (d.f.eval(t), d.g.eval(t));
            if !(fv > 0.0) {
                return Err(domain(format!("f must be positive on [0,T]; f({t}) = {fv}")));
            }
            if !(gv > 0.0) {
                return Err(domain(format!("g must be positive on [0,T]; g({t}) = {gv}")));
            }
        }
        let mut k = Kernel {
            f: d.f.clone(),
            g: d.g.clone(),
            horizon: d.horizon,
            n,
            step,
            cum_f: vec![0.0; n + 1],
            big_h: vec![0.0; n + 1],
            q: vec![0.0; n + 1],
            q_mid: vec![0.0; n],
            h_mid: vec![0.0; n],
            int_q: vec![0.0; n + 1],
            int_q2: vec![0.0; n + 1],
            int_hq2: vec![0.0; n + 1],
        };
        let fe = |t: f64| d.f.eval(t);
        k.q[0] = d.g.eval(0.0);
        for i in 0..n {
            let (a, b) = (node(i), node(i + 1));
            let m = 0.5 * (a + b);
            let cf_m = k.cum_f[i] + simpson(fe, a, m);
            k.cum_f[i + 1] = k.cum_f[i] + simpson(fe, a, b);
            let (fa, fm, fb) = (k.cum_f[i].exp(), cf_m.exp(), k.cum_f[i + 1].exp());
            k.big_h[i + 1] = k.big_h[i] + step / 6.0 * (fa + 4.0 * fm + fb);
            // H at the midpoint from a half-step Simpson rule.
            let fq = (k.cum_f[i] + simpson(fe, a, 0.5 * (a + m))).exp();
            k.h_mid[i] = k.big_h[i] + (m - a) / 6.0 * (fa + 4.0 * fq + fm);
            k.q_mid[i] = d.g.eval(m) / fm;
            k.q[i + 1] = d.g.eval(b) / fb;
            let s = step / 6.0;
            let (qa, qm, qb) = (k.q[i], k.q_mid[i], k.q[i + 1]);
            k.int_q[i + 1] = k.int_q[i] + s * (qa + 4.0 * qm + qb);
            k.int_q2[i + 1] = k.int_q2[i] + s * (qa * qa + 4.0 * qm * qm + qb * qb);
            k.int_hq2[i + 1] =
                k.int_hq2[i] + s * (k.big_h[i] * qa * qa + 4.0 * k.h_mid[i] * qm * qm + k.big_h[i + 1] * qb * qb);
        }
        Ok(k)
    }

    fn node(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.n as f64
    }

    fn interval_of(&self, t: f64) -> usize {
        ((t / self.step).floor().max(0.0) as usize).min(self.n - 1)
    }

    fn local_cum_f(&self, i: usize, t: f64) -> f64 {
        self.cum_f[i] + simpson(|s| self.f.eval(s), self.node(i), t)
    }

    pub(crate) fn big_f(&self, t: f64) -> f64 {
        self.local_cum_f(self.interval_of(t), t).exp()
    }

    pub(crate) fn big_h(&self, t: f64) -> f64 {
        let i = self.interval_of(t);
        self.big_h[i] + simpson(|s| self.local_cum_f(i, s).exp(), self.node(i), t)
    }

    /// `g/F` at `t`.
    pub(crate) fn q(&self, t: f64) -> f64 {
        self.g.eval(t) / self.big_f(t)
    }

    /// Bracket `-1 + (g/F)(λ - γH)` and `g/F` at `t`.
    fn switching_and_q(&self, lambda: f64, gamma: f64, t: f64) -> (f64, f64) {
        let q = self.q(t);
        (-1.0 + q * (lambda - gamma * self.big_h(t)), q)
    }

    fn node_values(&self, lambda: f64, gamma: f64, i: usize) -> [(f64, f64); 3] {
        let at = |q: f64, h: f64| (-1.0 + q * (lambda - gamma * h), q);
        [
            at(self.q[i], self.big_h[i]),
            at(self.q_mid[i], self.h_mid[i]),
            at(self.q[i + 1], self.big_h[i + 1]),
        ]
    }

    /// `∫ₐᵇ max(0, φ) g/F` on a sub-interval of one grid cell, splitting at
    /// sign changes of the bracket `φ`.
    fn positive_part(&self, lambda: f64, gamma: f64, a: f64, b: f64, ends: [(f64, f64); 3]) -> f64 {
        let [(pa, qa), (pm, qm), (pb, qb)] = ends;
        if pa >= 0.0 && pm >= 0.0 && pb >= 0.0 {
            return (b - a) / 6.0 * (pa * qa + 4.0 * pm * qm + pb * qb);
        }
        if pa <= 0.0 && pm <= 0.0 && pb <= 0.0 {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        self.half_positive_part(lambda, gamma, a, m, pa, pm) + self.half_positive_part(lambda, gamma, m, b, pm, pb)
    }

    fn half_positive_part(&self, lambda: f64, gamma: f64, a: f64, b: f64, pa: f64, pb: f64) -> f64 {
        let integrand = |t: f64| {
            let (p, q) = self.switching_and_q(lambda, gamma, t);
            p.max(0.0) * q
        };
        match (pa >= 0.0, pb >= 0.0) {
            (true, true) => simpson(integrand, a, b),
            (false, false) => 0.0,
            (pos_left, _) => {
                let c = crossing(|t| self.switching_and_q(lambda, gamma, t).0, a, b);
                if pos_left {
                    simpson(integrand, a, c)
                } else {
                    simpson(integrand, c, b)
                }
            }
        }
    }

    fn cell_moment(&self, lambda: f64, gamma: f64, i: usize) -> f64 {
        self.positive_part(
            lambda,
            gamma,
            self.node(i),
            self.node(i + 1),
            self.node_values(lambda, gamma, i),
        )
    }

    fn moment(&self, lambda: f64, gamma: f64) -> f64 {
        (0..self.n).map(|i| self.cell_moment(lambda, gamma, i)).sum()
    }

    /// `∫ₜᵢᵗ max(0, φ) g/F` for `t` inside cell `i`.
    fn partial_moment(&self, lambda: f64, gamma: f64, i: usize, t: f64) -> f64 {
        let a = self.node(i);
        if t <= a {
            return 0.0;
        }
        let ends = [
            self.node_values(lambda, gamma, i)[0],
            self.switching_and_q(lambda, gamma, 0.5 * (a + t)),
            self.switching_and_q(lambda, gamma, t),
        ];
        self.positive_part(lambda, gamma, a, t, ends)
    }

    /// `(∫₀ᵗ g/F, ∫₀ᵗ (g/F)², ∫₀ᵗ H (g/F)²)`.
    fn weight_integrals(&self, t: f64) -> (f64, f64, f64) {
        let i = self.interval_of(t);
        let a = self.node(i);
        let local = |w: &dyn Fn(f64) -> f64| simpson(w, a, t);
        (
            self.int_q[i] + local(&|s| self.q(s)),
            self.int_q2[i] + local(&|s| self.q(s).powi(2)),
            self.int_hq2[i] + local(&|s| self.big_h(s) * self.q(s).powi(2)),
        )
    }
}

/// Oracle solution of the scalar problem with terminal condition.
#[derive(Debug, Clone)]
pub struct ScalarOracleSolution {
    kernel: Arc<Kernel>,
    alpha: f64,
    gamma: f64,
    lambda: f64,
    t0: f64,
    b_nodes: Vec<f64>,
}

impl ScalarOracleSolution {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn horizon(&self) -> f64 {
        self.kernel.horizon
    }

    /// Whether `γ ≥ 1`, the range where the closed form is known optimal.
    pub fn gamma_hypothesis_met(&self) -> bool {
        self.gamma >= 1.0
    }

    /// `-1 - γ gH/F + λ g/F`.
    pub fn switching(&self, t: f64) -> f64 {
        self.kernel.switching_and_q(self.lambda, self.gamma, t).0
    }

    pub fn control(&self, t: f64) -> f64 {
        self.switching(t).max(0.0)
    }

    /// `F(t) = exp(∫₀ᵗ f)`.
    pub fn big_f(&self, t: f64) -> f64 {
        self.kernel.big_f(t)
    }

    /// `H(t) = ∫₀ᵗ F`.
    pub fn big_h(&self, t: f64) -> f64 {
        self.kernel.big_h(t)
    }

    /// `B(t) = ∫₀ᵗ (g/F) û`.
    pub fn moment_to(&self, t: f64) -> f64 {
        let i = self.kernel.interval_of(t);
        self.b_nodes[i] + self.kernel.partial_moment(self.lambda, self.gamma, i, t)
    }

    /// `ŷ(t) = F(t) (α + B(t))`.
    pub fn state(&self, t: f64) -> f64 {
        self.kernel.big_f(t) * (self.alpha + self.moment_to(t))
    }

    /// `|∫₀ᵀ û g/F + α|`.
    pub fn moment_residual(&self) -> f64 {
        (self.b_nodes[self.kernel.n] + self.alpha).abs()
    }

    /// Nodes of the internal quadrature grid.
    pub fn grid_nodes(&self) -> Vec<f64> {
        (0..=self.kernel.n).map(|i| self.kernel.node(i)).collect()
    }
}

pub fn general_solution(p: &ScalarProblem) -> Result<ScalarOracleSolution> {
    let kernel = Arc::new(Kernel::new(&p.dynamics)?);
    let (alpha, gamma) = (p.dynamics.alpha, p.gamma);
    let excess = |lambda: f64| kernel.moment(lambda, gamma) + alpha;

    let mut hi = 1.0;
    let mut doublings = 0;
    while excess(hi) < 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::Infeasible(format!(
                "moment equation unattainable: sup of moment below -alpha = {}",
                -alpha
            )));
        }
    }
    let lambda = bisect_increasing(excess, 0.0, hi, 0.0);

    let n = kernel.n;
    let mut b_nodes = vec![0.0; n + 1];
    for i in 0..n {
        b_nodes[i + 1] = b_nodes[i] + kernel.cell_moment(lambda, gamma, i);
    }

    // t₀ = min{t : α + B(t) = 0} is the end of the support of û, since B
    // is non-decreasing and stays at -α exactly where û vanishes.
    let mut t0 = 0.0;
    for i in (0..n).rev() {
        let [(pa, _), (pm, _), (pb, _)] = kernel.node_values(lambda, gamma, i);
        if pa <= 0.0 && pm <= 0.0 && pb <= 0.0 {
            continue;
        }
        let (a, m, b) = (
            kernel.node(i),
            0.5 * (kernel.node(i) + kernel.node(i + 1)),
            kernel.node(i + 1),
        );
        let phi = |t: f64| kernel.switching_and_q(lambda, gamma, t).0;
        t0 = if pb > 0.0 {
            b
        } else if pm > 0.0 {
            crossing(phi, m, b)
        } else {
            crossing(phi, a, m)
        };
        break;
    }

    Ok(ScalarOracleSolution {
        kernel,
        alpha,
        gamma,
        lambda,
        t0,
        b_nodes,
    })
}

/// Penalty weight `γ(t₁)` and multiplier `λ₁` for which the optimal control
/// is supported exactly on `[0, t₁]`.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub t1: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Left-hand side of the positivity condition on `t₁`.
    pub condition_lhs: f64,
    /// `|λ₁ g/F - 1 - γ(t₁) gH/F|` at `t₁`.
    pub identity_residual: f64,
    /// `g' ≤ f g` on the verification grid. When false the support
    /// guarantee does not apply, though the numbers are still returned.
    pub derivative_assumption_holds: bool,
    pub max_derivative_violation: f64,
    kernel: Arc<Kernel>,
}

impl ThresholdReport {
    /// Oracle control built from `(γ(t₁), λ₁)`.
    pub fn control(&self, t: f64) -> f64 {
        self.kernel.switching_and_q(self.lambda, self.gamma, t).0.max(0.0)
    }

    /// `∫₀ᵀ û g/F` for the control built from `(γ(t₁), λ₁)`.
    pub fn moment(&self) -> f64 {
        self.kernel.moment(self.lambda, self.gamma)
    }
}

pub fn gamma_threshold(d: &ScalarDynamics, t1: f64) -> Result<ThresholdReport> {
    let kernel = Arc::new(Kernel::new(d)?);
    if !(t1 > 0.0 && t1 < d.horizon) {
        return Err(domain(format!("t1 = {t1} must lie in (0, {})", d.horizon)));
    }
    let (i1, i2, ih2) = kernel.weight_integrals(t1);
    let (f1, g1, h1) = (kernel.big_f(t1), d.g.eval(t1), kernel.big_h(t1));
    let lhs = -d.alpha - f1 / g1 * i2 + i1;
    if !(lhs > 1e-12) {
        let sign = if lhs < 0.0 { Sign::Negative } else { Sign::Zero };
        return Err(Error::ThresholdInfeasible { lhs, sign });
    }
    let denominator = h1 * i2 - ih2;
    let gamma = lhs / denominator;
    let lambda = (-d.alpha + i1 + gamma * ih2) / i2;
    let identity_residual = (lambda * g1 / f1 - (1.0 + gamma * g1 * h1 / f1)).abs();

    let h = kernel.step;
    let mut max_violation: f64 = f64::NEG_INFINITY;
    let mut holds = true;
    for i in 1..kernel.n {
        let t = kernel.node(i);
        let dg = (d.g.eval(t + h) - d.g.eval(t - h)) / (2.0 * h);
        let fg = d.f.eval(t) * d.g.eval(t);
        let violation = dg - fg;
        max_violation = max_violation.max(violation);
        if violation > DERIVATIVE_SLACK * fg.abs().max(1.0) {
            holds = false;
        }
    }

    Ok(ThresholdReport {
        t1,
        gamma,
        lambda,
        condition_lhs: lhs,
        identity_residual,
        derivative_assumption_holds: holds,
        max_derivative_violation: max_violation,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_oracle::{example1_control, solve_t0, Example1Params};

    fn constant_dynamics(horizon: f64) -> ScalarDynamics {
        ScalarDynamics::new(Coefficient::constant(1.0), Coefficient::constant(1.0), -1.0, horizon).unwrap()
    }

    fn example1_dynamics() -> ScalarDynamics {
        ScalarDynamics::new(
            Coefficient::constant(1.0),
            Coefficient::exponential(1.0, 1.0),
            -1.0,
            2.0,
        )
        .unwrap()
    }

    /// f = g = 1: F = eᵗ, H = eᵗ - 1, so φ = -(1+γ) + (γ+λ)e^{-t} and the
    /// moment equation has a closed form in t₀ = ln((γ+λ)/(1+γ)).
    fn constant_case_closed_form(gamma: f64) -> (f64, f64) {
        let moment = |lambda: f64| {
            let c = (gamma + lambda) / (1.0 + gamma);
            if c <= 1.0 {
                return -1.0;
            }
            let t0 = c.ln();
            -(1.0 + gamma) * (1.0 - (-t0).exp()) + (gamma + lambda) * (1.0 - (-2.0 * t0).exp()) / 2.0 - 1.0
        };
        let lambda = bisect_increasing(moment, 0.0, 100.0, 0.0);
        (lambda, ((gamma + lambda) / (1.0 + gamma)).ln())
    }

    #[test]
    fn reduces_to_example1() {
        for gamma in [1.0, 2.0, 4.0] {
            let sol = general_solution(&ScalarProblem::new(example1_dynamics(), gamma).unwrap()).unwrap();
            let t0 = solve_t0(gamma).unwrap();
            assert!((sol.t0() - t0).abs() < 1e-8, "gamma {gamma}: {} vs {t0}", sol.t0());
            let p = Example1Params::new(gamma, 2.0).unwrap();
            for i in 0..=400 {
                let t = 2.0 * i as f64 / 400.0;
                let diff = (sol.control(t) - example1_control(&p, t).unwrap()).abs();
                assert!(diff < 1e-7, "gamma {gamma}, t {t}: {diff}");
            }
        }
    }

    #[test]
    fn constant_coefficients_match_closed_form() {
        let sol = general_solution(&ScalarProblem::new(constant_dynamics(3.0), 2.0).unwrap()).unwrap();
        let (lambda, t0) = constant_case_closed_form(2.0);
        // Frozen from the closed form: λ = 4.645751311064591, t₀ = 0.7953654612239056.
        assert!((lambda - 4.645_751_311_064_591).abs() < 1e-10);
        assert!((sol.lambda() - lambda).abs() < 1e-9, "{}", sol.lambda());
        assert!((sol.t0() - t0).abs() < 1e-9, "{}", sol.t0());
        assert!(sol.moment_residual() < 1e-10);
    }

    #[test]
    fn solution_invariants_on_dense_grid() {
        let sol = general_solution(&ScalarProblem::new(constant_dynamics(3.0), 2.0).unwrap()).unwrap();
        for t in sol.grid_nodes() {
            assert!(sol.control(t) >= 0.0);
            assert!(sol.state(t) <= 1e-12, "y({t}) = {}", sol.state(t));
            if t >= sol.t0() {
                assert_eq!(sol.control(t), 0.0);
                assert!(sol.state(t).abs() < 1e-8);
                assert!(sol.switching(t) <= 1e-9);
            }
        }
        assert!(sol.state(3.0).abs() < 1e-8);
    }

    #[test]
    fn terminal_state_matches_independent_ode_integration() {
        let sol = general_solution(&ScalarProblem::new(constant_dynamics(3.0), 2.0).unwrap()).unwrap();
        // RK4 on y' = y + û with steps aligned to t₀ so the kink falls on a node.
        let t0 = sol.t0();
        let n = 40_000;
        let h = t0 / n as f64;
        let mut y = -1.0;
        for i in 0..n {
            let t = i as f64 * h;
            let f = |t: f64, y: f64| y + sol.control(t);
            let k1 = f(t, y);
            let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
            let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
            let k4 = f(t + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        // û ≡ 0 afterwards, so y(T) = e^{T - t₀} y(t₀).
        let y_t = y * (3.0 - t0).exp();
        assert!(y_t.abs() < 1e-9, "{y_t}");
    }

    #[test]
    fn small_alpha_shrinks_arrival_time() {
        let mut prev = f64::INFINITY;
        for alpha in [-1.0, -1e-1, -1e-2, -1e-3] {
            let d = ScalarDynamics::new(Coefficient::constant(1.0), Coefficient::constant(1.0), alpha, 3.0).unwrap();
            let sol = general_solution(&ScalarProblem::new(d, 2.0).unwrap()).unwrap();
            assert!(sol.t0() < prev);
            prev = sol.t0();
        }
        assert!(prev < 0.05, "{prev}");
    }

    #[test]
    fn rejects_nonpositive_coefficients() {
        let d = ScalarDynamics::new(
            Coefficient::Polynomial {
                coefficients: vec![1.0, -1.0],
            },
            Coefficient::constant(1.0),
            -1.0,
            2.0,
        )
        .unwrap();
        assert!(matches!(
            general_solution(&ScalarProblem::new(d, 2.0).unwrap()),
            Err(Error::Domain(_))
        ));
        assert!(ScalarDynamics::new(Coefficient::constant(1.0), Coefficient::constant(1.0), 0.5, 2.0).is_err());
    }

    #[test]
    fn threshold_at_one_for_constant_coefficients() {
        let d = constant_dynamics(2.0);
        let th = gamma_threshold(&d, 1.0).unwrap();
        // Direct evaluation with I₁ = 1-e⁻¹, I₂ = (1-e⁻²)/2,
        // ∫H(g/F)² = I₁ - I₂, H(1) = e-1.
        let e = 1f64.exp();
        let i1 = 1.0 - 1.0 / e;
        let i2 = (1.0 - 1.0 / (e * e)) / 2.0;
        let ih2 = i1 - i2;
        let gamma = (1.0 - e * i2 + i1) / ((e - 1.0) * i2 - ih2);
        let lambda = (1.0 + i1 + gamma * ih2) / i2;
        assert!((gamma - 0.841_347_188_415_585_3).abs() < 1e-12);
        assert!((th.gamma - gamma).abs() < 1e-11, "{}", th.gamma);
        assert!((th.lambda - lambda).abs() < 1e-11, "{}", th.lambda);
        assert!(th.identity_residual < 1e-9);
        assert!(th.derivative_assumption_holds);
        assert!(th.control(1.0).abs() < 1e-12);
        assert_eq!(th.control(1.5), 0.0);
        assert!((th.moment() - 1.0).abs() < 1e-10);

        let sol = general_solution(&ScalarProblem::new(d, th.gamma).unwrap()).unwrap();
        assert!(!sol.gamma_hypothesis_met());
        assert!((sol.t0() - 1.0).abs() < 1e-6, "{}", sol.t0());
    }

    #[test]
    fn derivative_assumption_flags() {
        // g = eᵗ, f = 1: holds with equality.
        assert!(
            gamma_threshold(&example1_dynamics(), 0.5)
                .unwrap()
                .derivative_assumption_holds
        );
        // g = e^{2t}, f = 1: g' = 2g > fg.
        let d = ScalarDynamics::new(
            Coefficient::constant(1.0),
            Coefficient::exponential(1.0, 2.0),
            -1.0,
            2.0,
        )
        .unwrap();
        match gamma_threshold(&d, 0.3) {
            Ok(th) => assert!(!th.derivative_assumption_holds),
            Err(Error::ThresholdInfeasible { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn threshold_condition_failure_names_sign() {
        // Large t₁ with small |α| violates the positivity condition.
        let d = ScalarDynamics::new(Coefficient::constant(1.0), Coefficient::constant(1.0), -0.01, 10.0).unwrap();
        let err = gamma_threshold(&d, 9.0).unwrap_err();
        assert!(
            matches!(
                err,
                Error::ThresholdInfeasible {
                    sign: Sign::Negative,
                    ..
                }
            ),
            "{err}"
        );
        assert!(err.to_string().contains("negative"));
    }
}
