//! Primal–dual splitting for `min_u G(u) + φ(K u + c)` where `G` is the
//! control cost, `K` maps controls to the tracked residual through the
//! dynamics and `φ` is the tracking term.
//!
//! The iteration is the Chambolle–Pock scheme in the `dt` weighted control
//! metric, in which `G` is 1-strongly convex (optionally with the
//! accelerated step rule). `K` is never formed: forward simulation applies
//! it and the adjoint pass applies its transpose.

mod brute;
mod certificate;

pub use brute::brute_force_oracle;
pub use certificate::subgradient_certificate;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiscreteLinearSystem;
use crate::error::{Error, Result};
use crate::objectives::{evaluate, prox_control_in_place, ObjectiveSpec};
use crate::series::{dot, norm2};
use crate::Series;

/// Applied to the power-method estimate of `‖K‖`, which approaches the
/// true norm from below.
const NORM_SAFETY: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop when `(primal − dual)/(1 + |primal|)` falls below this.
    pub tol_gap: f64,
    /// Primal step in the `dt`-weighted metric; `0.99/‖K‖` when absent.
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub over_relaxation: f64,
    /// Seed of the power method.
    pub seed: u64,
    pub power_iterations: usize,
    /// Step-size acceleration using strong convexity of the control cost.
    /// It shrinks the primal step quickly, which stalls the primal iterate
    /// on long horizons, so it is off by default.
    pub accelerate: bool,
    /// Iterations between gap evaluations.
    pub check_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 200_000,
            tol_gap: 1e-8,
            tau: None,
            sigma: None,
            over_relaxation: 1.0,
            seed: 20_240_917,
            power_iterations: 50,
            accelerate: false,
            check_every: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.tol_gap.is_finite() && self.tol_gap > 0.0) {
            return Err(Error::Config(format!("tol_gap must be positive, got {}", self.tol_gap)));
        }
        for (name, v) in [("tau", self.tau), ("sigma", self.sigma)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation <= 1.0) {
            return Err(Error::Config("over_relaxation must lie in (0, 1]".into()));
        }
        if self.power_iterations == 0 || self.check_every == 0 {
            return Err(Error::Config(
                "power_iterations and check_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub u_opt: Series,
    pub x_opt: Series,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual variable on the tracked residual (empty for the brute-force
    /// oracle).
    pub dual: Vec<f64>,
    pub dual_value: f64,
    /// Estimated `‖K‖` in the weighted control metric.
    pub operator_norm: f64,
}

/// `K` in the `dt`-weighted control metric, plus the residual constant `c`.
pub(crate) struct LinearMap<'a> {
    sys: &'a DiscreteLinearSystem,
    spec: &'a ObjectiveSpec,
    pub(crate) constant: Vec<f64>,
}

impl<'a> LinearMap<'a> {
    pub(crate) fn new(sys: &'a DiscreteLinearSystem, spec: &'a ObjectiveSpec) -> Result<Self> {
        spec.check_system(sys)?;
        let constant = spec.residual(&sys.free_response());
        Ok(LinearMap { sys, spec, constant })
    }

    pub(crate) fn apply(&self, u: &Series) -> Vec<f64> {
        let x = self.sys.simulate_linear(u).expect("control shape checked");
        let mut r = self.spec.residual(&x);
        // The residual subtracts the target; a linear map must not.
        let zero = self.spec.residual(&Series::zeros(x.len(), x.dim()));
        r.iter_mut().zip(&zero).for_each(|(a, z)| *a -= z);
        r
    }

    pub(crate) fn apply_transpose(&self, p: &[f64]) -> Series {
        let g = self.spec.residual_transpose(p, self.sys.state_dim());
        self.sys.adjoint(&g).expect("shapes checked")
    }

    /// Power-method estimate of `‖K‖` with controls measured in
    /// `(Σ dt ‖u_k‖²)^{1/2}`.
    pub(crate) fn weighted_norm(&self, iterations: usize, seed: u64) -> f64 {
        let (steps, m) = (self.sys.grid().steps(), self.sys.control_dim());
        if self.constant.is_empty() {
            return 0.0;
        }
        let dt = self.sys.grid().dt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = Series::from_flat(m, (0..steps * m).map(|_| rng.random::<f64>() - 0.5).collect()).expect("shape");
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let n = norm2(v.as_slice());
            if n == 0.0 {
                return 0.0;
            }
            v.as_mut_slice().iter_mut().for_each(|x| *x /= n);
            // Kᵀ K in the weighted metric is Kᵀ K / dt in Euclidean terms.
            let w = self.apply_transpose(&self.apply(&v));
            let mut w = w;
            w.as_mut_slice().iter_mut().for_each(|x| *x /= dt);
            estimate = norm2(w.as_slice()).sqrt();
            v = w;
        }
        estimate
    }
}

fn check_finite(v: &[f64], iteration: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { iteration })
    }
}

pub(crate) fn dual_value(spec: &ObjectiveSpec, map: &LinearMap, p: &[f64], ktp: &Series) -> f64 {
    let neg: Vec<f64> = ktp.as_slice().iter().map(|v| -v).collect();
    -spec.control_conjugate(&neg) + dot(&map.constant, p)
}

pub fn solve_primal_dual(sys: &DiscreteLinearSystem, spec: &ObjectiveSpec, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_primal_dual_from(sys, spec, cfg, &spec.u_d)
}

/// [`solve_primal_dual`] started from a given control instead of `u_d`.
pub fn solve_primal_dual_from(
    sys: &DiscreteLinearSystem,
    spec: &ObjectiveSpec,
    cfg: &SolverConfig,
    u0: &Series,
) -> Result<SolveReport> {
    cfg.validate()?;
    if u0.len() != spec.u_d.len() || u0.dim() != spec.u_d.dim() {
        return Err(Error::Dimension {
            step: u0.len(),
            detail: "initial control does not match u_d".into(),
        });
    }
    let map = LinearMap::new(sys, spec)?;
    let dt = sys.grid().dt();
    let l1 = spec.control_l1_weight;
    let norm = map.weighted_norm(cfg.power_iterations, cfg.seed) * NORM_SAFETY;
    let default_step = if norm > 0.0 { 0.99 / norm } else { 1.0 };
    let mut tau = cfg.tau.unwrap_or(default_step);
    let mut sigma = cfg.sigma.unwrap_or(default_step);
    if tau * sigma * norm * norm >= 1.0 {
        return Err(Error::Config(format!(
            "step sizes violate tau*sigma*|K|^2 < 1: {tau} * {sigma} * {norm}^2 = {}",
            tau * sigma * norm * norm
        )));
    }

    let objective_of = |u: &Series| -> Result<(f64, Series)> {
        let x = sys.simulate(u)?;
        Ok((evaluate(spec, u, &x)?, x))
    };

    let mut u = u0.clone();
    let mut u_bar = u.clone();
    let mut p = vec![0.0; map.constant.len()];
    let mut u_prev = u.clone();
    let mut gap = f64::INFINITY;
    let mut dual = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let ku = map.apply(&u_bar);
        for ((pi, k), c) in p.iter_mut().zip(&ku).zip(&map.constant) {
            *pi += sigma * (k + c);
        }
        spec.project_dual(&mut p);

        let ktp = map.apply_transpose(&p);
        std::mem::swap(&mut u_prev, &mut u);
        u.as_mut_slice()
            .iter_mut()
            .zip(u_prev.as_slice())
            .zip(ktp.as_slice())
            .for_each(|((ui, &prev), &g)| *ui = prev - tau / dt * g);
        prox_control_in_place(u.as_mut_slice(), spec.u_d.as_slice(), tau, l1);
        check_finite(u.as_slice(), it)?;

        let theta = if cfg.accelerate {
            let th = 1.0 / (1.0 + 2.0 * tau).sqrt();
            tau *= th;
            sigma /= th;
            th
        } else {
            cfg.over_relaxation
        };
        u_bar
            .as_mut_slice()
            .iter_mut()
            .zip(u.as_slice())
            .zip(u_prev.as_slice())
            .for_each(|((b, &cur), &prev)| *b = cur + theta * (cur - prev));

        if it % cfg.check_every == 0 || it == cfg.max_iters {
            let (primal, _) = objective_of(&u)?;
            dual = dual_value(spec, &map, &p, &ktp);
            check_finite(&[primal, dual], it)?;
            gap = (primal - dual) / (1.0 + primal.abs());
            if gap <= cfg.tol_gap {
                converged = true;
                break;
            }
        }
    }
    let (objective, x_opt) = objective_of(&u)?;
    Ok(SolveReport {
        u_opt: u,
        x_opt,
        objective,
        gap,
        iterations,
        converged,
        dual: p,
        dual_value: dual,
        operator_norm: norm,
    })
}
