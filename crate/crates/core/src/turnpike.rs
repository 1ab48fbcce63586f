//! Detection and verification of finite-time turnpike structure.
//!
//! [`detect`] reads arrival and control-support indices off a trajectory.
//! [`check_pq_equivalence`] solves the max-norm window problem and the
//! point-penalty problem on the same system and compares their values.
//! [`threshold_sweep`] runs one solve per penalty weight and reports the
//! smallest weight that achieves arrival by a given node.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{holdable_extension, DiscreteLinearSystem, TimeGrid};
use crate::error::{domain, Error, Result};
use crate::objectives::{ObjectiveSpec, Tracking};
use crate::series::dist2;
use crate::solver::{solve_primal_dual, SolveReport, SolverConfig};
use crate::Series;

/// Absolute detection tolerance in state units.
pub const DEFAULT_TOL: f64 = 1e-5;

/// Relative value tolerance of the P/Q comparison.
pub const PQ_VALUE_TOL: f64 = 1e-6;

/// Largest deviation from `x_d` allowed on the window for P.
pub const PQ_DEVIATION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnpikeReport {
    /// First node `k` with `‖x_j − x_d‖ ≤ tol` for every `j ≥ k`.
    pub arrival_index: Option<usize>,
    /// Last step `k` with `‖u_k − u_d‖ > tol`.
    pub support_end_index: Option<usize>,
    /// Euclidean `‖x_k − x_d‖` per node.
    pub deviation_profile: Vec<f64>,
    pub predicted_t0: Option<f64>,
    pub gamma_used: f64,
    pub tol: f64,
}

impl TurnpikeReport {
    pub fn with_prediction(mut self, gamma: f64, t0: Option<f64>) -> Self {
        self.gamma_used = gamma;
        self.predicted_t0 = t0;
        self
    }

    pub fn arrival_time(&self, grid: &TimeGrid) -> Option<f64> {
        self.arrival_index.map(|k| grid.time(k))
    }

    /// The control is piecewise constant, so step `k` is active until
    /// `t_{k+1}`.
    pub fn support_end_time(&self, grid: &TimeGrid) -> Option<f64> {
        self.support_end_index.map(|k| grid.time(k + 1))
    }

    /// Largest deviation from the arrival index onward.
    pub fn post_arrival_deviation(&self) -> Option<f64> {
        self.arrival_index
            .map(|k| self.deviation_profile[k..].iter().copied().fold(0.0, f64::max))
    }
}

/// Scan `x` and `u` from the end of the horizon.
///
/// `x` has one entry per node, `u` one per step.
pub fn detect(x: &Series, u: &Series, x_d: &[f64], u_d: &[f64], tol: f64) -> Result<TurnpikeReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("detection tolerance must be positive, got {tol}")));
    }
    if x.dim() != x_d.len() || u.dim() != u_d.len() {
        return Err(Error::Dimension {
            step: 0,
            detail: format!(
                "trajectory dims ({}, {}) vs desired ({}, {})",
                x.dim(),
                u.dim(),
                x_d.len(),
                u_d.len()
            ),
        });
    }
    let deviation_profile: Vec<f64> = x.iter().map(|xk| dist2(xk, x_d)).collect();
    let mut arrival_index = None;
    for k in (0..deviation_profile.len()).rev() {
        if deviation_profile[k] > tol {
            break;
        }
        arrival_index = Some(k);
    }
    let support_end_index = (0..u.len()).rev().find(|&k| dist2(u.node(k), u_d) > tol);
    Ok(TurnpikeReport {
        arrival_index,
        support_end_index,
        deviation_profile,
        predicted_t0: None,
        gamma_used: f64::NAN,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqReport {
    pub gamma: f64,
    pub k0: usize,
    /// `Ĉ₁ ‖u_exact − u_d‖`.
    pub threshold: f64,
    /// `γ` exceeds the threshold, so equal values are expected.
    pub guaranteed: bool,
    pub v_p: f64,
    pub v_q: f64,
    /// Largest Euclidean deviation of the P state from `x_d` on `[k₀, N]`.
    pub max_deviation: f64,
    pub p: SolveReport,
    pub q: SolveReport,
}

impl PqReport {
    pub fn value_gap(&self) -> f64 {
        (self.v_p - self.v_q).abs()
    }

    pub fn values_match(&self) -> bool {
        self.value_gap() <= PQ_VALUE_TOL * (1.0 + self.v_q.abs())
    }

    pub fn holds_on_window(&self) -> bool {
        self.max_deviation <= PQ_DEVIATION_TOL
    }

    /// Pass/fail of the equivalence claim. Below the threshold nothing is
    /// claimed, so the check passes vacuously.
    pub fn passes(&self) -> bool {
        !self.guaranteed || (self.values_match() && self.holds_on_window())
    }
}

/// The two window problems sharing `γ`, `k₀`, `x_d` and `u_d`.
pub fn pq_specs(
    sys: &DiscreteLinearSystem,
    gamma: f64,
    k0: usize,
    x_d: &[f64],
    u_d: &[f64],
) -> Result<(ObjectiveSpec, ObjectiveSpec)> {
    let n = sys.grid().steps();
    let p = ObjectiveSpec::for_system(
        sys,
        u_d,
        0.0,
        Tracking::MaxNormWindow {
            gamma,
            window: (k0, n),
            target: x_d.to_vec(),
        },
    )?;
    let q = ObjectiveSpec::for_system(
        sys,
        u_d,
        0.0,
        Tracking::PointPenalty {
            gamma,
            index: k0,
            target: x_d.to_vec(),
        },
    )?;
    Ok((p, q))
}

/// Solve P and Q and compare. Requires `(x_d, u_d)` holdable on `[k₀, N]`.
pub fn check_pq_equivalence(
    sys: &DiscreteLinearSystem,
    gamma: f64,
    k0: usize,
    x_d: &[f64],
    u_d: &[f64],
    cfg: &SolverConfig,
) -> Result<PqReport> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(domain(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    let (_, ctrl) = holdable_extension(sys, x_d, u_d, k0)?;
    let threshold = ctrl.c1_hat * ctrl.control_distance(u_d);
    let (spec_p, spec_q) = pq_specs(sys, gamma, k0, x_d, u_d)?;
    let p = solve_primal_dual(sys, &spec_p, cfg)?;
    let q = solve_primal_dual(sys, &spec_q, cfg)?;
    let max_deviation = (k0..p.x_opt.len())
        .map(|k| dist2(p.x_opt.node(k), x_d))
        .fold(0.0, f64::max);
    Ok(PqReport {
        gamma,
        k0,
        threshold,
        guaranteed: gamma > threshold,
        v_p: p.objective,
        v_q: q.objective,
        max_deviation,
        p,
        q,
    })
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub x_d: Vec<f64>,
    pub u_d: Vec<f64>,
    pub tol: f64,
    /// Arrival must happen at or before this node to count.
    pub target_index: Option<usize>,
    /// Proof-based or closed-form threshold, reported next to the
    /// empirical one.
    pub analytic_threshold: Option<f64>,
    pub parallel: bool,
}

impl SweepOptions {
    pub fn new(x_d: Vec<f64>, u_d: Vec<f64>) -> Self {
        SweepOptions {
            x_d,
            u_d,
            tol: DEFAULT_TOL,
            target_index: None,
            analytic_threshold: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub arrival_index: Option<usize>,
    pub support_end_index: Option<usize>,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when this row's solve failed; the other fields are then NaN or
    /// empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub target_index: Option<usize>,
    /// Smallest `γ` in the grid whose row arrives by the target index (or
    /// arrives at all when no target is set).
    pub empirical_threshold: Option<f64>,
    pub analytic_threshold: Option<f64>,
}

impl SweepTable {
    /// Arrival indices are non-increasing in `γ` up to `slack` nodes,
    /// treating "no arrival" as arrival after the last node.
    pub fn arrival_monotone(&self, slack: usize) -> bool {
        let key = |r: &SweepRow| r.arrival_index.unwrap_or(usize::MAX / 2);
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| key(w[1]) <= key(w[0]) + slack)
    }
}

fn sweep_row<F, O>(
    sys: &DiscreteLinearSystem,
    family: &F,
    observe: &O,
    gamma: f64,
    opts: &SweepOptions,
    cfg: &SolverConfig,
) -> SweepRow
where
    F: Fn(f64) -> Result<ObjectiveSpec>,
    O: Fn(&Series) -> Series,
{
    let solved = family(gamma)
        .and_then(|spec| solve_primal_dual(sys, &spec, cfg))
        .and_then(|rep| {
            Ok((
                detect(&observe(&rep.x_opt), &rep.u_opt, &opts.x_d, &opts.u_d, opts.tol)?,
                rep,
            ))
        });
    match solved {
        Ok((tp, rep)) => SweepRow {
            gamma,
            arrival_index: tp.arrival_index,
            support_end_index: tp.support_end_index,
            objective: rep.objective,
            gap: rep.gap,
            iterations: rep.iterations,
            converged: rep.converged,
            error: None,
        },
        Err(e) => SweepRow {
            gamma,
            arrival_index: None,
            support_end_index: None,
            objective: f64::NAN,
            gap: f64::NAN,
            iterations: 0,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// One solve per `γ` of `family(γ)`. A failing row records its error and the
/// sweep continues; rows keep the order of `gamma_grid` in both modes.
pub fn threshold_sweep<F>(
    sys: &DiscreteLinearSystem,
    family: F,
    gamma_grid: &[f64],
    opts: &SweepOptions,
    cfg: &SolverConfig,
) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<ObjectiveSpec> + Sync,
{
    threshold_sweep_observed(sys, family, |x: &Series| x.clone(), gamma_grid, opts, cfg)
}

/// As [`threshold_sweep`], detecting arrival on `observe(x)` instead of the
/// full state, with `opts.x_d` the desired observed value.
pub fn threshold_sweep_observed<F, O>(
    sys: &DiscreteLinearSystem,
    family: F,
    observe: O,
    gamma_grid: &[f64],
    opts: &SweepOptions,
    cfg: &SolverConfig,
) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<ObjectiveSpec> + Sync,
    O: Fn(&Series) -> Series + Sync,
{
    if gamma_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("gamma grid must be sorted ascending"));
    }
    if let Some(g) = gamma_grid.iter().find(|g| !g.is_finite()) {
        return Err(domain(format!("gamma grid contains {g}")));
    }
    cfg.validate()?;
    let row = |&g: &f64| sweep_row(sys, &family, &observe, g, opts, cfg);
    let rows: Vec<SweepRow> = if opts.parallel {
        gamma_grid.par_iter().map(row).collect()
    } else {
        gamma_grid.iter().map(row).collect()
    };
    let arrives = |r: &SweepRow| match (r.arrival_index, opts.target_index) {
        (Some(a), Some(t)) => a <= t,
        (Some(_), None) => true,
        _ => false,
    };
    let empirical_threshold = rows.iter().find(|r| r.error.is_none() && arrives(r)).map(|r| r.gamma);
    Ok(SweepTable {
        rows,
        target_index: opts.target_index,
        empirical_threshold,
        analytic_threshold: opts.analytic_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{from_scalar_ode, OdeScheme};
    use crate::objectives::evaluate;
    use crate::scalar_oracle::{example1_control, example1_state, solve_t0, Coefficient, Example1Params};

    fn integrator(steps: usize) -> DiscreteLinearSystem {
        from_scalar_ode(
            &Coefficient::constant(0.0),
            &Coefficient::constant(1.0),
            TimeGrid::new(2.0, steps).unwrap(),
            -1.0,
            OdeScheme::ImplicitEuler,
        )
        .unwrap()
    }

    #[test]
    fn oracle_pair_arrives_at_t0() {
        let n = 200;
        let grid = TimeGrid::new(2.0, n).unwrap();
        for gamma in [0.5, 1.0, 2.0, 10.0] {
            let p = Example1Params::new(gamma, 2.0).unwrap();
            let x = Series::from_scalars(
                grid.nodes()
                    .into_iter()
                    .map(|t| example1_state(&p, t).unwrap())
                    .collect(),
            );
            let u = Series::from_scalars(
                (0..n)
                    .map(|k| example1_control(&p, 0.5 * (grid.time(k) + grid.time(k + 1))).unwrap())
                    .collect(),
            );
            let t0 = solve_t0(gamma).unwrap();
            let rep = detect(&x, &u, &[0.0], &[0.0], DEFAULT_TOL)
                .unwrap()
                .with_prediction(gamma, Some(t0));
            let arrival = rep.arrival_time(&grid).unwrap();
            assert!(
                (arrival - t0).abs() <= 2.0 * grid.dt(),
                "gamma {gamma}: {arrival} vs {t0}"
            );
            assert!(rep.post_arrival_deviation().unwrap() <= DEFAULT_TOL);
        }
    }

    #[test]
    fn trivial_trajectories() {
        let x = Series::constant(5, &[0.3]);
        let u = Series::constant(4, &[0.1]);
        let rep = detect(&x, &u, &[0.3], &[0.1], 1e-5).unwrap();
        assert_eq!(rep.arrival_index, Some(0));
        assert_eq!(rep.support_end_index, None);

        let rep = detect(&x, &u, &[1.0], &[0.0], 1e-5).unwrap();
        assert_eq!(rep.arrival_index, None);
        assert_eq!(rep.support_end_index, Some(3));
    }

    #[test]
    fn returning_trajectory_is_not_arrival() {
        let x = Series::from_scalars(vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let u = Series::from_scalars(vec![0.0; 5]);
        assert_eq!(detect(&x, &u, &[0.0], &[0.0], 1e-5).unwrap().arrival_index, Some(4));
    }

    #[test]
    fn detect_rejects_bad_input() {
        let x = Series::constant(3, &[0.0]);
        let u = Series::constant(2, &[0.0]);
        assert!(detect(&x, &u, &[0.0], &[0.0], 0.0).is_err());
        assert!(detect(&x, &u, &[0.0, 1.0], &[0.0], 1e-5).is_err());
    }

    #[test]
    fn pq_below_and_above_threshold() {
        let sys = integrator(40);
        let cfg = SolverConfig {
            tol_gap: 1e-12,
            ..SolverConfig::default()
        };
        let zero = check_pq_equivalence(&sys, 0.0, 20, &[0.0], &[0.0], &cfg).unwrap();
        assert!(!zero.guaranteed && zero.passes());
        assert!(zero.v_p.abs() < 1e-12 && zero.v_q.abs() < 1e-12);

        let strong = check_pq_equivalence(&sys, 2.5, 20, &[0.0], &[0.0], &cfg).unwrap();
        assert!((strong.threshold - 1.0).abs() < 1e-9, "{}", strong.threshold);
        assert!(strong.guaranteed);
        assert!(strong.passes(), "{strong:?}");
        assert!(strong.v_q <= strong.v_p + 1e-9);
    }

    #[test]
    fn q_never_exceeds_p_pointwise() {
        let sys = integrator(10);
        let (p, q) = pq_specs(&sys, 1.3, 4, &[0.0], &[0.0]).unwrap();
        for s in 0..8 {
            let u = Series::from_scalars((0..10).map(|k| ((k * 7 + s * 3) % 5) as f64 * 0.2 - 0.4).collect());
            let x = sys.simulate(&u).unwrap();
            assert!(evaluate(&q, &u, &x).unwrap() <= evaluate(&p, &u, &x).unwrap() + 1e-12);
        }
    }

    #[test]
    fn sweep_parallel_matches_sequential() {
        let sys = integrator(40);
        let family = |g: f64| {
            ObjectiveSpec::for_system(
                &sys,
                &[0.0],
                0.0,
                Tracking::PointwiseL1 {
                    weights: vec![g; 41],
                    target: vec![0.0],
                },
            )
        };
        let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
        let mut opts = SweepOptions::new(vec![0.0], vec![0.0]);
        let cfg = SolverConfig::default();
        let seq = threshold_sweep(&sys, family, &grid, &opts, &cfg).unwrap();
        opts.parallel = true;
        let par = threshold_sweep(&sys, family, &grid, &opts, &cfg).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.rows[0].arrival_index, None);
        assert!(seq.arrival_monotone(1));
        assert_eq!(
            seq.empirical_threshold,
            seq.rows.iter().find(|r| r.arrival_index.is_some()).map(|r| r.gamma)
        );
    }

    #[test]
    fn sweep_keeps_going_after_a_failing_row() {
        let sys = integrator(20);
        let family = |g: f64| {
            if g == 1.0 {
                Err(domain("boom"))
            } else {
                ObjectiveSpec::for_system(
                    &sys,
                    &[0.0],
                    0.0,
                    Tracking::PointPenalty {
                        gamma: g,
                        index: 10,
                        target: vec![0.0],
                    },
                )
            }
        };
        let t = threshold_sweep(
            &sys,
            family,
            &[0.5, 1.0, 3.0],
            &SweepOptions::new(vec![0.0], vec![0.0]),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(t.rows[1].error.is_some());
        assert!(t.rows[0].error.is_none() && t.rows[2].error.is_none());
        assert!(threshold_sweep(
            &sys,
            family,
            &[2.0, 1.0],
            &SweepOptions::new(vec![0.0], vec![0.0]),
            &SolverConfig::default()
        )
        .is_err());
    }
}
