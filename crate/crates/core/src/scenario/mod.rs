//! Declarative scenarios: a JSON config names one of the built-in problems,
//! the driver builds the system and objective, solves, analyses the
//! trajectory and writes CSV tables and SVG plots.
//!
//! Every scenario reduces to a [`Prepared`] problem: a system, a desired
//! pair and a family `γ ↦ objective`. `run`, `verify` and `sweep` all work on
//! that common form.

mod checks;
pub mod config;
pub mod output;

use std::fs;
use std::path::Path;

pub use checks::{Check, Status};
pub use config::{
    Example1Scenario, NodalScenario, ScalarGeneralScenario, Scenario, ScenarioConfig, ScenarioKind, SweepScenario,
    WaveScenario, SCHEMA_VERSION,
};

use crate::dynamics::{
    from_diag_hyperbolic, from_scalar_ode, holdable_extension, min_norm_nodal_control, Boundary, ControllabilityReport,
    DiscreteLinearSystem, HyperbolicParams, OdeScheme, TimeGrid, TraceOperator,
};
use crate::error::{Error, Result};
use crate::objectives::{singular_weights, ObjectiveSpec, Tracking};
use crate::scalar_oracle::{
    gamma_threshold, general_solution, solve_t0, Coefficient, ScalarDynamics, ScalarOracleSolution, ScalarProblem,
    ThresholdReport,
};
use crate::series::dist2;
use crate::solver::{solve_primal_dual, SolveReport};
use crate::turnpike::{detect, threshold_sweep_observed, SweepOptions, TurnpikeReport, DEFAULT_TOL};
use crate::Series;
use output::{fmt_f64, line_plot, write_key_values, write_results, write_table, Curve};

/// How the objective depends on `γ`.
#[derive(Debug, Clone)]
pub enum Family {
    /// Node weights `γ·base + extra` on `|x_k − x_d|`.
    Pointwise {
        base: Vec<f64>,
        extra: Vec<f64>,
        control_l1: f64,
    },
    MaxNorm {
        k0: usize,
    },
    GroupL2 {
        trace: TraceOperator,
    },
}

#[derive(Debug, Clone)]
pub enum Oracle {
    None,
    Example1,
    General {
        dynamics: ScalarDynamics,
        solution: Box<ScalarOracleSolution>,
        threshold: Option<Box<ThresholdReport>>,
    },
    /// Steering report for the window start of P, Q or R.
    Holdable {
        k0: usize,
        report: Box<ControllabilityReport>,
    },
    Nodal {
        report: Box<ControllabilityReport>,
    },
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub kind: ScenarioKind,
    pub sys: DiscreteLinearSystem,
    /// Desired state, or desired trace value when `observed` is set.
    pub x_d: Vec<f64>,
    pub u_d: Vec<f64>,
    pub gamma: f64,
    pub family: Family,
    /// State coordinates compared with `x_d`; all of them when `None`.
    pub observed: Option<Vec<usize>>,
    /// Arrival deadline for sweeps.
    pub target_index: Option<usize>,
    pub analytic_threshold: Option<f64>,
    pub oracle: Oracle,
}

impl Prepared {
    pub fn spec(&self, gamma: f64) -> Result<ObjectiveSpec> {
        let tracking = match &self.family {
            Family::Pointwise { base, extra, .. } => Tracking::PointwiseL1 {
                weights: base.iter().zip(extra).map(|(b, e)| gamma * b + e).collect(),
                target: self.x_d.clone(),
            },
            Family::MaxNorm { k0 } => Tracking::MaxNormWindow {
                gamma,
                window: (*k0, self.sys.grid().steps()),
                target: self.x_d.clone(),
            },
            Family::GroupL2 { trace } => Tracking::GroupL2Window {
                gamma,
                trace: trace.clone(),
                target: self.x_d.clone(),
            },
        };
        let l1 = match &self.family {
            Family::Pointwise { control_l1, .. } => *control_l1,
            _ => 0.0,
        };
        ObjectiveSpec::for_system(&self.sys, &self.u_d, l1, tracking)
    }

    pub fn grid(&self) -> &TimeGrid {
        self.sys.grid()
    }

    /// The compared quantity per node.
    pub fn observe(&self, x: &Series) -> Series {
        match &self.observed {
            None => x.clone(),
            Some(coords) => {
                let rows: Vec<Vec<f64>> = x.iter().map(|xk| coords.iter().map(|&i| xk[i]).collect()).collect();
                Series::from_rows(&rows).expect("uniform rows")
            }
        }
    }

    pub fn detect(&self, rep: &SolveReport, gamma: f64) -> Result<TurnpikeReport> {
        let t = detect(&self.observe(&rep.x_opt), &rep.u_opt, &self.x_d, &self.u_d, DEFAULT_TOL)?;
        Ok(t.with_prediction(gamma, self.predicted_t0(gamma)))
    }

    pub fn predicted_t0(&self, gamma: f64) -> Option<f64> {
        match &self.oracle {
            Oracle::Example1 => solve_t0(gamma).ok(),
            Oracle::General { solution, .. } if gamma == solution.gamma() => Some(solution.t0()),
            Oracle::General { dynamics, .. } => {
                let p = ScalarProblem::new(dynamics.clone(), gamma).ok()?;
                general_solution(&p).ok().map(|s| s.t0())
            }
            Oracle::Holdable { k0, .. } => Some(self.grid().time(*k0)),
            Oracle::Nodal { .. } | Oracle::None => None,
        }
    }
}

pub fn prepare(scenario: &Scenario) -> Result<Prepared> {
    match scenario {
        Scenario::Example1(p) => prepare_example1(p.gamma, p.horizon, p.steps, ScenarioKind::Example1),
        Scenario::Sweep(p) => {
            let first = *p
                .gammas
                .first()
                .ok_or_else(|| Error::Scenario("parameters.gammas: empty".into()))?;
            let mut prep = prepare_example1(first.max(f64::MIN_POSITIVE), p.horizon, p.steps, ScenarioKind::Sweep)?;
            if let Some(t1) = p.target_time {
                if !(t1 > 0.0 && t1 < p.horizon) {
                    return Err(Error::Scenario(format!(
                        "parameters.target_time: {t1} outside (0, {})",
                        p.horizon
                    )));
                }
                prep.target_index = Some((t1 / prep.grid().dt()).round() as usize);
                prep.analytic_threshold = example1_gamma_for(t1);
            }
            Ok(prep)
        }
        Scenario::ScalarGeneral(p) => prepare_general(p),
        Scenario::WaveMax(p) => prepare_wave(p, true),
        Scenario::WaveSingularL1(p) => prepare_wave(p, false),
        Scenario::Nodal2x2(p) => prepare_nodal(p),
    }
}

/// `γ` with `t₀(γ) = t₁` for Example 1, from `(t₁ − 1)e^{t₁} = 1/γ − 1`.
pub fn example1_gamma_for(t1: f64) -> Option<f64> {
    let denom = 1.0 + (t1 - 1.0) * t1.exp();
    (denom > 0.0).then(|| 1.0 / denom)
}

fn scenario_err(key: &str, e: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("parameters.{key}: {e}"))
}

fn prepare_example1(gamma: f64, horizon: f64, steps: usize, kind: ScenarioKind) -> Result<Prepared> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(scenario_err("gamma", format!("must be positive, got {gamma}")));
    }
    let grid = TimeGrid::new(horizon, steps).map_err(|e| scenario_err("horizon/steps", e))?;
    let sys = from_scalar_ode(
        &Coefficient::constant(1.0),
        &Coefficient::exponential(1.0, 1.0),
        grid,
        -1.0,
        OdeScheme::ImplicitEuler,
    )
    .map_err(|e| scenario_err("steps", e))?;
    let mut base = vec![1.0; steps + 1];
    base[0] = 0.0;
    Ok(Prepared {
        kind,
        sys,
        x_d: vec![0.0],
        u_d: vec![0.0],
        gamma,
        family: Family::Pointwise {
            base,
            extra: vec![0.0; steps + 1],
            control_l1: 1.0,
        },
        observed: None,
        target_index: None,
        analytic_threshold: None,
        oracle: Oracle::Example1,
    })
}

fn prepare_general(p: &ScalarGeneralScenario) -> Result<Prepared> {
    let dynamics = ScalarDynamics::new(p.f.clone(), p.g.clone(), p.alpha, p.horizon)
        .map_err(|e| scenario_err("f/g/alpha/horizon", e))?;
    let (gamma, threshold) = match (p.gamma, p.t1) {
        (Some(g), None) => (g, None),
        (None, Some(t1)) => {
            let th = gamma_threshold(&dynamics, t1).map_err(|e| scenario_err("t1", e))?;
            (th.gamma, Some(Box::new(th)))
        }
        _ => {
            return Err(Error::Scenario(
                "parameters: give exactly one of `gamma` and `t1`".into(),
            ))
        }
    };
    let solution =
        general_solution(&ScalarProblem::new(dynamics.clone(), gamma).map_err(|e| scenario_err("gamma", e))?)?;
    if !(p.pin_weight.is_finite() && p.pin_weight > 0.0) {
        return Err(scenario_err("pin_weight", "must be positive"));
    }
    let grid = TimeGrid::new(p.horizon, p.steps).map_err(|e| scenario_err("horizon/steps", e))?;
    let sys = from_scalar_ode(&p.f, &p.g, grid, p.alpha, p.scheme).map_err(|e| scenario_err("steps", e))?;
    let n = p.steps;
    let (base, mut extra) = match p.scheme {
        // Trapezoidal quadrature matches the trapezoidal dynamics.
        OdeScheme::Trapezoidal => {
            let mut b = vec![1.0; n + 1];
            b[0] = 0.5;
            b[n] = 0.5;
            (b, vec![0.0; n + 1])
        }
        OdeScheme::ImplicitEuler => {
            let mut b = vec![1.0; n + 1];
            b[0] = 0.0;
            (b, vec![0.0; n + 1])
        }
    };
    extra[n] = p.pin_weight / grid.dt();
    Ok(Prepared {
        kind: ScenarioKind::ScalarGeneral,
        sys,
        x_d: vec![0.0],
        u_d: vec![0.0],
        gamma,
        family: Family::Pointwise {
            base,
            extra,
            control_l1: 1.0,
        },
        observed: None,
        target_index: p.t1.map(|t1| (t1 / grid.dt()).round() as usize),
        analytic_threshold: threshold.as_ref().map(|t| t.gamma),
        oracle: Oracle::General {
            dynamics,
            solution: Box::new(solution),
            threshold,
        },
    })
}

/// Rest state of the wave held by the boundary value `u_d`.
pub fn wave_rest_state(nx: usize, u_d: f64) -> Vec<f64> {
    let mut x = vec![-u_d; nx];
    x.extend(vec![u_d; nx]);
    x
}

fn prepare_wave(p: &WaveScenario, max_norm: bool) -> Result<Prepared> {
    let mut hp = HyperbolicParams::wave(p.nx);
    hp.length = p.length;
    let steps = p.steps.unwrap_or(3 * p.nx);
    let k0 = p.k0.unwrap_or(2 * p.nx);
    if k0 >= steps {
        return Err(scenario_err("k0", format!("{k0} must be below steps = {steps}")));
    }
    let grid = hp.grid(steps).map_err(|e| scenario_err("steps", e))?;
    let sys = from_diag_hyperbolic(&hp, grid).map_err(|e| scenario_err("nx", e))?;
    let x_d = wave_rest_state(p.nx, p.u_d);
    let (_, report) = holdable_extension(&sys, &x_d, &[p.u_d], k0).map_err(|e| scenario_err("k0", e))?;
    let threshold = report.c1_hat * report.control_distance(&[p.u_d]);
    let (family, gamma) = if max_norm {
        (Family::MaxNorm { k0 }, p.gamma.unwrap_or(2.0 * threshold))
    } else {
        let base = singular_weights(&grid, k0)?;
        let extra = vec![0.0; base.len()];
        (
            Family::Pointwise {
                base,
                extra,
                control_l1: 0.0,
            },
            p.gamma.unwrap_or(1.0),
        )
    };
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(scenario_err("gamma", format!("must be >= 0, got {gamma}")));
    }
    Ok(Prepared {
        kind: if max_norm {
            ScenarioKind::WaveMax
        } else {
            ScenarioKind::WaveSingularL1
        },
        sys,
        x_d,
        u_d: vec![p.u_d],
        gamma,
        family,
        observed: None,
        target_index: Some(k0),
        analytic_threshold: max_norm.then_some(threshold),
        oracle: Oracle::Holdable {
            k0,
            report: Box::new(report),
        },
    })
}

fn prepare_nodal(p: &NodalScenario) -> Result<Prepared> {
    let hp = HyperbolicParams {
        d_plus: p.d_plus,
        d_minus: p.d_minus,
        eta0: p.eta0,
        coupling: vec![p.coupling],
        length: p.length,
        cells: p.nx,
        boundary: Boundary::Dirichlet {
            r_minus_right: p.r_minus_right,
        },
    };
    let steps = p.steps.unwrap_or(3 * p.nx);
    let k0 = p.k0.unwrap_or(3 * p.nx / 2);
    let grid = hp.grid(steps).map_err(|e| scenario_err("steps", e))?;
    let delay = p.length / p.d_plus;
    if grid.time(k0) < delay - 1e-12 {
        return Err(scenario_err(
            "k0",
            format!(
                "window start t = {} precedes the transport delay {delay}",
                grid.time(k0)
            ),
        ));
    }
    if k0 > steps {
        return Err(scenario_err("k0", format!("{k0} exceeds steps = {steps}")));
    }
    let sys = from_diag_hyperbolic(&hp, grid).map_err(|e| scenario_err("d_plus/d_minus/eta0/coupling", e))?;
    // r₊ at x = L.
    let coord = p.nx - 1;
    let trace = TraceOperator::new(k0, steps, vec![coord])?;
    let report = min_norm_nodal_control(&sys, &trace, &Series::constant(steps - k0 + 1, &[p.target]))
        .map_err(|e| scenario_err("k0", e))?;
    let threshold = report.c1_hat * report.control_distance(&[p.u_d]);
    if !(p.gamma.is_finite() && p.gamma >= 0.0) {
        return Err(scenario_err("gamma", format!("must be >= 0, got {}", p.gamma)));
    }
    Ok(Prepared {
        kind: ScenarioKind::Nodal2x2,
        sys,
        x_d: vec![p.target],
        u_d: vec![p.u_d],
        gamma: p.gamma,
        family: Family::GroupL2 { trace },
        observed: Some(vec![coord]),
        target_index: Some(k0),
        analytic_threshold: Some(threshold),
        oracle: Oracle::Nodal {
            report: Box::new(report),
        },
    })
}

/// Result of a CLI operation: summary rows and the check table.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub summary: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn table(&self) -> String {
        checks::table(&self.checks)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Solve and write outputs; only solver health is checked.
    Run,
    /// Solve, write outputs and run every check attached to the scenario.
    Verify,
}

/// Apply command-line overrides.
pub fn with_overrides(mut cfg: ScenarioConfig, out: Option<&Path>, seed: Option<u64>) -> ScenarioConfig {
    if let Some(o) = out {
        cfg.output_dir = o.to_path_buf();
    }
    if let Some(s) = seed {
        cfg.solver.seed = s;
    }
    cfg
}

/// Execute the scenario of `cfg` and write its outputs to `cfg.output_dir`.
pub fn execute(cfg: &ScenarioConfig, mode: Mode) -> Result<Outcome> {
    if let Scenario::Sweep(p) = &cfg.scenario {
        return execute_sweep(cfg, &p.gammas, p.parallel, mode);
    }
    let prep = prepare(&cfg.scenario)?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    fs::write(out.join("effective_config.json"), cfg.to_json()?)?;

    let spec = prep.spec(prep.gamma)?;
    let rep = solve_primal_dual(&prep.sys, &spec, &cfg.solver)?;
    let tp = prep.detect(&rep, prep.gamma)?;
    let grid = *prep.grid();

    write_results(
        &out.join("results.csv"),
        &grid,
        &rep.u_opt,
        &rep.x_opt,
        &tp.deviation_profile,
    )?;
    write_plots(out, &prep, &rep, &tp)?;

    let mut outcome = Outcome {
        summary: summary_rows(&prep, &rep, &tp),
        checks: vec![checks::converged(&rep, &cfg.solver)],
    };
    if mode == Mode::Verify {
        outcome
            .checks
            .extend(checks::scenario_checks(&prep, &rep, &tp, &cfg.solver)?);
    }
    for c in &outcome.checks {
        outcome
            .summary
            .push((format!("check.{}", c.name), c.status.to_string()));
    }
    write_key_values(&out.join("summary.csv"), &outcome.summary)?;
    Ok(outcome)
}

/// One solve per `γ` of the scenario family; writes `sweep.csv`.
pub fn execute_sweep(cfg: &ScenarioConfig, gammas: &[f64], parallel: bool, mode: Mode) -> Result<Outcome> {
    if gammas.is_empty() {
        return Err(Error::Scenario("gammas: empty grid".into()));
    }
    let prep = prepare(&cfg.scenario)?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    fs::write(out.join("effective_config.json"), cfg.to_json()?)?;
    let mut opts = SweepOptions::new(prep.x_d.clone(), prep.u_d.clone());
    opts.target_index = prep.target_index;
    opts.analytic_threshold = prep.analytic_threshold;
    opts.parallel = parallel;
    let table = threshold_sweep_observed(
        &prep.sys,
        |g| prep.spec(g),
        |x: &Series| prep.observe(x),
        gammas,
        &opts,
        &cfg.solver,
    )
    .map_err(|e| Error::Scenario(format!("gammas: {e}")))?;
    let grid = *prep.grid();
    let opt_time = |k: Option<usize>| k.map(|k| fmt_f64(grid.time(k))).unwrap_or_default();
    let opt_idx = |k: Option<usize>| k.map(|k| k.to_string()).unwrap_or_default();
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.gamma),
                opt_idx(r.arrival_index),
                opt_time(r.arrival_index),
                opt_idx(r.support_end_index),
                r.support_end_index
                    .map(|k| fmt_f64(grid.time(k + 1)))
                    .unwrap_or_default(),
                prep.predicted_t0(r.gamma).map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.objective),
                fmt_f64(r.gap),
                r.iterations.to_string(),
                r.converged.to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_table(
        &out.join("sweep.csv"),
        &[
            "gamma",
            "arrival_index",
            "arrival_time",
            "support_end_index",
            "support_end_time",
            "predicted_t0",
            "objective",
            "gap",
            "iterations",
            "converged",
            "error",
        ],
        &rows,
    )?;
    let mut summary = vec![
        ("scenario".to_string(), kind_name(prep.kind)),
        ("rows".to_string(), table.rows.len().to_string()),
        ("target_index".to_string(), opt_idx(table.target_index)),
        (
            "empirical_threshold".to_string(),
            table.empirical_threshold.map(fmt_f64).unwrap_or_default(),
        ),
        (
            "analytic_threshold".to_string(),
            table.analytic_threshold.map(fmt_f64).unwrap_or_default(),
        ),
    ];
    let mut checks = vec![checks::sweep_rows_ok(&table)];
    if mode == Mode::Verify {
        checks.extend(checks::sweep_checks(&prep, &table));
    }
    for c in &checks {
        summary.push((format!("check.{}", c.name), c.status.to_string()));
    }
    write_key_values(&out.join("summary.csv"), &summary)?;
    Ok(Outcome { summary, checks })
}

pub fn kind_name(kind: ScenarioKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn summary_rows(prep: &Prepared, rep: &SolveReport, tp: &TurnpikeReport) -> Vec<(String, String)> {
    let grid = prep.grid();
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let idx = |v: Option<usize>| v.map(|k| k.to_string()).unwrap_or_default();
    vec![
        ("scenario".into(), kind_name(prep.kind)),
        ("gamma".into(), fmt_f64(prep.gamma)),
        ("horizon".into(), fmt_f64(grid.horizon())),
        ("steps".into(), grid.steps().to_string()),
        ("dt".into(), fmt_f64(grid.dt())),
        ("objective".into(), fmt_f64(rep.objective)),
        ("gap".into(), fmt_f64(rep.gap)),
        ("iterations".into(), rep.iterations.to_string()),
        ("converged".into(), rep.converged.to_string()),
        ("arrival_index".into(), idx(tp.arrival_index)),
        ("arrival_time".into(), opt(tp.arrival_time(grid))),
        ("support_end_index".into(), idx(tp.support_end_index)),
        ("support_end_time".into(), opt(tp.support_end_time(grid))),
        ("predicted_t0".into(), opt(tp.predicted_t0)),
        ("analytic_threshold".into(), opt(prep.analytic_threshold)),
    ]
}

fn write_plots(out: &Path, prep: &Prepared, rep: &SolveReport, tp: &TurnpikeReport) -> Result<()> {
    let grid = prep.grid();
    let n = grid.steps();
    let mut curves = Vec::new();
    let labels: Vec<String> = (0..rep.u_opt.dim())
        .map(|i| {
            if rep.u_opt.dim() == 1 {
                "u".into()
            } else {
                format!("u{i}")
            }
        })
        .collect();
    for (i, label) in labels.iter().enumerate() {
        // Repeat the last value so the step plot covers [t_{N-1}, T].
        let mut pts: Vec<(f64, f64)> = (0..n).map(|k| (grid.time(k), rep.u_opt.node(k)[i])).collect();
        pts.push((grid.time(n), rep.u_opt.node(n - 1)[i]));
        curves.push(Curve {
            label,
            points: pts,
            steps: true,
        });
    }
    let svg = line_plot("optimal control", "t", &curves, Some((prep.u_d[0], "u_d")));
    fs::write(out.join("control.svg"), svg)?;

    let observed = prep.observe(&rep.x_opt);
    let svg = if observed.dim() == 1 {
        let pts = (0..=n).map(|k| (grid.time(k), observed.node(k)[0])).collect();
        let label = if prep.observed.is_some() { "trace" } else { "x" };
        line_plot(
            "optimal state",
            "t",
            &[Curve {
                label,
                points: pts,
                steps: false,
            }],
            Some((prep.x_d[0], "x_d")),
        )
    } else {
        let pts = (0..=n).map(|k| (grid.time(k), tp.deviation_profile[k])).collect();
        line_plot(
            "distance to the desired state",
            "t",
            &[Curve {
                label: "|x - x_d|",
                points: pts,
                steps: false,
            }],
            Some((0.0, "x_d")),
        )
    };
    fs::write(out.join("state.svg"), svg)?;
    Ok(())
}

/// Largest `|x_k − x_d|` over the given nodes, on the observed quantity.
pub fn window_deviation(prep: &Prepared, x: &Series, nodes: impl Iterator<Item = usize>) -> f64 {
    let obs = prep.observe(x);
    nodes.map(|k| dist2(obs.node(k), &prep.x_d)).fold(0.0, f64::max)
}

pub fn load_and_execute(path: &Path, out: Option<&Path>, seed: Option<u64>, mode: Mode) -> Result<Outcome> {
    let cfg = with_overrides(ScenarioConfig::load(path)?, out, seed);
    execute(&cfg, mode)
}

pub fn load_and_sweep(
    path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    gammas: Option<&[f64]>,
    parallel: bool,
    mode: Mode,
) -> Result<Outcome> {
    let cfg = with_overrides(ScenarioConfig::load(path)?, out, seed);
    let grid: Vec<f64> = match (gammas, &cfg.scenario) {
        (Some(g), _) => g.to_vec(),
        (None, Scenario::Sweep(p)) => p.gammas.clone(),
        (None, _) => return Err(Error::Scenario("--gammas is required for non-sweep scenarios".into())),
    };
    let parallel = parallel || matches!(&cfg.scenario, Scenario::Sweep(p) if p.parallel);
    execute_sweep(&cfg, &grid, parallel, mode)
}
