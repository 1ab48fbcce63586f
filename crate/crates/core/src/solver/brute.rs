use nalgebra::{DMatrix, DVector};

use super::SolveReport;
use crate::dynamics::DiscreteLinearSystem;
use crate::error::{Error, Result};
use crate::objectives::{evaluate, ObjectiveSpec, Tracking};
use crate::Series;

const MAX_STEPS: usize = 5;
const SIGN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Neg => -1.0,
            Sign::Zero => 0.0,
            Sign::Pos => 1.0,
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            Sign::Neg => v <= SIGN_TOL,
            Sign::Zero => true,
            Sign::Pos => v >= -SIGN_TOL,
        }
    }
}

const SIGNS: [Sign; 3] = [Sign::Neg, Sign::Zero, Sign::Pos];

/// Exact optimum of a tiny scalar problem with pointwise L¹ tracking by
/// enumeration of sign patterns.
///
/// Every control `u_k` and every tracked deviation `y_k − x_d` is assigned
/// a sign in `{−, 0, +}`. On a pattern the objective is quadratic in `u`,
/// the zero entries become equality constraints, and the KKT system is
/// solved densely. Candidates that violate their own pattern are dropped;
/// the best survivor is the optimum, since the optimum's own pattern always
/// survives.
pub fn brute_force_oracle(sys: &DiscreteLinearSystem, spec: &ObjectiveSpec) -> Result<SolveReport> {
    spec.check_system(sys)?;
    if sys.state_dim() != 1 || sys.control_dim() != 1 {
        return Err(Error::Unsupported(
            "brute-force oracle needs scalar state and control".into(),
        ));
    }
    let steps = sys.grid().steps();
    if steps > MAX_STEPS {
        return Err(Error::Unsupported(format!(
            "brute-force oracle handles N <= {MAX_STEPS}, got {steps}"
        )));
    }
    let (weights, target) = match &spec.tracking {
        Tracking::PointwiseL1 { weights, target } => (weights, target[0]),
        _ => {
            return Err(Error::Unsupported(
                "brute-force oracle needs pointwise L1 tracking".into(),
            ))
        }
    };
    let dt = sys.grid().dt();
    let l1 = spec.control_l1_weight;
    let u_d = spec.u_d.as_slice();

    let free = sys.free_response().first_coordinates();
    let mut lmap = DMatrix::<f64>::zeros(steps + 1, steps);
    for j in 0..steps {
        let mut e = Series::zeros(steps, 1);
        e.as_mut_slice()[j] = 1.0;
        let col = sys.simulate_linear(&e)?.first_coordinates();
        for (k, v) in col.into_iter().enumerate() {
            lmap[(k, j)] = v;
        }
    }
    let tracked: Vec<usize> = spec.tracked_nodes();
    let bound: Vec<f64> = tracked.iter().map(|&k| weights[k] * dt * spec.state_weight).collect();

    let vars = steps + tracked.len();
    let total = 3usize.pow(vars as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pattern = vec![Sign::Neg; vars];
    for code in 0..total {
        let mut c = code;
        for s in pattern.iter_mut() {
            *s = SIGNS[c % 3];
            c /= 3;
        }
        let (us, ys) = pattern.split_at(steps);

        // ½ dt ‖u‖² + qᵀu subject to E u = e.
        let mut q = DVector::<f64>::zeros(steps);
        for j in 0..steps {
            q[j] = -dt * u_d[j] + dt * l1 * us[j].value();
        }
        for (t, &k) in tracked.iter().enumerate() {
            for j in 0..steps {
                q[j] += bound[t] * ys[t].value() * lmap[(k, j)];
            }
        }
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for j in 0..steps {
            if us[j] == Sign::Zero {
                let mut r = vec![0.0; steps];
                r[j] = 1.0;
                rows.push((r, 0.0));
            }
        }
        for (t, &k) in tracked.iter().enumerate() {
            if ys[t] == Sign::Zero {
                rows.push(((0..steps).map(|j| lmap[(k, j)]).collect(), target - free[k]));
            }
        }
        let size = steps + rows.len();
        let mut kkt = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        for j in 0..steps {
            kkt[(j, j)] = dt;
            rhs[j] = -q[j];
        }
        for (i, (row, e)) in rows.iter().enumerate() {
            for j in 0..steps {
                kkt[(steps + i, j)] = row[j];
                kkt[(j, steps + i)] = row[j];
            }
            rhs[steps + i] = *e;
        }
        let svd = kkt.clone().svd(true, true);
        let Ok(sol) = svd.solve(&rhs, 1e-12) else { continue };
        if (&kkt * &sol - &rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
            continue;
        }
        let u: Vec<f64> = (0..steps).map(|j| sol[j]).collect();
        if !us.iter().zip(&u).all(|(s, &v)| s.admits(v)) {
            continue;
        }
        let consistent = tracked.iter().zip(ys).all(|(&k, s)| {
            let y = free[k] + (0..steps).map(|j| lmap[(k, j)] * u[j]).sum::<f64>();
            s.admits(y - target)
        });
        if !consistent {
            continue;
        }
        let x = sys.simulate(&Series::from_scalars(u.clone()))?;
        let value = evaluate(spec, &Series::from_scalars(u.clone()), &x)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, u));
        }
    }
    let (objective, u) = best.ok_or_else(|| Error::Infeasible("no sign pattern produced a candidate".into()))?;
    let u_opt = Series::from_scalars(u);
    let x_opt = sys.simulate(&u_opt)?;
    Ok(SolveReport {
        u_opt,
        x_opt,
        objective,
        gap: 0.0,
        iterations: total,
        converged: true,
        dual: Vec::new(),
        dual_value: objective,
        operator_norm: f64::NAN,
    })
}
