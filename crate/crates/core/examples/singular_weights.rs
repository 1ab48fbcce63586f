// Time-weighted problem R: weights γ/(t - t₀) blow up at t₀ and force the
// state onto the turnpike right after it.
//
// ```bash
// cargo run --release --example singular_weights
// ```

use turnpike_lab::dynamics::{from_scalar_ode, OdeScheme, TimeGrid};
use turnpike_lab::objectives::{singular_weights, ObjectiveSpec, Tracking};
use turnpike_lab::scalar_oracle::Coefficient;
use turnpike_lab::solver::{solve_primal_dual, SolverConfig};
use turnpike_lab::turnpike::{detect, DEFAULT_TOL};

pub fn run_example() -> turnpike_lab::Result<Vec<Option<usize>>> {
    let mut late = Vec::new();
    for steps in [100usize, 200] {
        let sys = from_scalar_ode(
            &Coefficient::constant(1.0),
            &Coefficient::exponential(1.0, 1.0),
            TimeGrid::new(2.0, steps)?,
            -1.0,
            OdeScheme::ImplicitEuler,
        )?;
        let k0 = steps / 2;
        let weights = singular_weights(sys.grid(), k0)?;
        let spec = ObjectiveSpec::for_system(
            &sys,
            &[0.0],
            0.0,
            Tracking::PointwiseL1 {
                weights,
                target: vec![0.0],
            },
        )?;
        let rep = solve_primal_dual(&sys, &spec, &SolverConfig::default())?;
        let tp = detect(&rep.x_opt, &rep.u_opt, &[0.0], &[0.0], DEFAULT_TOL)?;
        let cells = tp.arrival_index.map(|a| a.saturating_sub(k0));
        println!(
            "N {steps:4}: arrival {:?} (k0 {k0}), cells late {cells:?}",
            tp.arrival_index
        );
        late.push(cells);
    }
    Ok(late)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
