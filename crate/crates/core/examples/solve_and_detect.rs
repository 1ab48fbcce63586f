// Transcribe Example 1 with implicit Euler, solve it with the primal-dual
// method and locate the turnpike arrival.
//
// ```bash
// cargo run --example solve_and_detect
// ```

use turnpike_lab::dynamics::{from_scalar_ode, OdeScheme, TimeGrid};
use turnpike_lab::objectives::{ObjectiveSpec, Tracking};
use turnpike_lab::scalar_oracle::{solve_t0, Coefficient};
use turnpike_lab::solver::{solve_primal_dual, SolverConfig};
use turnpike_lab::turnpike::{detect, DEFAULT_TOL};

pub fn run_example() -> turnpike_lab::Result<(f64, f64)> {
    let (gamma, steps) = (1.0, 200);
    // y' = y + e^t u, y(0) = -1 on [0, 2].
    let sys = from_scalar_ode(
        &Coefficient::constant(1.0),
        &Coefficient::exponential(1.0, 1.0),
        TimeGrid::new(2.0, steps)?,
        -1.0,
        OdeScheme::ImplicitEuler,
    )?;
    // γ|y| at every node but the initial one, plus |u| on the control.
    let mut weights = vec![gamma; steps + 1];
    weights[0] = 0.0;
    let spec = ObjectiveSpec::for_system(
        &sys,
        &[0.0],
        1.0,
        Tracking::PointwiseL1 {
            weights,
            target: vec![0.0],
        },
    )?;
    let rep = solve_primal_dual(&sys, &spec, &SolverConfig::default())?;
    println!(
        "objective {:.8}, gap {:.2e} after {} iterations",
        rep.objective, rep.gap, rep.iterations
    );

    let tp = detect(&rep.x_opt, &rep.u_opt, &[0.0], &[0.0], DEFAULT_TOL)?;
    let arrival = tp.arrival_time(sys.grid()).unwrap_or(f64::NAN);
    let t0 = solve_t0(gamma)?;
    println!("arrival {arrival:.3} vs closed-form t0 {t0:.6}");
    Ok((arrival, t0))
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
