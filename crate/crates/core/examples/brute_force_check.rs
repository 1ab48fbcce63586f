// Cross-check the primal-dual solver against exhaustive active-set
// enumeration on a tiny problem.
//
// ```bash
// cargo run --example brute_force_check
// ```

use turnpike_lab::dynamics::{from_scalar_ode, OdeScheme, TimeGrid};
use turnpike_lab::objectives::{ObjectiveSpec, Tracking};
use turnpike_lab::scalar_oracle::Coefficient;
use turnpike_lab::solver::{brute_force_oracle, solve_primal_dual, SolverConfig};

pub fn run_example() -> turnpike_lab::Result<f64> {
    let sys = from_scalar_ode(
        &Coefficient::constant(0.5),
        &Coefficient::constant(1.0),
        TimeGrid::new(1.0, 4)?,
        -1.0,
        OdeScheme::ImplicitEuler,
    )?;
    let weights = vec![0.0, 0.5, 1.0, 2.0, 2.0];
    let spec = ObjectiveSpec::for_system(
        &sys,
        &[0.1],
        0.3,
        Tracking::PointwiseL1 {
            weights,
            target: vec![0.0],
        },
    )?;
    let brute = brute_force_oracle(&sys, &spec)?;
    let pd = solve_primal_dual(
        &sys,
        &spec,
        &SolverConfig {
            tol_gap: 1e-13,
            ..SolverConfig::default()
        },
    )?;
    println!(
        "brute force  {:.12}  u {:?}",
        brute.objective,
        brute.u_opt.first_coordinates()
    );
    println!(
        "primal-dual  {:.12}  u {:?}",
        pd.objective,
        pd.u_opt.first_coordinates()
    );
    let gap = (pd.objective - brute.objective).abs();
    println!("objective gap {gap:.2e}");
    Ok(gap)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
