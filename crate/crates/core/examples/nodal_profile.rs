// 2×2 hyperbolic system with boundary control: steer the outflow trace
// r₊(L) to a prescribed value on a time window with a group-L² penalty.
//
// ```bash
// cargo run --release --example nodal_profile
// ```

use turnpike_lab::dynamics::{from_diag_hyperbolic, Boundary, HyperbolicParams, TraceOperator};
use turnpike_lab::objectives::{ObjectiveSpec, Tracking};
use turnpike_lab::solver::{solve_primal_dual, SolverConfig};

pub fn run_example() -> turnpike_lab::Result<f64> {
    let nx = 20;
    let p = HyperbolicParams {
        d_plus: 1.0,
        d_minus: -1.0,
        eta0: -0.1,
        coupling: vec![[[1.0, 0.0], [0.0, 1.0]]],
        length: 1.0,
        cells: nx,
        boundary: Boundary::Dirichlet { r_minus_right: 0.2 },
    };
    let (steps, k0, target) = (60, 30, 0.5);
    let sys = from_diag_hyperbolic(&p, p.grid(steps)?)?;
    let trace = TraceOperator::new(k0, steps, vec![nx - 1])?;
    let spec = ObjectiveSpec::for_system(
        &sys,
        &[0.0],
        0.0,
        Tracking::GroupL2Window {
            gamma: 1.5,
            trace: trace.clone(),
            target: vec![target],
        },
    )?;
    let rep = solve_primal_dual(&sys, &spec, &SolverConfig::default())?;

    let worst = trace
        .nodes()
        .map(|k| (rep.x_opt.node(k)[nx - 1] - target).abs())
        .fold(0.0, f64::max);
    for k in (0..=steps).step_by(6) {
        println!("t {:4.2}  r+(L) {:9.6}", sys.grid().time(k), rep.x_opt.node(k)[nx - 1]);
    }
    println!("max trace deviation on the window: {worst:.2e}");
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
