// Max-norm window problem P against the point-penalty problem Q on the
// wave equation, above the controllability threshold.
//
// ```bash
// cargo run --release --example wave_pq
// ```

use turnpike_lab::dynamics::{from_diag_hyperbolic, holdable_extension, HyperbolicParams};
use turnpike_lab::scenario::wave_rest_state;
use turnpike_lab::solver::SolverConfig;
use turnpike_lab::turnpike::check_pq_equivalence;

pub fn run_example() -> turnpike_lab::Result<bool> {
    let nx = 20;
    let p = HyperbolicParams::wave(nx);
    let sys = from_diag_hyperbolic(&p, p.grid(3 * nx)?)?;
    let (x_d, u_d) = (wave_rest_state(nx, 0.5), [0.5]);
    let k0 = 2 * nx;

    let (_, ctrl) = holdable_extension(&sys, &x_d, &u_d, k0)?;
    let threshold = ctrl.c1_hat * ctrl.control_distance(&u_d);
    println!("C1 = {:.4}, threshold {threshold:.4}", ctrl.c1_hat);

    for gamma in [0.25 * threshold, 2.0 * threshold] {
        let pq = check_pq_equivalence(&sys, gamma, k0, &x_d, &u_d, &SolverConfig::default())?;
        println!(
            "gamma {gamma:8.4}: v_P {:.8}  v_Q {:.8}  window deviation {:.2e}  guaranteed {}",
            pq.v_p, pq.v_q, pq.max_deviation, pq.guaranteed
        );
        if pq.guaranteed && !pq.passes() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
