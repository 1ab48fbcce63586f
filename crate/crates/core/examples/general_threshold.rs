// General scalar oracle for y' = f y + g u and the threshold weight γ(t₁)
// that makes the control switch off exactly at t₁.
//
// ```bash
// cargo run --example general_threshold
// ```

use turnpike_lab::scalar_oracle::{gamma_threshold, general_solution, Coefficient, ScalarDynamics, ScalarProblem};

pub fn run_example() -> turnpike_lab::Result<(f64, f64)> {
    let d = ScalarDynamics::new(Coefficient::constant(1.0), Coefficient::constant(1.0), -1.0, 3.0)?;
    let sol = general_solution(&ScalarProblem::new(d.clone(), 2.0)?)?;
    println!(
        "gamma 2: lambda = {:.10}, t0 = {:.10}, moment residual {:.1e}",
        sol.lambda(),
        sol.t0(),
        sol.moment_residual()
    );

    let th = gamma_threshold(&d, 1.0)?;
    println!(
        "t1 = 1: gamma(t1) = {:.10}, identity residual {:.1e}, g' <= f g: {}",
        th.gamma, th.identity_residual, th.derivative_assumption_holds
    );
    let again = general_solution(&ScalarProblem::new(d, th.gamma)?)?;
    println!("re-solved at gamma(t1): t0 = {:.10}", again.t0());
    Ok((th.gamma, again.t0()))
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
