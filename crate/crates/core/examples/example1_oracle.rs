// Closed-form Example 1: the arrival time t₀(γ) and the optimal pair.
//
// ```bash
// cargo run --example example1_oracle
// ```

use turnpike_lab::scalar_oracle::{example1_control, example1_objective, example1_state, solve_t0, Example1Params};

pub fn run_example() -> turnpike_lab::Result<Vec<(f64, f64)>> {
    let mut arrivals = Vec::new();
    for gamma in [0.5, 1.0, 2.0, 10.0] {
        let t0 = solve_t0(gamma)?;
        let p = Example1Params::new(gamma, 2.0)?;
        println!("gamma {gamma:>4}: t0 = {t0:.10}, J = {:.10}", example1_objective(&p)?);
        arrivals.push((gamma, t0));
    }

    let p = Example1Params::new(1.0, 2.0)?;
    println!("\n   t        u(t)        y(t)");
    for i in 0..=8 {
        let t = 0.25 * i as f64;
        println!(
            "{t:5.2}  {:10.6}  {:10.6}",
            example1_control(&p, t)?,
            example1_state(&p, t)?
        );
    }
    Ok(arrivals)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
