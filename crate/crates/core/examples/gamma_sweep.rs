// Sweep the tracking weight for Example 1 and watch the arrival move
// earlier as γ grows.
//
// ```bash
// cargo run --release --example gamma_sweep
// ```

use turnpike_lab::scenario::{prepare, Scenario, SweepScenario};
use turnpike_lab::solver::SolverConfig;
use turnpike_lab::turnpike::{threshold_sweep_observed, SweepOptions};

pub fn run_example() -> turnpike_lab::Result<Vec<Option<usize>>> {
    let scenario = Scenario::Sweep(SweepScenario {
        gammas: vec![0.0, 0.5, 1.0, 2.0, 4.0],
        horizon: 2.0,
        steps: 200,
        target_time: Some(1.0),
        parallel: true,
    });
    let prep = prepare(&scenario)?;
    let mut opts = SweepOptions::new(prep.x_d.clone(), prep.u_d.clone());
    opts.target_index = prep.target_index;
    opts.analytic_threshold = prep.analytic_threshold;
    opts.parallel = true;
    let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
    let table = threshold_sweep_observed(
        &prep.sys,
        |g| prep.spec(g),
        |x| prep.observe(x),
        &grid,
        &opts,
        &SolverConfig::default(),
    )?;

    println!("gamma  arrival  t_arrival  predicted t0");
    for r in &table.rows {
        let t = r.arrival_index.map(|k| prep.grid().time(k));
        println!(
            "{:5.2}  {:>7?}  {:>9.3?}  {:.4?}",
            r.gamma,
            r.arrival_index,
            t,
            prep.predicted_t0(r.gamma)
        );
    }
    println!(
        "reaches t = 1 from gamma {:?} (closed form {:?})",
        table.empirical_threshold, table.analytic_threshold
    );
    Ok(table.rows.iter().map(|r| r.arrival_index).collect())
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    run_example().map(|_| ())
}
