// Load a JSON scenario, run it with checks and print the summary. This is
// what `turnpike-lab verify` does.
//
// ```bash
// cargo run --release --example run_config -- configs/scalar_threshold.json
// ```

use std::path::PathBuf;

use turnpike_lab::scenario::{execute, Mode, Outcome, ScenarioConfig};

pub fn run_example(config: &std::path::Path, out: &std::path::Path) -> turnpike_lab::Result<Outcome> {
    let mut cfg = ScenarioConfig::load(config)?;
    cfg.output_dir = out.to_path_buf();
    let outcome = execute(&cfg, Mode::Verify)?;
    print!("{}", outcome.table());
    Ok(outcome)
}

#[allow(dead_code)]
fn main() -> turnpike_lab::Result<()> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/scalar_threshold.json")));
    let outcome = run_example(&config, &std::env::temp_dir().join("turnpike-lab-example"))?;
    if outcome.failed() {
        std::process::exit(2);
    }
    Ok(())
}
