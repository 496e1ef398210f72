// Simulated against analytic boundary. The default run is a coarse grid;
// pass `--full` for the full fig4 comparison (a few minutes per core).
//
// cargo run --release --example compare_boundaries [--full]

use ehcrn::boundary::linear_grid;
use ehcrn::sweep::{builtin_experiment, ComparisonReport};
use ehcrn::*;

fn print(report: &ComparisonReport) {
    let analytic = &report.boundaries[0].boundary;
    let simulated = &report.boundaries[1].boundary;
    println!("lambda_p  analytic  simulated  uncertain");
    for i in 0..analytic.len() {
        println!(
            "{:8.3}  {:8.4}  {:9.4}  {}",
            analytic.lambda_p_grid[i], analytic.lambda_s_max[i], simulated.lambda_s_max[i], simulated.uncertain[i]
        );
    }
    println!("max gap over certain points: {:.4}", report.max_gap.unwrap_or(0.0));
}

pub fn run_with(full: bool) -> Result<()> {
    let mut spec = builtin_experiment("fig4")?;
    spec.mode = Mode::Compare;
    if !full {
        spec.grids.lambda_p = linear_grid(0.3, 0.1);
        spec.grids.sim_bisect_steps = 4;
        spec.sim.horizon_slots = 40_000;
        spec.sim.burn_in_slots = 4_000;
    }
    print(&run_experiment(&spec)?);
    Ok(())
}

pub fn run_example() -> Result<()> {
    run_with(false)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_with(std::env::args().any(|a| a == "--full"))
}
