// Where cooperation starts to pay off for the SU.
//
// cargo run --example crossover

use ehcrn::sweep::builtin_experiment;
use ehcrn::*;

pub fn run_example() -> Result<()> {
    let c = crossover_lambda_p(&SystemParams::baseline(0.5, 0.8)?)?;
    println!("D = {:.4}", c.d);
    for les in [0.6, 0.8, 0.9] {
        println!("lambda_es = {les}: Lambda_p = {:.4}", c.lambda_p(les));
    }

    // The same point read off the analytic boundaries.
    for fig in ["fig9", "fig10"] {
        let report = run_experiment(&builtin_experiment(fig)?)?;
        for x in &report.crossovers {
            println!(
                "{fig}: boundaries cross at {:.4}, closed form {:.4}",
                x.measured.unwrap_or(f64::NAN),
                x.predicted.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
