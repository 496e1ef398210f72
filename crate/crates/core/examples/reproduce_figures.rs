// Every built-in experiment, analytic, with CSVs and reference checks.
//
// cargo run --example reproduce_figures [OUT_DIR]

use std::path::Path;

use ehcrn::csv::emit_boundary_csv;
use ehcrn::sweep::reference_checks;
use ehcrn::*;

pub fn run_into(dir: &Path) -> Result<()> {
    for spec in builtin_experiments() {
        let report = run_experiment(&spec)?;
        let files = emit_boundary_csv(&report, dir)?;
        println!("{}: {} file(s)", spec.name, files.len());
        for c in reference_checks(&spec, &report) {
            println!("  {:<40} {:.4} (reference {}, off by {:.4})", c.quantity, c.computed, c.reference, c.abs_diff());
        }
    }
    Ok(())
}

pub fn run_example() -> Result<()> {
    run_into(&std::env::temp_dir().join("ehcrn-figures"))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out".to_string());
    run_into(Path::new(&dir))
}
