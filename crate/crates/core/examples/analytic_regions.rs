// Closed-form operating point and region membership at the baseline.
//
// cargo run --example analytic_regions

use ehcrn::analytic::{analytic_point, default_a_grid, DecoupledSystem};
use ehcrn::boundary::linear_grid;
use ehcrn::*;

pub fn run_example() -> Result<()> {
    let p = SystemParams::baseline(0.6, 0.6)?;
    println!("mu_p = {:.4}", pu_service_rate(&p));

    let pt = RatePoint::new(0.2, 0.1)?;
    let ap = analytic_point(&p, DecoupledSystem::DominantI { a: 0.5 }, pt)?;
    println!(
        "at {pt:?}: lambda_ps = {:.4}, I = {:.4}, Pr(Q_es != 0) = {:.4}, mu_s = {:.4}, mu_ps = {:.4}",
        ap.lambda_ps, ap.idle_prob, ap.es_busy_prob, ap.mu_s, ap.mu_ps
    );

    let grid = default_a_grid();
    println!(
        "R1(0.5): {}  R2(0.5): {}  union: {}  noncoop: {}",
        region1_contains(&p, 0.5, pt),
        region2_contains(&p, 0.5, pt),
        union_contains(&p, pt, &grid),
        noncoop_contains(&p, pt)
    );

    let union = extract_boundary(&p, &Region::Union { a_grid: grid }, &linear_grid(0.35, 0.05), 1e-6);
    for (lp, ls) in union.points() {
        println!("  lambda_p = {lp:.2}  max lambda_s = {ls:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
