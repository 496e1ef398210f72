// Stability verdict and measured rates at a single operating point.
//
// cargo run --release --example simulate_point [lambda_p lambda_s]

use ehcrn::*;

pub fn run_example_at(lambda_p: f64, lambda_s: f64, config: &SimConfig) -> Result<()> {
    let p = SystemParams::baseline(0.6, 0.6)?;
    let pt = RatePoint::new(lambda_p, lambda_s)?;
    let policy = PolicySpec::cooperative(0.5)?;

    let v = is_stable_point(config, &p, pt, policy)?;
    println!("{pt:?} under {policy}: stable = {} (unanimous {})", v.stable, v.unanimous());
    for (name, q) in v.queues.iter() {
        println!(
            "  {name}: drift {:+.2e} .. {:+.2e}, {} of {} unstable",
            q.drift_min, q.drift_max, q.unstable_votes, q.replications
        );
    }

    let m = measure_service_rates(config, &p, pt, policy)?;
    println!(
        "  measured mu_p = {:.4}, lambda_ps = {:.4}, I = {:.4}, censored = {}",
        m.point.mu_p, m.point.lambda_ps, m.point.idle_prob, m.censored
    );
    println!("  analytic lambda_ps = {:.4}", relay_arrival_rate(&p, lambda_p)?);
    Ok(())
}

pub fn run_example() -> Result<()> {
    let quick = SimConfig {
        horizon_slots: 40_000,
        burn_in_slots: 4_000,
        ..SimConfig::default()
    };
    run_example_at(0.2, 0.1, &quick)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    match args[..] {
        [lp, ls] => run_example_at(lp, ls, &SimConfig::default()),
        _ => run_example_at(0.2, 0.1, &SimConfig::default()),
    }
}
