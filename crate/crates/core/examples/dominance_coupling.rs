// The cooperative system and its two dominant systems driven by the same
// random stream: the padded queues can only be longer.
//
// cargo run --release --example dominance_coupling

use ehcrn::rng::StreamKey;
use ehcrn::sim::SlotModel;
use ehcrn::*;

pub fn run_example() -> Result<()> {
    let p = SystemParams::baseline(0.6, 0.6)?;
    let pt = RatePoint::new(0.25, 0.1)?;
    let a = 0.5;
    let models = [
        SlotModel::new(&p, pt, PolicySpec::cooperative(a)?, false),
        SlotModel::new(&p, pt, PolicySpec::dominant_i(a)?, false),
        SlotModel::new(&p, pt, PolicySpec::dominant_ii(a)?, false),
    ];
    let key = StreamKey::new(0, 0, 0);
    let mut rngs = [key.rng(42), key.rng(42), key.rng(42)];
    let mut states = [QueueState::default(); 3];
    let mut violations = 0;

    for t in 1..=50_000u32 {
        for ((m, s), r) in models.iter().zip(&mut states).zip(&mut rngs) {
            *s = m.step(*s, r).0;
        }
        let [coop, dom1, dom2] = states;
        violations += u32::from(dom1.q_ps < coop.q_ps || dom2.q_s < coop.q_s);
        if t % 10_000 == 0 {
            println!(
                "slot {t:>6}: Q_ps coop {:>4} / dominant I {:>4}   Q_s coop {:>4} / dominant II {:>4}",
                coop.q_ps, dom1.q_ps, coop.q_s, dom2.q_s
            );
        }
    }
    println!("ordering violations: {violations}");
    assert_eq!(violations, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
