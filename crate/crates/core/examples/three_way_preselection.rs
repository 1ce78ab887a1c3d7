// Enumerate a two-branch tap and apply the pre-selection trigger.

use std::f64::consts::FRAC_PI_4;

use macroqubit::amplifier::macroqubit_state;
use macroqubit::filters::{double_of_pass, of_dichotomic, DichotomicOutcome};
use macroqubit::splitter::three_way_split;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let state = macroqubit_state(0.0, 0.6, 1e-12)?;
    let outcomes = three_way_split(&state, 0.9, 0.0, FRAC_PI_4)?;
    println!("{} joint outcomes", outcomes.len());
    for k in [0, 1, 2] {
        let (mut pass, mut plus) = (0.0, 0.0);
        for o in outcomes.iter().filter(|o| double_of_pass(o, k)) {
            pass += o.probability;
            if of_dichotomic(o.trans, 0) == DichotomicOutcome::Plus {
                plus += o.probability;
            }
        }
        println!("k = {k}: shutter opens with p = {pass:.4e}, P(+ and open) = {plus:.4e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("three-way example failed");
}
