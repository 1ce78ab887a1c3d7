// Tap a macro-qubit on an unbalanced splitter and condition on the tap.

use macroqubit::amplifier::macroqubit_state;
use macroqubit::fock::ModePair;
use macroqubit::splitter::{conditional_transmitted, ubs_joint};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (g, tau) = (0.8, 0.9);
    let state = macroqubit_state(0.0, g, 1e-12)?;
    let joint = ubs_joint(&state, tau, 0.0)?;
    println!("joint mass {:.12}", joint.total_probability());
    for (refl, p) in joint.refl_marginal().into_iter().take(6) {
        println!("reflected {refl}: {p:.6e}");
    }
    for detected in [ModePair::new(0, 0), ModePair::new(3, 0), ModePair::new(0, 3)] {
        let cond = conditional_transmitted(&joint, detected)?;
        let (a, b) = cond.mean_counts();
        println!("after detecting {detected}: transmitted means ({a:.4}, {b:.4})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("split example failed");
}
