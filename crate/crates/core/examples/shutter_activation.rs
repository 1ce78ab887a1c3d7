// Probability that the reflected orthogonality filter fires.

use std::f64::consts::FRAC_PI_2;

use macroqubit::analysis::activation_values;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ks: Vec<u32> = (0..=10).collect();
    let plus = activation_values(0.0, 1.5, 0.9, 0.0, &ks, 1e-10)?;
    let right = activation_values(FRAC_PI_2, 1.5, 0.9, 0.0, &ks, 1e-10)?;
    println!("k  P(on | +)     P(on | R)");
    for ((k, a), b) in ks.iter().zip(&plus).zip(&right) {
        println!("{k:<2} {a:.6e}  {b:.6e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("activation example failed");
}
