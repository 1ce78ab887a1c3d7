// Transmitted visibility against the reflected threshold, in the
// codification and the conjugate basis.

use std::f64::consts::FRAC_PI_2;

use macroqubit::analysis::visibility_curve;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ks: Vec<u32> = (0..=10).collect();
    let same = visibility_curve(0.0, 0.0, 0.0, 1.1, 0.9, &ks, 1e-10)?;
    let conj = visibility_curve(FRAC_PI_2, 0.0, FRAC_PI_2, 1.1, 0.9, &ks, 1e-10)?;
    for ((k, a), (_, b)) in same.samples.iter().zip(&conj.samples) {
        println!("k = {k:>2}: V(+) = {:.4}, V(R) = {:.4}", a.unwrap_or(f64::NAN), b.unwrap_or(f64::NAN));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("visibility example failed");
}
