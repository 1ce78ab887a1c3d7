// Raise the injection probability by thresholding the reflected intensity.

use macroqubit::analysis::conditional_injection_curve;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let hs: Vec<i64> = (-1..=8).collect();
    for p in [0.1, 0.5, 0.9] {
        let curve = conditional_injection_curve(p, 1.5, 0.9, &hs, 1e-10)?;
        let ys: Vec<String> = curve.ys().map(|y| format!("{y:.3}")).collect();
        println!("p = {p}: {}", ys.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("distillation example failed");
}
