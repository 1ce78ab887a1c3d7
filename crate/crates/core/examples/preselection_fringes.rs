// Fringes of the pre-selected macro-qubit against the injected angle.

use std::f64::consts::{FRAC_PI_4, PI};

use macroqubit::analysis::{fringe_pattern_with, preselect_visibilities};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = 0.8;
    let alphas: Vec<f64> = (0..24).map(|i| i as f64 * PI / 24.0).collect();
    for k in [0, 3] {
        for beta in [0.0, FRAC_PI_4] {
            let curve = fringe_pattern_with(&alphas, beta, FRAC_PI_4, k, g, 0.9, 1e-10)?;
            let (x, y) = curve
                .samples
                .iter()
                .filter_map(|(x, y)| y.map(|y| (*x, y)))
                .fold((0.0, f64::MIN), |best, s| if s.1 > best.1 { s } else { best });
            println!("k = {k}, beta = {beta:.4}: peak {y:.4} at alpha = {x:.4}");
        }
    }
    for v in preselect_visibilities(FRAC_PI_4, &[0, 3], g, 0.9, 24, 1e-10)? {
        let v = v?;
        println!("k = {}: V = {:.4} at alpha = {:.4}, pass {:.3e}", v.k, v.visibility, v.alpha_bar, v.pass_probability);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fringe example failed");
}
