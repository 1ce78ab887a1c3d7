// Balanced split with orthogonality filters on both halves.

use std::f64::consts::FRAC_PI_2;

use macroqubit::analysis::double_of_surface;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ks: Vec<u32> = (0..=4).collect();
    let hs: Vec<u32> = (0..=4).collect();
    let surface = double_of_surface(1.2, &ks, &hs, 0.0, FRAC_PI_2, 1e-10)?;
    println!("rows k, columns h");
    for (k, row) in ks.iter().zip(&surface) {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.as_ref().map_or("  --  ".into(), |v| format!("{:.4}", v.value)))
            .collect();
        println!("k = {k}: {}", cells.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("double-filter example failed");
}
