// CHSH value of the micro-macro pair, ideal and pre-selected.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use macroqubit::analysis::{chsh_sweep, chsh_value, MicroMacroModel};
use macroqubit::filters::FilterSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ideal = MicroMacroModel::new(0.0, 1.0, None, 0)?;
    let s = chsh_value(0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4, &ideal)?;
    println!("single photon: S = {s:.6}");
    let spec = FilterSpec::DoubleOf { k: 2, basis1: 0.0, basis2: FRAC_PI_4 };
    let model = MicroMacroModel::new(0.6, 0.9, Some(spec), 0)?;
    let sweep = chsh_sweep(&model, 8)?;
    println!("g = 0.6, k = 2: max |S| = {:.4} at {:?}", sweep.max_abs_s, sweep.angles);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("chsh example failed");
}
