// Amplify an equatorial photon and inspect the macro-qubit.

use macroqubit::amplifier::{gain_params, macroqubit_state, mean_photons, DEFAULT_EPS_TRUNC};
use macroqubit::fock::ModePair;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = 1.2;
    let params = gain_params(g)?;
    let state = macroqubit_state(0.0, g, DEFAULT_EPS_TRUNC)?;
    println!("g = {g}: Gamma = {:.6}, C = {:.6}, mean pairs = {:.6}", params.gamma, params.c, params.mean_photons);
    println!("represented up to {} photons, truncated mass {:.2e}", state.max_total(), state.trunc_tail());
    println!("norm = {:.12}", state.norm_sqr());
    let (plus, minus) = state.mean_counts();
    let (n_plus, n_minus) = mean_photons(0.0, 1.0, g)?;
    println!("<N+> = {plus:.8} (closed form {n_plus:.8}), <N-> = {minus:.8} (closed form {n_minus:.8})");
    for pair in [ModePair::new(1, 0), ModePair::new(2, 1), ModePair::new(1, 2), ModePair::new(3, 0)] {
        println!("P{pair} = {:.6e}", state.amplitude(pair).probability());
    }
    let conj = state.expressed_in(std::f64::consts::FRAC_PI_2);
    println!("in the conjugate basis the means are {:?}", conj.mean_counts());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("amplify example failed");
}
