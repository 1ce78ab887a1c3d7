// Compare closed-form tables with dense state-vector evolution.

use macroqubit::oracle::{standard_suites, OracleConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for r in standard_suites(0.3, &OracleConfig::default())? {
        println!("{:<48} max deviation {:.2e} over {} entries", r.name, r.max_deviation, r.compared);
        assert!(r.passed());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("oracle example failed");
}
