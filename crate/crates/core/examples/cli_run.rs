// Drive a subcommand from a JSON config, as the binary does.

use macroqubit::cli::{main_with_args, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("macroqubit-cli-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{ "g": 1.0, "thresholds": [0, 1, 2], "bases": [0, "pi/2"] }"#)?;
    RunConfig::load(&config)?;
    let out = dir.join("out");
    let code = main_with_args([
        "macroqubit",
        "activation",
        "--config",
        config.to_str().ok_or("non-utf8 path")?,
        "--out",
        out.to_str().ok_or("non-utf8 path")?,
    ]);
    println!("exit code {code}");
    for entry in std::fs::read_dir(&out)? {
        println!("wrote {}", entry?.file_name().to_string_lossy());
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cli example failed");
}
