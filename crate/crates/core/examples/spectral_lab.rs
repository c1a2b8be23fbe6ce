//! The whole lab from a JSON config, as the `deform` subcommand runs it:
//! a field from characteristic data, surfaces for each lambda, and the
//! report with every check.

use std::error::Error;

use conformal_eds::cli::config::LabConfig;
use conformal_eds::cli::lab::cmd_deform;

// A solved field carries O(h^2) error, so matched entries agree only to
// that level; the exact seeds reach round-off.
const CONFIG: &str = r#"{
    "grid": { "nx": 48, "ny": 48 },
    "seed": { "type": "goursat", "profile": { "kind": "polynomial", "coefficients": [0.5, 1.0, 0.25] } },
    "lambdas": [0, 0.25, 1],
    "tolerances": { "deformation": 1e-4 },
    "base_frame_seed": 7
}"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg: LabConfig = serde_json::from_str(CONFIG)?;
    cfg.validate()?;
    let out = std::env::temp_dir().join("spectral_lab");
    let report = cmd_deform(&cfg, &out)?;
    print!("{}", report.summary());
    println!("data files in {}", out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
