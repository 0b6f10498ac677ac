//! Runs the full certification pipeline from a JSON configuration, the same
//! path the `certify` subcommand takes.

use clap::Parser;
use lyapcert::cli::{run, Cli};

const CONFIG: &str = r#"{
  "n": 2, "family": "linear-constant",
  "params": {"F": [[2.001, 0], [0, 2.001]], "G": [[2.001, 0], [0, 2.001]],
             "H": [[0.05, 0], [0, 0.05]],
             "forcing": {"amplitude": [0.01, 0.0]}},
  "A": [[2, 0], [0, 2]], "B": [[2, 0], [0, 2]],
  "sqrt_eps": 0.004,
  "omega": 6.283185307179586,
  "box": {"radius": 1.0, "grid": 3, "random": 20, "seed": 3}
}"#;

fn main() {
    let cli = Cli::parse_from(["lyapcert", "certify", "--config", "-", "--seed", "42"]);
    let outcome = run(&cli, &mut CONFIG.as_bytes());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    println!("exit code {}", outcome.code);
}
