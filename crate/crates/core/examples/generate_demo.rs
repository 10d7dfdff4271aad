//! Writes the bundled demo dataset: 400 rows from a six-variable
//! linear-Gaussian model with one effect-only variable, mirroring the
//! kind of data the search is meant for.
//!
//!     cargo run -p specsearch --example generate_demo > data/demo.csv

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specsearch::synth::{generate_data, TruthSpec};

fn main() {
    let spec = TruthSpec {
        names: ["outcome", "control", "focus", "activity", "capacity", "load"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        arcs: vec![
            ("control".into(), "outcome".into()),
            ("focus".into(), "outcome".into()),
            ("activity".into(), "outcome".into()),
            ("capacity".into(), "outcome".into()),
            ("capacity".into(), "control".into()),
            ("activity".into(), "focus".into()),
            ("load".into(), "activity".into()),
        ],
        coefficients: Some(vec![-1.1, 0.9, -0.8, -1.3, 1.0, 1.2, 0.9]),
        noise_variances: Some(vec![1.0; 6]),
        constraints: vec![],
    };
    let truth = spec
        .instantiate(&mut ChaCha8Rng::seed_from_u64(6))
        .expect("valid demo spec");
    let data = generate_data(&truth, 400, &mut ChaCha8Rng::seed_from_u64(60)).expect("generate");

    println!("{}", data.names().join(","));
    for r in 0..data.n_rows() {
        let row: Vec<String> = (0..data.n_vars())
            .map(|c| format!("{:.6}", data.values()[(r, c)]))
            .collect();
        println!("{}", row.join(","));
    }
}
