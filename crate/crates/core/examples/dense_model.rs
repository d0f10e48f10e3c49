//! Estimates the eigenphase of a two-qubit unitary read from a text file,
//! simulating every window circuit in full.
//!
//! `cargo run --example dense_model -- [model file]`

use awqpe::estimator::{Backend, EstimationConfig};
use awqpe::harness::run_case;
use awqpe::statevector::{standard_qpe_distribution, UnitaryModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/models/phase_pair.txt").into());
    let model = UnitaryModel::from_file(&path)?;
    println!("{} target qubits, eigenphase {}", model.target_qubits(), model.eigenphase());

    let cfg = EstimationConfig::new(vec![3, 3]).with_backend(Backend::StatevectorSampling).with_seed(5);
    let r = run_case(&model, &cfg)?;
    println!("windowed estimate {} = {} ({})", r.est_bits, r.est_decimal, if r.success { "best 6-bit" } else { "miss" });

    let standard = standard_qpe_distribution(&model, 6)?;
    println!("single-register circuit peak: {:06b} with p = {:.6}", standard.argmax(), standard.prob(standard.argmax()));
    Ok(())
}
