//! Compares the analytic window distribution with a full statevector
//! simulation of the window circuit.

use awqpe::binary::{window_fraction, PhaseValue};
use awqpe::harness::oracle_check;
use awqpe::kernel::dirichlet_pmf;
use awqpe::statevector::{window_distribution_exact, UnitaryModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = PhaseValue::parse("0.8203125")?;
    let simulated = window_distribution_exact(&UnitaryModel::diagonal(phi), 3, 0)?;
    let kernel = dirichlet_pmf(window_fraction(phi, 0)?, 3)?;
    for (j, (a, b)) in simulated.probs().iter().zip(kernel.probs()).enumerate() {
        println!("outcome {j:03b}: simulated {a:.12} kernel {b:.12}");
    }

    let report = oracle_check(100, 6, 10, 1)?;
    println!(
        "{} comparisons, worst distance {:e} at m={} k={}",
        report.comparisons, report.max_distance, report.worst_m, report.worst_k
    );
    Ok(())
}
