//! 0.6875 with windows [3, 3] has a residual of exactly 1/2 after three bits,
//! so its estimate carries a special chunk. Shifting the phase by 3/256 and
//! comparing the two estimates confirms the result.

use awqpe::binary::PhaseValue;
use awqpe::estimator::EstimationConfig;
use awqpe::harness::{perturbation_check, run_case_confirmed};
use awqpe::statevector::UnitaryModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = UnitaryModel::diagonal(PhaseValue::parse("0.6875")?);
    let cfg = EstimationConfig::new(vec![3, 3]).with_seed(8);
    let v = perturbation_check(&model, PhaseValue::parse("3/256")?, &cfg)?;
    println!("estimate {} (special chunk {:?})", v.est, v.last_idx);
    println!("shifted  {} (special chunk {:?})", v.est_shifted, v.last_idx_shifted);
    println!("shift seen {} vs {}: {}", v.observed_shift, v.delta_phi, if v.pass { "consistent" } else { "inconsistent" });

    let confirmed = run_case_confirmed(&model, &cfg)?;
    println!(
        "automatic rerun shift {:?} -> {} (best {})",
        confirmed.rerun_shift, confirmed.est_bits, confirmed.expected_bits
    );
    Ok(())
}
