//! Uniform random phases at 16 bits with four 4-bit windows, once with a
//! single pass and once with a confirming rerun for special-chunk cases.
//!
//! `cargo run --release --example monte_carlo -- [trials] [seed]`

use awqpe::estimator::EstimationConfig;
use awqpe::harness::monte_carlo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let cfg = EstimationConfig::new(vec![4, 4, 4, 4]).with_seed(seed);
    for confirm in [false, true] {
        let s = monte_carlo(trials, 16, &cfg, confirm)?;
        println!("{}: {}/{} = {:.4} in {:.2}s", s.label, s.successes, s.trials, s.success_rate, s.wall_time_s);
        if let Some(f) = s.failures.first() {
            println!("  first miss: phi {} est {} best {} (replay seed {})", f.phi_true, f.est_bits, f.expected_bits, f.seed);
        }
    }
    Ok(())
}
