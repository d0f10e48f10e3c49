//! Every phase I/2^n, noise-free, for every split of n into windows of at
//! least two bits.
//!
//! `cargo run --release --example exhaustive_grid -- [n]`

use awqpe::harness::{compositions, exhaustive_grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    println!("{:<24} {:>9} {:>11} {:>14}", "windows", "recovered", "tie phases", "tie recovered");
    for s in exhaustive_grid(n, &compositions(n, 2))? {
        println!(
            "{:<24} {:>9} {:>11} {:>14}",
            s.label.trim_start_matches(&format!("grid n={n} m=")),
            format!("{}/{}", s.successes, s.trials),
            s.tie_cases,
            s.tie_successes + s.tie_special_chunk
        );
    }
    Ok(())
}
