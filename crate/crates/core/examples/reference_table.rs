//! Runs the five published reference cases and prints them as CSV, then
//! flags any row whose bits differ from the published ones.

use awqpe::estimator::EstimationConfig;
use awqpe::harness::{run_table1, table1_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = run_table1(&EstimationConfig::new(vec![2]).with_seed(2024))?;
    print!("{}", table1_csv(&rows));
    for (row, rep) in &rows {
        if rep.raw_bits != row.raw_bits || rep.est_bits != row.final_bits {
            println!("case {} differs: raw {} final {}", row.case, rep.raw_bits, rep.est_bits);
        }
    }
    Ok(())
}
