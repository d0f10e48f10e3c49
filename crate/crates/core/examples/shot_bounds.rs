//! Shot budgets from the Hoeffding bounds, with an empirical check of the
//! top-outcome budget.

use awqpe::bounds::{non_adjacent_ceiling_exact, pair_error_bound, BoundParams};
use awqpe::harness::validate_top_outcome_bound;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = BoundParams::default();
    println!("2 / gap^2 = {:.4}", params.top_outcome_constant());
    println!("ambiguity decision budget: {} shots", params.shots_for_ambiguity()?);
    println!("one-pair error bound at 100 shots: {:.3e}", pair_error_bound(100, 0.36)?);
    for m in [2, 3, 4, 6, 8] {
        let check = validate_top_outcome_bound(m, params.epsilon1, 5000, 7)?;
        println!(
            "m={m}: {} shots, misses {}/{}, exact non-adjacent ceiling {:.4}",
            check.shots,
            check.misses,
            check.trials,
            non_adjacent_ceiling_exact(m)?
        );
    }
    Ok(())
}
