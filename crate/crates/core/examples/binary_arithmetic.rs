//! Fixed-point phase arithmetic: rounding, window fractions, the cyclic
//! minimum and combining a coarse estimate with a finer remainder.

use awqpe::binary::{best_approx, combine_approx, cyclic_min, window_fraction, PhaseValue};
use awqpe::constants::inv_sqrt2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = PhaseValue::parse("0.8203125")?;
    println!("{phi} = 0b{:08b}", best_approx(phi, 8));
    println!("best 3-bit: {:03b}; remainder after 3 bits: {}", best_approx(phi, 3), window_fraction(phi, 3)?);

    let b_m = best_approx(phi, 3);
    let b_k = best_approx(window_fraction(phi, 3)?, 5);
    println!("combine({b_m:03b}, {b_k:05b}) = {:08b}", combine_approx(b_m, 3, b_k, 5)?);
    println!("combine with an exact half: {:?}", combine_approx(1, 2, 2, 2).unwrap_err().to_string());

    println!("cyclic_min(3, 4, 8) = {}, cyclic_min(0, 7, 8) = {}", cyclic_min(3, 4, 8)?, cyclic_min(0, 7, 8)?);
    println!("1/sqrt(2) to 30 bits: {}", best_approx(inv_sqrt2(), 30));
    println!("1/sqrt(2) as stored: {}", inv_sqrt2());
    Ok(())
}
