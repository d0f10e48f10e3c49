//! Built-in irrational phases, evaluated with wide integer arithmetic and
//! truncated to the 128-bit phase grid.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::binary::{pow2, PhaseValue, FRACTION_BITS};

// working precision; the surplus over 128 absorbs series truncation error
const WORK_BITS: u32 = FRACTION_BITS + 64;

/// `atan(1/x) * 2^WORK_BITS` by the alternating Taylor series.
fn atan_inv(x: u32) -> BigUint {
    let x = BigUint::from(x);
    let x2 = &x * &x;
    let mut power = pow2(WORK_BITS) / &x;
    let mut sum_pos = BigUint::zero();
    let mut sum_neg = BigUint::zero();
    let mut n = 1u32;
    while !power.is_zero() {
        let term = &power / n;
        if (n / 2).is_multiple_of(2) {
            sum_pos += term;
        } else {
            sum_neg += term;
        }
        power /= &x2;
        n += 2;
    }
    sum_pos - sum_neg
}

/// `pi * 2^WORK_BITS` (Machin's formula).
fn pi_scaled() -> BigUint {
    atan_inv(5) * 16u32 - atan_inv(239) * 4u32
}

/// `sqrt(v) * 2^WORK_BITS`.
fn sqrt_scaled(v: u32) -> BigUint {
    (BigUint::from(v) << (2 * WORK_BITS)).sqrt()
}

fn to_phase(scaled: BigUint) -> PhaseValue {
    let raw = scaled >> (WORK_BITS - FRACTION_BITS);
    PhaseValue::from_raw(raw.to_u128().expect("constant below one"))
}

pub fn pi_over_6() -> PhaseValue {
    to_phase(pi_scaled() / 6u32)
}

pub fn inv_sqrt2() -> PhaseValue {
    // 1/sqrt(2) = sqrt(2)/2
    to_phase(sqrt_scaled(2) >> 1)
}

pub fn sin_pi_over_12() -> PhaseValue {
    // sin(15 deg) = (sqrt(6) - sqrt(2)) / 4
    to_phase((sqrt_scaled(6) - sqrt_scaled(2)) >> 2)
}

/// Looks up a named constant; spelling variants are accepted.
pub fn named_phase(name: &str) -> Option<PhaseValue> {
    let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    match key.to_ascii_lowercase().as_str() {
        "pi/6" => Some(pi_over_6()),
        "1/sqrt2" | "1/sqrt(2)" | "sqrt(2)/2" | "sqrt2/2" => Some(inv_sqrt2()),
        "sin(pi/12)" => Some(sin_pi_over_12()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::best_approx;

    #[test]
    fn constants_match_f64() {
        let tol = 3e-16;
        assert!((pi_over_6().to_f64() - std::f64::consts::PI / 6.0).abs() < tol);
        assert!((inv_sqrt2().to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < tol);
        let s = (std::f64::consts::PI / 12.0).sin();
        assert!((sin_pi_over_12().to_f64() - s).abs() < tol);
    }

    #[test]
    fn constants_round_like_reference_estimates() {
        // numerators of the best approximations at the precisions the
        // reference runs use
        assert_eq!(best_approx(pi_over_6(), 10), 536);
        assert_eq!(best_approx(inv_sqrt2(), 30), 759_250_125);
        assert_eq!(best_approx(sin_pi_over_12(), 22), 0b0100001001000001111110);
    }

    #[test]
    fn leading_bits_of_inverse_sqrt2() {
        // 1/sqrt(2) = 0xB504F333F9DE6484597D89B3754ABE9F... / 2^128
        assert_eq!(inv_sqrt2().raw() >> 64, 0xB504_F333_F9DE_6484);
    }

    #[test]
    fn names() {
        assert_eq!(named_phase("1/sqrt(2)"), Some(inv_sqrt2()));
        assert_eq!(named_phase(" PI/6 "), Some(pi_over_6()));
        assert!(named_phase("pi/7").is_none());
    }
}
