//! Exact binary-fraction arithmetic.
//!
//! Phases are held as 128-bit fixed-point fractions of the unit interval.
//! Estimates never use more than [`MAX_TOTAL_BITS`] bits, which leaves at
//! least [`GUARD_BITS`] guard bits below the last estimated bit, so window
//! shifts and roundings are exact integer operations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::constants;
use crate::error::{AwqpeError, Result};

/// Fractional bits stored by a [`PhaseValue`].
pub const FRACTION_BITS: u32 = 128;
/// Bits kept below the least significant estimated bit.
pub const GUARD_BITS: u32 = 64;
/// Largest total precision an estimate may request.
pub const MAX_TOTAL_BITS: u32 = FRACTION_BITS - GUARD_BITS;

fn check_width(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_TOTAL_BITS {
        return Err(AwqpeError::BitWidth(bits));
    }
    Ok(())
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A real number in `[0, 1)` stored as `raw / 2^128`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseValue(u128);

impl PhaseValue {
    pub const ZERO: PhaseValue = PhaseValue(0);

    pub const fn from_raw(raw: u128) -> Self {
        PhaseValue(raw)
    }

    pub const fn raw(self) -> u128 {
        self.0
    }

    /// `numerator / 2^bits`, exact.
    pub fn from_dyadic(numerator: u64, bits: u32) -> Result<Self> {
        check_width(bits)?;
        if numerator > mask(bits) {
            return Err(AwqpeError::ValueOutOfRange {
                value: numerator,
                bits,
            });
        }
        Ok(PhaseValue((numerator as u128) << (FRACTION_BITS - bits)))
    }

    /// Converts an `f64` in `[0, 1)`. Exact for values at or above `2^-75`;
    /// smaller magnitudes are truncated at the 128th fractional bit.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(AwqpeError::PhaseOutOfRange(x.to_string()));
        }
        Ok(PhaseValue((x * 2f64.powi(FRACTION_BITS as i32)) as u128))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 * 2f64.powi(-(FRACTION_BITS as i32))
    }

    /// `(self + other) mod 1`.
    pub fn wrapping_add(self, other: PhaseValue) -> PhaseValue {
        PhaseValue(self.0.wrapping_add(other.0))
    }

    /// `(self - other) mod 1`.
    pub fn wrapping_sub(self, other: PhaseValue) -> PhaseValue {
        PhaseValue(self.0.wrapping_sub(other.0))
    }

    /// Distance on the unit circle, in `[0, 0.5]`.
    pub fn circle_distance(self, other: PhaseValue) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        d.min(d.wrapping_neg()).to_f64().unwrap_or(0.0) * 2f64.powi(-(FRACTION_BITS as i32))
    }

    /// `frac(2^k * self)`.
    pub fn window_fraction(self, k: u32) -> Result<PhaseValue> {
        window_fraction(self, k)
    }

    /// Exact decimal expansion (every value here has a finite one).
    pub fn to_decimal_string(self) -> String {
        if self.0 == 0 {
            return "0.0".to_string();
        }
        // raw / 2^128 = raw * 5^128 / 10^128
        let scaled = BigUint::from(self.0) * BigUint::from(5u32).pow(FRACTION_BITS);
        let digits = scaled.to_str_radix(10);
        let width = FRACTION_BITS as usize;
        let padded = format!("{digits:0>width$}");
        format!("0.{}", padded.trim_end_matches('0'))
    }

    /// Parses a phase given as a decimal (`0.3`), a binary fraction
    /// (`0b1101` = 0.1101₂), an integer ratio (`3/256`), or one of the
    /// built-in constants `pi/6`, `1/sqrt2`, `sin(pi/12)`.
    ///
    /// Non-dyadic inputs are rounded toward zero at the 128th bit.
    pub fn parse(s: &str) -> Result<PhaseValue> {
        let s = s.trim();
        if let Some(v) = constants::named_phase(s) {
            return Ok(v);
        }
        if let Some(bits) = s.strip_prefix("0b") {
            if bits.is_empty() || bits.len() > FRACTION_BITS as usize {
                return Err(AwqpeError::PhaseParse(s.to_string()));
            }
            let mut raw = 0u128;
            for (i, c) in bits.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => raw |= 1u128 << (FRACTION_BITS as usize - 1 - i),
                    _ => return Err(AwqpeError::PhaseParse(s.to_string())),
                }
            }
            return Ok(PhaseValue(raw));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigUint = num
                .trim()
                .parse()
                .map_err(|_| AwqpeError::PhaseParse(s.to_string()))?;
            let den: BigUint = den
                .trim()
                .parse()
                .map_err(|_| AwqpeError::PhaseParse(s.to_string()))?;
            if den.is_zero() {
                return Err(AwqpeError::PhaseParse(s.to_string()));
            }
            if num >= den {
                return Err(AwqpeError::PhaseOutOfRange(s.to_string()));
            }
            return Ok(PhaseValue(ratio_to_raw(&num, &den)));
        }
        parse_decimal(s)
    }
}

fn ratio_to_raw(num: &BigUint, den: &BigUint) -> u128 {
    let raw = (num << FRACTION_BITS) / den;
    raw.to_u128().expect("ratio below one fits in 128 bits")
}

fn parse_decimal(s: &str) -> Result<PhaseValue> {
    let bad = || AwqpeError::PhaseParse(s.to_string());
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    if int_part.chars().any(|c| c != '0') {
        return Err(AwqpeError::PhaseOutOfRange(s.to_string()));
    }
    if frac_part.is_empty() {
        return Ok(PhaseValue::ZERO);
    }
    let num: BigUint = frac_part.parse().map_err(|_| bad())?;
    let den = BigUint::from(10u32).pow(frac_part.len() as u32);
    Ok(PhaseValue(ratio_to_raw(&num, &den)))
}

impl fmt::Display for PhaseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl FromStr for PhaseValue {
    type Err = AwqpeError;

    fn from_str(s: &str) -> Result<Self> {
        PhaseValue::parse(s)
    }
}

/// Binary digits, most significant first, at most 64 of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    value: u64,
    len: u32,
}

impl BitString {
    pub fn new(value: u64, len: u32) -> Result<Self> {
        check_width(len)?;
        if value > mask(len) {
            return Err(AwqpeError::ValueOutOfRange { value, bits: len });
        }
        Ok(BitString { value, len })
    }

    pub fn zeros(len: u32) -> Result<Self> {
        BitString::new(0, len)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn msb(&self) -> bool {
        (self.value >> (self.len - 1)) & 1 == 1
    }

    /// `self` followed by `tail`.
    pub fn concat(&self, tail: &BitString) -> Result<BitString> {
        let len = self.len + tail.len;
        check_width(len)?;
        Ok(BitString {
            value: (self.value << tail.len) | tail.value,
            len,
        })
    }

    /// Concatenates a non-empty sequence of chunks.
    pub fn concat_all<'a, I>(chunks: I) -> Result<BitString>
    where
        I: IntoIterator<Item = &'a BitString>,
    {
        let mut iter = chunks.into_iter();
        let first = *iter
            .next()
            .ok_or_else(|| AwqpeError::LengthMismatch("no chunks to concatenate".into()))?;
        iter.try_fold(first, |acc, c| acc.concat(c))
    }

    /// Splits into consecutive chunks of the given widths, MSB chunk first.
    pub fn split(&self, widths: &[u32]) -> Result<Vec<BitString>> {
        let total: u32 = widths.iter().sum();
        if total != self.len {
            return Err(AwqpeError::LengthMismatch(format!(
                "{} bits cannot be split into widths summing to {total}",
                self.len
            )));
        }
        let mut rest = self.len;
        widths
            .iter()
            .map(|&w| {
                rest -= w;
                BitString::new((self.value >> rest) & mask(w), w)
            })
            .collect()
    }

    pub fn to_dyadic(&self) -> DyadicFraction {
        DyadicFraction {
            numerator: self.value,
            bits: self.len,
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.len as usize)
    }
}

impl FromStr for BitString {
    type Err = AwqpeError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_TOTAL_BITS as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(AwqpeError::BitParse(s.to_string()));
        }
        let value = u64::from_str_radix(s, 2).map_err(|_| AwqpeError::BitParse(s.to_string()))?;
        BitString::new(value, s.len() as u32)
    }
}

/// `numerator / 2^bits` with `numerator < 2^bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicFraction {
    numerator: u64,
    bits: u32,
}

impl DyadicFraction {
    pub fn new(numerator: u64, bits: u32) -> Result<Self> {
        BitString::new(numerator, bits).map(|b| b.to_dyadic())
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn to_bits(&self) -> BitString {
        BitString {
            value: self.numerator,
            len: self.bits,
        }
    }

    pub fn to_phase(&self) -> PhaseValue {
        PhaseValue((self.numerator as u128) << (FRACTION_BITS - self.bits))
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 * 2f64.powi(-(self.bits as i32))
    }
}

impl fmt::Display for DyadicFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_phase().to_decimal_string())
    }
}

/// Numerator of the best `n`-bit approximation, `floor(y * 2^n + 1/2) mod 2^n`.
///
/// # Panics
/// If `n` is zero or larger than [`MAX_TOTAL_BITS`].
pub fn best_approx(y: PhaseValue, n: u32) -> u64 {
    assert!(
        (1..=MAX_TOTAL_BITS).contains(&n),
        "best_approx width {n} out of range"
    );
    let half = 1u128 << (FRACTION_BITS - n - 1);
    // overflow of the add is exactly the wrap of 2^n to 0
    (y.0.wrapping_add(half) >> (FRACTION_BITS - n)) as u64
}

/// `frac(2^k * phi)`; `k` may not exceed the guard-bit budget.
pub fn window_fraction(phi: PhaseValue, k: u32) -> Result<PhaseValue> {
    if k > MAX_TOTAL_BITS {
        return Err(AwqpeError::PrecisionExhausted {
            shift: k,
            budget: MAX_TOTAL_BITS,
        });
    }
    Ok(PhaseValue(phi.0 << k))
}

/// Minimum of two distinct outcomes on the cycle `Z/n`.
///
/// `{0, n-1}` are adjacent across the wrap and give `n - 1`; every other
/// pair gives the ordinary minimum.
pub fn cyclic_min(a: u64, b: u64, n: u64) -> Result<u64> {
    if n < 2 || a == b || a >= n || b >= n {
        return Err(AwqpeError::CyclicMin { a, b, n });
    }
    if a.min(b) == 0 && a.max(b) == n - 1 {
        Ok(n - 1)
    } else {
        Ok(a.min(b))
    }
}

/// Combines the best `m`-bit approximation `b_m` of `x` with the best
/// `k`-bit approximation `b_k` of `frac(2^m x)` into the best `(m+k)`-bit
/// approximation of `x` (mod `2^(m+k)`).
pub fn combine_approx(b_m: u64, m: u32, b_k: u64, k: u32) -> Result<u64> {
    check_width(m)?;
    check_width(k)?;
    check_width(m + k)?;
    if b_m > mask(m) {
        return Err(AwqpeError::ValueOutOfRange { value: b_m, bits: m });
    }
    if b_k > mask(k) {
        return Err(AwqpeError::ValueOutOfRange { value: b_k, bits: k });
    }
    let half = 1u64 << (k - 1);
    if b_k == half {
        return Err(AwqpeError::AmbiguousHalf);
    }
    let p = if b_k > half { b_m.wrapping_sub(1) } else { b_m };
    Ok(p.wrapping_shl(k).wrapping_add(b_k) & mask(m + k))
}

/// `2^bits` as a `BigUint`; used by callers that need exact wide integers.
pub(crate) fn pow2(bits: u32) -> BigUint {
    BigUint::one() << bits
}
