//! LSB-to-MSB borrow correction of concatenated window chunks.

use crate::binary::{BitString, DyadicFraction};
use crate::error::{AwqpeError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedEstimate {
    pub est_bits: BitString,
    /// 1-based index of the special chunk, if any.
    pub last_idx: Option<usize>,
    pub value: DyadicFraction,
}

/// Finds the special chunk: scanning from the least significant chunk,
/// skip all-zero chunks and stop at the first non-zero one; it is special
/// when it reads `10...0`. Returns a 1-based index.
pub fn find_special_chunk(chunks: &[BitString]) -> Option<usize> {
    let (idx, chunk) = chunks.iter().enumerate().rev().find(|(_, c)| !c.is_zero())?;
    (chunk.value() == 1u64 << (chunk.len() - 1)).then_some(idx + 1)
}

/// Applies the borrow corrections to `raw_bits`, split by `m_list`.
///
/// For `j = B-1 .. 1` the borrow is the MSB of the (already corrected)
/// chunk `j+1`, suppressed when chunk `j` carries an ambiguity flag or when
/// chunk `j+1` is the special chunk. The borrow is subtracted mod `2^m_j`.
pub fn resolve(raw_bits: &BitString, m_list: &[u32], flags: &[bool]) -> Result<ResolvedEstimate> {
    if flags.len() != m_list.len() {
        return Err(AwqpeError::LengthMismatch(format!(
            "{} flags for {} blocks",
            flags.len(),
            m_list.len()
        )));
    }
    let mut chunks = raw_bits.split(m_list)?;
    let last_idx = find_special_chunk(&chunks);

    for j in (0..chunks.len().saturating_sub(1)).rev() {
        let suppressed = flags[j] || last_idx == Some(j + 2);
        let borrow = u64::from(chunks[j + 1].msb() && !suppressed);
        let width = chunks[j].len();
        let modulus_mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        chunks[j] = BitString::new(chunks[j].value().wrapping_sub(borrow) & modulus_mask, width)?;
    }

    let est_bits = BitString::concat_all(&chunks)?;
    Ok(ResolvedEstimate {
        est_bits,
        last_idx,
        value: est_bits.to_dyadic(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn chunks(list: &[&str]) -> Vec<BitString> {
        list.iter().map(|s| bits(s)).collect()
    }

    #[test]
    fn special_chunk_examples() {
        assert_eq!(find_special_chunk(&chunks(&["101", "1000"])), Some(2));
        assert_eq!(find_special_chunk(&chunks(&["111", "10", "010"])), None);
        assert_eq!(find_special_chunk(&chunks(&["000", "00"])), None);
        assert_eq!(find_special_chunk(&chunks(&["100", "10", "00"])), Some(2));
        // the scan stops at the first non-zero chunk even if an earlier one is 10..0
        assert_eq!(find_special_chunk(&chunks(&["100", "11", "00"])), None);
    }

    #[test]
    fn walkthrough_correction() {
        let r = resolve(&bits("11110010"), &[3, 2, 3], &[false; 3]).unwrap();
        assert_eq!(r.est_bits.to_string(), "11010010");
        assert_eq!(r.last_idx, None);
        assert_eq!(r.value.to_f64(), 0.8203125);
    }

    #[test]
    fn tie_construction_is_left_alone() {
        let r = resolve(&bits("1011000"), &[3, 4], &[true, false]).unwrap();
        assert_eq!(r.est_bits.to_string(), "1011000");
        assert_eq!(r.last_idx, Some(2));
        // either suppression alone is enough
        let r = resolve(&bits("1011000"), &[3, 4], &[false, false]).unwrap();
        assert_eq!(r.est_bits.to_string(), "1011000");
        let r = resolve(&bits("1011001"), &[3, 4], &[true, false]).unwrap();
        assert_eq!(r.est_bits.to_string(), "1011001");
    }

    #[test]
    fn zeros_unchanged() {
        let r = resolve(&bits("0000000"), &[2, 3, 2], &[false; 3]).unwrap();
        assert_eq!(r.est_bits.to_string(), "0000000");
    }

    #[test]
    fn borrow_wraps_zero_chunk() {
        // 0.00|11 with borrow: first chunk 00 - 1 = 11
        let r = resolve(&bits("0011"), &[2, 2], &[false, false]).unwrap();
        assert_eq!(r.est_bits.to_string(), "1111");
    }

    #[test]
    fn table_rows() {
        let cases = [
            ("0101", vec![2, 2], "0101"),
            ("1000111000", vec![3, 2, 2, 3], "1000011000"),
            ("10111100", vec![4, 4], "10101100"),
            (
                "110101010000010100110011010101",
                vec![3; 10],
                "101101010000010011110011001101",
            ),
            ("0100001001000010001110", vec![5, 6, 7, 4], "0100001001000001111110"),
        ];
        for (raw, m, want) in cases {
            let flags = vec![false; m.len()];
            let r = resolve(&bits(raw), &m, &flags).unwrap();
            assert_eq!(r.est_bits.to_string(), want, "raw {raw}");
        }
    }

    #[test]
    fn length_errors() {
        assert!(resolve(&bits("0101"), &[2, 3], &[false, false]).is_err());
        assert!(resolve(&bits("0101"), &[2, 2], &[false]).is_err());
    }
}
